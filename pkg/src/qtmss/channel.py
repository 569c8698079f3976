"""Simulated quantum channel with BB84 decoy insertion and pluggable adversaries.

A transfer is a sequence of transit particles: the payload qubits
(possibly entangled with qubits the sender keeps) interleaved with
fresh single-qubit decoys drawn from {|0>, |1>, |+>, |->}.  The sender
alone knows which positions are decoys and what was prepared there.
Verification follows the disclose-first order: the sender announces
positions and bases, the receiver measures those positions in the
announced bases and announces bits, and the sender counts mismatches
against the preparation record.

An intercept-resend adversary measures every transit particle in X or
Z chosen by a fair coin and forwards the eigenstate it finds; per
decoy that goes unnoticed with probability 3/4, so a clean check
happens with probability (3/4)^(d1+d2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .statevector import (H_MATRIX, Z_MATRIX, StateVector, plus_state,
                          single_qubit)

ADVERSARY_KINDS = frozenset({
    "none", "intercept_resend", "fake_measurement_reconstructor",
    "colluding_users",
})


@dataclass(frozen=True)
class ChannelConfig:
    """Decoy counts per transfer and the tolerated error budget."""

    d1: int = 2  # X-basis decoys (|+> / |->)
    d2: int = 2  # Z-basis decoys (|0> / |1>)
    abort_threshold: int = 0

    def __post_init__(self):
        if self.d1 < 0 or self.d2 < 0 or self.abort_threshold < 0:
            raise ValueError("decoy counts and threshold must be >= 0")


@dataclass(frozen=True)
class AdversaryModel:
    """Which attack is active on a transfer, if any.

    ``transfers`` restricts an intercept-resend attacker to specific
    transfer labels (None taps everything); ``colluders`` names the
    cooperating participants for collusion scenarios.
    """

    kind: str = "none"
    colluders: frozenset[str] = frozenset()
    transfers: frozenset[str] | None = None

    def __post_init__(self):
        if self.kind not in ADVERSARY_KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}")

    @classmethod
    def none(cls) -> "AdversaryModel":
        return cls("none")

    @classmethod
    def intercept_resend(cls, transfers=None) -> "AdversaryModel":
        t = None if transfers is None else frozenset(transfers)
        return cls("intercept_resend", transfers=t)

    @classmethod
    def colluding(cls, users) -> "AdversaryModel":
        return cls("colluding_users", colluders=frozenset(users))

    def taps(self, label: str) -> bool:
        if self.kind != "intercept_resend":
            return False
        return self.transfers is None or label in self.transfers


@dataclass
class PayloadQubit:
    """A reference to one qubit of a (possibly multi-qubit) state in transit."""

    state: StateVector
    qubit: int


@dataclass
class DecoyParticle:
    state: StateVector
    basis: str  # "X" or "Z"
    bit: int


@dataclass(frozen=True)
class DecoyRecord:
    """The sender's private preparation record for one transfer."""

    positions: tuple[int, ...]
    bases: tuple[str, ...]
    bits: tuple[int, ...]
    payload_positions: tuple[int, ...]


@dataclass
class TransitSequence:
    """The padded particle sequence as it arrives at the receiver."""

    items: list  # PayloadQubit | DecoyParticle, in transit order

    def payload(self) -> list[PayloadQubit]:
        return [p for p in self.items if isinstance(p, PayloadQubit)]


@dataclass(frozen=True)
class DecoyCheck:
    """Verification verdict: clean pass or abort with the evidence."""

    passed: bool
    errors: int
    error_positions: tuple[int, ...] = ()


def _fresh_decoy(basis: str, rng) -> DecoyParticle:
    bit = int(rng.integers(0, 2))
    if basis == "Z":
        state = single_qubit(1 - bit, bit)
    else:
        state = plus_state()
        if bit:
            state.apply_single(Z_MATRIX, 0)
    return DecoyParticle(state, basis, bit)


def _measure_in_basis(state: StateVector, qubit: int, basis: str, rng) -> int:
    """Projective X- or Z-basis measurement leaving the eigenstate in place."""
    if basis == "X":
        state.apply_single(H_MATRIX, qubit)
        bit = state.measure_computational(qubit, rng).bit
        state.apply_single(H_MATRIX, qubit)
    else:
        bit = state.measure_computational(qubit, rng).bit
    return bit


def _intercept_resend(sequence: TransitSequence, rng) -> None:
    """Eve measures each particle in a coin-flipped basis and resends it."""
    for item in sequence.items:
        eve_basis = "X" if rng.random() < 0.5 else "Z"
        if isinstance(item, DecoyParticle):
            _measure_in_basis(item.state, 0, eve_basis, rng)
        else:
            _measure_in_basis(item.state, item.qubit, eve_basis, rng)


def transmit_with_decoys(payload: list[PayloadQubit], config: ChannelConfig,
                         adversary: AdversaryModel, rng,
                         label: str = "transfer"
                         ) -> tuple[TransitSequence, DecoyRecord]:
    """Pad the payload with decoys at random positions and send it.

    Attacks never fail the transfer itself; they surface later in
    :func:`verify_decoys`.
    """
    d = config.d1 + config.d2
    total = len(payload) + d
    decoys = ([_fresh_decoy("X", rng) for _ in range(config.d1)]
              + [_fresh_decoy("Z", rng) for _ in range(config.d2)])
    positions = sorted(int(p) for p in rng.choice(total, size=d, replace=False)) \
        if d else []
    pos_set = set(positions)
    # Decoys are slotted into their positions in a shuffled order so the
    # basis pattern is not tied to the position order.
    order = rng.permutation(d) if d else []
    items: list = []
    payload_iter = iter(payload)
    payload_positions = []
    slot = 0
    for i in range(total):
        if i in pos_set:
            items.append(decoys[int(order[slot])])
            slot += 1
        else:
            items.append(next(payload_iter))
            payload_positions.append(i)
    record = DecoyRecord(
        positions=tuple(positions),
        bases=tuple(items[i].basis for i in positions),
        bits=tuple(items[i].bit for i in positions),
        payload_positions=tuple(payload_positions),
    )
    sequence = TransitSequence(items)
    if adversary.taps(label):
        _intercept_resend(sequence, rng)
    return sequence, record


def measure_decoys(sequence: TransitSequence, positions, bases,
                   rng) -> list[int]:
    """Receiver side: measure the disclosed positions in the disclosed bases."""
    announced = []
    for pos, basis in zip(positions, bases):
        item = sequence.items[pos]
        if not isinstance(item, DecoyParticle):
            raise ValueError(f"position {pos} is not a decoy")
        announced.append(_measure_in_basis(item.state, 0, basis, rng))
    return announced


def verify_decoys(record: DecoyRecord, announcements: list[int],
                  config: ChannelConfig) -> DecoyCheck:
    """Compare announced bits with the preparation record."""
    if len(announcements) != len(record.bits):
        raise ValueError("announcement count does not match the record")
    bad = tuple(pos for pos, prepared, got
                in zip(record.positions, record.bits, announcements)
                if prepared != got)
    return DecoyCheck(passed=len(bad) <= config.abort_threshold,
                      errors=len(bad), error_positions=bad)


def run_checked_transfer(payload: list[PayloadQubit], config: ChannelConfig,
                         adversary: AdversaryModel, rng,
                         label: str = "transfer") -> DecoyCheck:
    """One full transfer round: transmit, disclose, measure, verify."""
    sequence, record = transmit_with_decoys(payload, config, adversary, rng,
                                            label)
    announced = measure_decoys(sequence, record.positions, record.bases, rng)
    return verify_decoys(record, announced, config)


def estimate_detection_probability(config: ChannelConfig, trials: int,
                                   rng) -> float:
    """Monte Carlo pass rate of the decoy check under intercept-resend.

    The analytic value is (3/4)^(d1+d2) at threshold 0.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    adversary = AdversaryModel.intercept_resend()
    passes = 0
    for _ in range(trials):
        check = run_checked_transfer([], config, adversary, rng)
        passes += check.passed
    return passes / trials


def expected_pass_rate(config: ChannelConfig) -> float:
    return 0.75 ** (config.d1 + config.d2)
