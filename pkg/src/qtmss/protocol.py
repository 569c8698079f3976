"""The threshold multi-secret sharing session engine.

A session has a dealer, n users, and a designated reconstructor among
the t participating users (by convention the last entry of the
participating list).  It runs in two stages:

* Splitting: the dealer builds a degree-(t-1) polynomial whose constant
  term cancels the secret number, hands every user a share over a
  secure classical channel, announces the per-secret multipliers w_j,
  encrypts each single-qubit secret with an X-rotation derived from the
  secret number, and ships the encrypted qubits to the reconstructor
  with decoys.
* Reconstruction, per secret: each non-reconstructor participant picks
  a private angle delta; the reconstructor teleports delta onto a qubit
  it keeps (two-qubit cluster, rotated-basis measurement by the user, a
  conditional Z), then walks a chain of entangle / plus-minus-measure /
  publish-bit / receive-sigma / correct steps that each multiply one
  participant's weight rotation onto the carrier without revealing the
  weight.  A final local rotation by the reconstructor's own weight
  angle closes the loop: the accumulated rotation is an exact whole
  number of turns, so the secret reappears up to global phase.

Every classical message exchanged (measurement bits, sigma angles, the
public w announcements, abort notices, and the per-secret whole-turn
count) is logged in a Transcript with strictly increasing sequence
numbers; shares, weights, and the private delta angles never enter it.
The engine consumes one injected RNG stream per session, so a run is
bit-for-bit reproducible from its seed.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Mapping, Sequence

import numpy as np

from .channel import (AdversaryModel, ChannelConfig, PayloadQubit,
                      measure_decoys, transmit_with_decoys, verify_decoys)
from .fields import (DealerPolynomial, LagrangeWeight, PrimeModulus,
                     RationalAngle, ShareRecord, check_angle_sum, eval_share,
                     lagrange_weight, make_polynomial, random_polynomial,
                     rotation_angle)
from .statevector import (ClusterGraph, H_MATRIX, StateVector, X_MATRIX,
                          Z_MATRIX, build_cluster, fidelity_up_to_phase,
                          rx_matrix, single_qubit)

PHASE_SPLIT = "split"
PHASE_TELEPORT = "teleport"
PHASE_CORRECT = "correct"
PHASE_FINALIZE = "finalize"
PHASE_ABORT = "abort"

KIND_BIT = "measurement_bit"
KIND_SIGMA = "sigma_angle"
KIND_W = "w_announce"
KIND_ANGLE_SUM = "angle_sum"
KIND_ABORT = "abort_notice"

DEALER = "Dealer"


class SessionAborted(Exception):
    """Raised internally to unwind a session after an abort is logged."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class SigmaWithheld(Exception):
    """A participant refused to publish a correction angle."""

    def __init__(self, user: str):
        super().__init__(f"{user} withheld the correction angle")
        self.user = user


# ---------------------------------------------------------------------------
# transcript


@dataclass(frozen=True)
class TranscriptMessage:
    seq: int
    phase: str
    actor: str
    kind: str
    payload: object

    def to_json_obj(self) -> dict:
        return {"seq": self.seq, "phase": self.phase, "actor": self.actor,
                "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TranscriptMessage":
        return cls(int(obj["seq"]), obj["phase"], obj["actor"], obj["kind"],
                   obj["payload"])


class Transcript:
    """Ordered, append-only log of the session's classical messages."""

    def __init__(self, messages: Sequence[TranscriptMessage] = ()):
        self.messages: list[TranscriptMessage] = list(messages)

    def append(self, phase: str, actor: str, kind: str,
               payload) -> TranscriptMessage:
        msg = TranscriptMessage(len(self.messages) + 1, phase, actor, kind,
                                payload)
        self.messages.append(msg)
        return msg

    def to_jsonl(self) -> str:
        return "".join(json.dumps(m.to_json_obj(), sort_keys=True) + "\n"
                       for m in self.messages)

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        msgs = [TranscriptMessage.from_json_obj(json.loads(line))
                for line in text.splitlines() if line.strip()]
        return cls(msgs)

    def __iter__(self):
        return iter(self.messages)

    def __len__(self) -> int:
        return len(self.messages)

    def __getitem__(self, i):
        return self.messages[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Transcript) and self.messages == other.messages


# ---------------------------------------------------------------------------
# configuration


def _default_names(n: int) -> tuple[str, ...]:
    return tuple(f"P{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class SessionConfig:
    """Public session parameters; everything a replay needs besides the secrets.

    ``w`` carries one multiplier per secret, so the secret count m is
    ``len(w)``.  ``x`` maps participant name to its public abscissa
    (defaults to 1..n).  The private delta angles are drawn from the
    rational grid with ``delta_denominator`` refined by q, which keeps
    published sigma values on a lattice that reveals nothing about the
    weights modulo q.
    """

    modulus: PrimeModulus
    t: int
    n: int
    w: tuple[int, ...]
    seed: int = 0
    names: tuple[str, ...] = ()
    x: Mapping[str, int] | None = None
    decoy_d1: int = 2
    decoy_d2: int = 2
    abort_threshold: int = 0
    delta_denominator: int = 360
    dealer_secret: int | None = None
    high_coeffs: tuple[int, ...] | None = None

    def __post_init__(self):
        q = self.modulus.q
        if not 1 <= self.t <= self.n:
            raise ValueError(f"need 1 <= t <= n, got t={self.t}, n={self.n}")
        if not self.n < q:
            raise ValueError(f"modulus q={q} must exceed n={self.n}")
        if len(self.w) < 1:
            raise ValueError("need at least one secret multiplier w_j")
        for j, wj in enumerate(self.w, start=1):
            if not 1 <= wj <= q - 1:
                raise ValueError(f"w_{j}={wj} outside [1, {q - 1}]")
        names = self.names or _default_names(self.n)
        if len(names) != self.n or len(set(names)) != self.n:
            raise ValueError("need n distinct participant names")
        if DEALER in names:
            raise ValueError(f"{DEALER!r} is reserved")
        x = dict(self.x) if self.x is not None else \
            {name: i + 1 for i, name in enumerate(names)}
        if set(x) != set(names):
            raise ValueError("x assignments must cover exactly the participants")
        xs = list(x.values())
        for name, xi in x.items():
            if not 1 <= xi < q:
                raise ValueError(f"x for {name} must lie in [1, {q - 1}]")
        if len(set(xs)) != len(xs):
            raise ValueError(f"duplicate abscissas: {sorted(xs)}")
        if self.delta_denominator < 1:
            raise ValueError("delta denominator must be >= 1")
        if self.dealer_secret is not None:
            self.modulus.check_range(self.dealer_secret, "dealer secret")
        if self.high_coeffs is not None:
            if len(self.high_coeffs) != self.t - 1:
                raise ValueError(
                    f"need exactly t-1={self.t - 1} high coefficients")
            for c in self.high_coeffs:
                self.modulus.check_range(c, "coefficient")
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "w", tuple(int(v) for v in self.w))

    @property
    def m(self) -> int:
        return len(self.w)

    def channel_config(self) -> ChannelConfig:
        return ChannelConfig(self.decoy_d1, self.decoy_d2,
                             self.abort_threshold)


@dataclass
class ParticipantContext:
    """One party's private knowledge: share, weight, angles."""

    name: str
    role: str  # "dealer" | "user" | "reconstructor"
    share: ShareRecord | None = None
    weight: LagrangeWeight | None = None
    gammas: tuple[RationalAngle, ...] = ()
    deltas: dict[int, RationalAngle] = dc_field(default_factory=dict)


@dataclass(frozen=True)
class ReconstructionReport:
    """Outcome of one session: per-secret fidelities plus the public record."""

    fidelities: tuple[float, ...]
    r_values: tuple[int, ...]
    aborted: bool
    abort_reason: str | None
    transcript: Transcript


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    first_divergence: int | None = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# secrets


def bloch_state(theta: RationalAngle, phi: RationalAngle) -> StateVector:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, angles in turns of 2*pi."""
    half = theta.radians / 2.0
    return single_qubit(math.cos(half),
                        cmath.exp(1j * phi.radians) * math.sin(half))


def as_secret(value) -> StateVector:
    """Coerce a secret into a single-qubit StateVector.

    Accepts a StateVector, an (amp0, amp1) pair, or a Bloch pair of two
    RationalAngles (theta, phi).
    """
    if isinstance(value, StateVector):
        if value.num_qubits != 1:
            raise ValueError("secrets are single-qubit states")
        if abs(value.norm - 1.0) > 1e-9:
            raise ValueError("secret state is not normalised")
        return value.copy()
    a, b = value
    if isinstance(a, RationalAngle):
        return bloch_state(a, b)
    return single_qubit(a, b)


def sample_delta(config: SessionConfig, rng) -> RationalAngle:
    """A private decoy angle: uniform nonzero point on the session grid.

    The grid denominator is lcm(delta_denominator, q) so that sigma =
    +-delta + gamma lands on the same lattice as delta alone; a grid
    coprime to q would let anyone read the weight residue straight out
    of a published sigma's denominator.  Zero is excluded because a
    zero delta publishes gamma itself.
    """
    den = math.lcm(config.delta_denominator, config.modulus.q)
    num = int(rng.integers(1, den))
    return RationalAngle(num, den)


# ---------------------------------------------------------------------------
# individual protocol operations (session-independent forms)


@dataclass
class SplitResult:
    polynomial: DealerPolynomial
    shares: tuple[ShareRecord, ...]
    dealer_gammas: tuple[RationalAngle, ...]
    encrypted: tuple[StateVector, ...]


def split_phase(config: SessionConfig, secrets: Sequence[StateVector],
                rng) -> SplitResult:
    """Dealer side: polynomial, shares for all n users, encrypted secrets."""
    if len(secrets) != config.m:
        raise ValueError(
            f"got {len(secrets)} secrets for {config.m} multipliers")
    mod = config.modulus
    if config.dealer_secret is not None:
        high = config.high_coeffs if config.high_coeffs is not None else \
            tuple(mod.rand_element(rng) for _ in range(config.t - 1))
        poly = make_polynomial(config.dealer_secret, high, mod)
    else:
        poly = random_polynomial(mod, config.t, rng)
    shares = tuple(ShareRecord(name, config.x[name],
                               eval_share(poly, config.x[name]))
                   for name in config.names)
    dealer_gammas = tuple(rotation_angle(wj, poly.s_d, mod)
                          for wj in config.w)
    encrypted = []
    for secret, gamma in zip(secrets, dealer_gammas):
        state = secret.copy()
        state.apply_single(rx_matrix(gamma.radians), 0)
        encrypted.append(state)
    return SplitResult(poly, shares, dealer_gammas, tuple(encrypted))


@dataclass
class TeleportResult:
    state: StateVector  # R_Z(delta)|+>, held by the reconstructor
    bit: int            # the user's announced rotated-basis outcome


def teleport_delta(delta: RationalAngle, rng) -> TeleportResult:
    """Steer the private angle onto a qubit the reconstructor keeps.

    The reconstructor builds CZ|+>|+>, hands qubit 0 to the user, who
    measures it in the basis rotated by -delta and announces the bit;
    a conditional Z on the kept qubit leaves exactly R_Z(delta)|+>.
    """
    pair = build_cluster(ClusterGraph.path(2))
    outcome = pair.measure_rotated(0, delta, rng)
    kept = pair.discard_qubit(0)
    if outcome.bit:
        kept.apply_single(Z_MATRIX, 0)
    return TeleportResult(kept, outcome.bit)


@dataclass
class CorrectionResult:
    state: StateVector
    bit: int
    sigma: RationalAngle


def user_sigma(m: int, delta: RationalAngle,
               gamma: RationalAngle) -> RationalAngle:
    """The published correction angle: sigma = (-1)^(m+1) * delta + gamma."""
    if m not in (0, 1):
        raise ValueError(f"measurement bit must be 0 or 1, got {m}")
    return gamma + delta if m else gamma - delta


def correction_step(carrier: StateVector, delta_qubit: StateVector,
                    sigma_for: Callable[[int], RationalAngle | None],
                    rng) -> CorrectionResult:
    """One entangle-measure-correct step of the reconstruction chain.

    CZ the one-qubit carrier onto the teleported delta qubit, measure
    the carrier in {|+>, |->}, publish the bit, obtain sigma from the
    owning user, and apply R_X(sigma) H X^bit to the surviving qubit.
    The net effect is exactly R_X(gamma_user) on the carrier.
    """
    if carrier.num_qubits != 1 or delta_qubit.num_qubits != 1:
        raise ValueError("correction_step works on two single-qubit states")
    pair = carrier.tensor(delta_qubit)
    pair.apply_cz(0, 1)
    bit = pair.measure_plus_minus(0, rng).bit
    working = pair.discard_qubit(0)
    sigma = sigma_for(bit)
    if sigma is None:
        raise SigmaWithheld("user")
    if bit:
        working.apply_single(X_MATRIX, 0)
    working.apply_single(H_MATRIX, 0)
    working.apply_single(rx_matrix(sigma.radians), 0)
    return CorrectionResult(working, bit, sigma)


def finalize(working: StateVector, gamma_t: RationalAngle) -> StateVector:
    """The reconstructor's own rotation; closes the angle sum to whole turns."""
    working.apply_single(rx_matrix(gamma_t.radians), 0)
    return working


# ---------------------------------------------------------------------------
# the session state machine


class Session:
    """One full protocol execution with a complete classical transcript.

    ``participating`` lists the t cooperating users; its last entry is
    the reconstructor.  ``fixed_deltas`` pins specific private angles
    (used by the worked example); unpinned ones are drawn from the
    session grid.  All randomness comes from one RNG stream seeded by
    the config, so identical inputs replay identically.
    """

    def __init__(self, config: SessionConfig, secrets,
                 participating: Sequence[str] | None = None,
                 adversary: AdversaryModel | None = None,
                 rng=None,
                 fixed_deltas: Mapping[tuple[str, int], RationalAngle] | None = None,
                 sigma_override: Callable[[str, int, int], RationalAngle | None] | None = None):
        self.config = config
        self.secrets = tuple(as_secret(s) for s in secrets)
        if len(self.secrets) != config.m:
            raise ValueError(
                f"got {len(self.secrets)} secrets for m={config.m}")
        if participating is None:
            participating = config.names[:config.t]
        participating = list(participating)
        if len(participating) != config.t:
            raise ValueError(
                f"participating set must have exactly t={config.t} users")
        unknown = set(participating) - set(config.names)
        if unknown:
            raise ValueError(f"unknown participants: {sorted(unknown)}")
        self.participating = participating
        self.reconstructor = participating[-1]
        self.helpers = participating[:-1]
        self.adversary = adversary or AdversaryModel.none()
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        self.fixed_deltas = dict(fixed_deltas or {})
        self.sigma_override = sigma_override
        self.transcript = Transcript()
        self.contexts: dict[str, ParticipantContext] = {}
        self.polynomial: DealerPolynomial | None = None
        self.encrypted: tuple[StateVector, ...] = ()
        self._encrypted_pending: tuple[StateVector, ...] = ()
        self.delta_states: dict[tuple[str, int], StateVector] = {}
        self.reconstructed: list[StateVector] = []
        self.fidelities: list[float] = []
        self.r_values: list[int] = []
        self.aborted = False
        self.abort_reason: str | None = None

    # -- plumbing -----------------------------------------------------------

    def _abort(self, actor: str, reason: str, **extra):
        payload = {"reason": reason, **extra}
        self.transcript.append(PHASE_ABORT, actor, KIND_ABORT, payload)
        self.aborted = True
        self.abort_reason = reason
        raise SessionAborted(reason)

    def _checked_transfer(self, payload: list[PayloadQubit], label: str,
                          sender: str):
        cc = self.config.channel_config()
        sequence, record = transmit_with_decoys(payload, cc, self.adversary,
                                                self.rng, label)
        announced = measure_decoys(sequence, record.positions, record.bases,
                                   self.rng)
        check = verify_decoys(record, announced, cc)
        if not check.passed:
            self._abort(sender, "decoy_check_failed", transfer=label,
                        errors=check.errors,
                        positions=list(check.error_positions))
        return check

    def _delta_for(self, user: str, j: int) -> RationalAngle:
        key = (user, j)
        if key not in self.contexts[user].deltas:
            delta = self.fixed_deltas.get(key)
            if delta is None:
                delta = sample_delta(self.config, self.rng)
            self.contexts[user].deltas[j] = delta
        return self.contexts[user].deltas[j]

    def _sigma_from(self, user: str, j: int, bit: int) -> RationalAngle | None:
        if self.sigma_override is not None:
            return self.sigma_override(user, j, bit)
        ctx = self.contexts[user]
        return user_sigma(bit, ctx.deltas[j], ctx.gammas[j - 1])

    # -- phases ---------------------------------------------------------------

    def run_split(self) -> None:
        """S-stage classical work: polynomial, shares, weights, angles."""
        cfg = self.config
        split = split_phase(cfg, self.secrets, self.rng)
        self.polynomial = split.polynomial
        self.contexts[DEALER] = ParticipantContext(
            DEALER, "dealer", gammas=split.dealer_gammas)
        share_by_name = {rec.participant_id: rec for rec in split.shares}
        for name in cfg.names:
            role = "reconstructor" if name == self.reconstructor else "user"
            self.contexts[name] = ParticipantContext(
                name, role, share=share_by_name[name])
        for j, wj in enumerate(cfg.w, start=1):
            self.transcript.append(PHASE_SPLIT, DEALER, KIND_W,
                                   {"j": j, "w": wj})
        part_shares = [self.contexts[name].share for name in self.participating]
        for l, name in enumerate(self.participating):
            weight = lagrange_weight(part_shares, l, cfg.modulus)
            ctx = self.contexts[name]
            ctx.weight = weight
            ctx.gammas = tuple(rotation_angle(wj, weight.c, cfg.modulus)
                               for wj in cfg.w)
        self._encrypted_pending = split.encrypted

    def run_distribution(self) -> None:
        """S-stage quantum work: ship the encrypted qubits with decoys."""
        payload = [PayloadQubit(state, 0) for state in self._encrypted_pending]
        self._checked_transfer(payload, "split", DEALER)
        self.encrypted = self._encrypted_pending

    def run_teleports(self, j: int) -> None:
        """Establish one delta qubit per helper for secret j."""
        for user in self.helpers:
            delta = self._delta_for(user, j)
            pair = build_cluster(ClusterGraph.path(2))
            self._checked_transfer([PayloadQubit(pair, 0)],
                                   f"teleport:{user}:{j}", self.reconstructor)
            outcome = pair.measure_rotated(0, delta, self.rng)
            self.transcript.append(PHASE_TELEPORT, user, KIND_BIT, outcome.bit)
            kept = pair.discard_qubit(0)
            if outcome.bit:
                kept.apply_single(Z_MATRIX, 0)
            self.delta_states[(user, j)] = kept

    def run_corrections(self, j: int) -> StateVector:
        """The entangle-measure-correct chain for secret j."""
        carrier = self.encrypted[j - 1]
        for user in self.helpers:
            delta_qubit = self.delta_states.pop((user, j))
            pair = carrier.tensor(delta_qubit)
            pair.apply_cz(0, 1)
            bit = pair.measure_plus_minus(0, self.rng).bit
            self.transcript.append(PHASE_CORRECT, self.reconstructor,
                                   KIND_BIT, bit)
            sigma = self._sigma_from(user, j, bit)
            if sigma is None:
                self._abort(self.reconstructor, "sigma_withheld", user=user,
                            j=j)
            self.transcript.append(PHASE_CORRECT, user, KIND_SIGMA,
                                   sigma.to_payload())
            carrier = pair.discard_qubit(0)
            if bit:
                carrier.apply_single(X_MATRIX, 0)
            carrier.apply_single(H_MATRIX, 0)
            carrier.apply_single(rx_matrix(sigma.radians), 0)
        return carrier

    def run_finalize(self, j: int, carrier: StateVector) -> None:
        rec_ctx = self.contexts[self.reconstructor]
        finalize(carrier, rec_ctx.gammas[j - 1])
        gammas = [self.contexts[name].gammas[j - 1]
                  for name in self.participating]
        r = check_angle_sum(self.contexts[DEALER].gammas[j - 1], gammas)
        self.r_values.append(r)
        self.transcript.append(PHASE_FINALIZE, self.reconstructor,
                               KIND_ANGLE_SUM, {"j": j, "r": r})
        self.reconstructed.append(carrier)
        self.fidelities.append(fidelity_up_to_phase(carrier,
                                                    self.secrets[j - 1]))

    def run(self) -> ReconstructionReport:
        try:
            self.run_split()
            self.run_distribution()
            for j in range(1, self.config.m + 1):
                self.run_teleports(j)
                carrier = self.run_corrections(j)
                self.run_finalize(j, carrier)
        except SessionAborted:
            pass
        return self.report()

    def report(self) -> ReconstructionReport:
        return ReconstructionReport(tuple(self.fidelities),
                                    tuple(self.r_values), self.aborted,
                                    self.abort_reason, self.transcript)

    def private_values(self) -> "PrivateValues":
        """Omniscient view of everything the transcript must not contain."""
        shares = {name: ctx.share.share for name, ctx in self.contexts.items()
                  if ctx.share is not None}
        weights = {name: ctx.weight.c for name, ctx in self.contexts.items()
                   if ctx.weight is not None}
        deltas = {(name, j): d for name, ctx in self.contexts.items()
                  for j, d in ctx.deltas.items()}
        gammas = {(name, j + 1): g for name, ctx in self.contexts.items()
                  for j, g in enumerate(ctx.gammas)}
        return PrivateValues(shares, weights, deltas, gammas)


def run_full_session(config: SessionConfig, secrets,
                     participating: Sequence[str] | None = None,
                     rng=None,
                     adversary: AdversaryModel | None = None
                     ) -> ReconstructionReport:
    """Execute a whole session and return its report."""
    return Session(config, secrets, participating=participating,
                   adversary=adversary, rng=rng).run()


def replay_transcript(config: SessionConfig, transcript: Transcript,
                      secrets=None,
                      participating: Sequence[str] | None = None,
                      fixed_deltas=None) -> ReplayResult:
    """Re-run the session from its seed and compare messages one by one.

    The message stream does not depend on the secret states (every
    protocol measurement is an exact coin flip), so placeholder secrets
    reproduce an honest transcript; passing the original secrets makes
    the comparison immune even to measurement-tie edge cases.  Sessions
    that pinned private angles must pin the same ones here, since the
    published sigma values are functions of them.
    """
    if secrets is None:
        secrets = [single_qubit(1, 0) for _ in range(config.m)]
    fresh = Session(config, secrets, participating=participating,
                    fixed_deltas=fixed_deltas).run()
    for ours, theirs in zip(fresh.transcript, transcript):
        if ours != theirs:
            return ReplayResult(False, ours.seq)
    if len(fresh.transcript) != len(transcript):
        return ReplayResult(False,
                            min(len(fresh.transcript), len(transcript)) + 1)
    return ReplayResult(True)


# ---------------------------------------------------------------------------
# transcript inspection


@dataclass(frozen=True)
class PrivateValues:
    """The values a transcript must never reveal."""

    shares: Mapping[str, int]
    weights: Mapping[str, int]
    deltas: Mapping[tuple[str, int], RationalAngle]
    gammas: Mapping[tuple[str, int], RationalAngle]


_PAYLOAD_KEYS = {
    KIND_BIT: None,  # bare 0/1
    KIND_SIGMA: {"num", "den"},
    KIND_W: {"j", "w"},
    KIND_ANGLE_SUM: {"j", "r"},
    KIND_ABORT: None,  # free-form diagnostic dict
}


def scan_transcript(transcript: Transcript,
                    private: PrivateValues) -> list[str]:
    """Syntactic privacy scan; returns human-readable findings (empty = clean).

    Structural checks pin every payload to its public schema; value
    checks flag any published angle that coincides (mod one turn) with
    a private delta or with a weight angle gamma, since gamma decodes
    to the weight via the public w.  Degenerate choices (a zero delta,
    a zero weight) would trip these by construction, which is exactly
    why the session sampler excludes a zero delta.
    """
    findings: list[str] = []
    secret_angles = {d.mod_turn().turns: ("delta", key)
                     for key, d in private.deltas.items()}
    secret_angles.update({g.mod_turn().turns: ("gamma", key)
                          for key, g in private.gammas.items()})
    prev_seq = 0
    for msg in transcript:
        if msg.seq <= prev_seq:
            findings.append(f"seq {msg.seq}: not strictly increasing")
        prev_seq = msg.seq
        if msg.kind not in _PAYLOAD_KEYS:
            findings.append(f"seq {msg.seq}: unknown kind {msg.kind!r}")
            continue
        expected = _PAYLOAD_KEYS[msg.kind]
        if msg.kind == KIND_BIT:
            if msg.payload not in (0, 1):
                findings.append(f"seq {msg.seq}: bit payload {msg.payload!r}")
        elif expected is not None:
            if not isinstance(msg.payload, dict) or \
                    set(msg.payload) != expected:
                findings.append(
                    f"seq {msg.seq}: payload fields {msg.payload!r} != "
                    f"{sorted(expected)}")
                continue
        if msg.kind == KIND_SIGMA:
            sigma = RationalAngle.from_payload(msg.payload)
            hit = secret_angles.get(sigma.mod_turn().turns)
            if hit is not None:
                findings.append(
                    f"seq {msg.seq}: published angle equals private "
                    f"{hit[0]} of {hit[1]}")
    return findings


def transcript_structure(transcript: Transcript, t: int,
                         m: int) -> bool:
    """Check the honest-session shape: w announcements, then per secret
    (t-1) teleport bits, (t-1) bit+sigma correction pairs, one finalize."""
    kinds = [(msg.phase, msg.kind) for msg in transcript]
    expected = [(PHASE_SPLIT, KIND_W)] * m
    per_secret = ([(PHASE_TELEPORT, KIND_BIT)] * (t - 1)
                  + [(PHASE_CORRECT, KIND_BIT),
                     (PHASE_CORRECT, KIND_SIGMA)] * (t - 1)
                  + [(PHASE_FINALIZE, KIND_ANGLE_SUM)])
    expected += per_secret * m
    return kinds == expected
