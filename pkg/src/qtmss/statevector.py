"""Dense complex statevector engine with exactly the gates and bases the protocol uses.

Conventions, fixed once and documented here:

* Qubit 0 is the least significant bit of the amplitude index
  (little-endian).  ``amps[i]`` is the amplitude of the basis state
  whose qubit-k value is ``(i >> k) & 1``.
* Measurement tie-breaking is deterministic given the injected RNG:
  outcome 1 is chosen iff a uniform draw u satisfies u < P(1), with
  P(1) computed in double precision.
* Global phase is never normalised away; every equality oracle goes
  through :func:`fidelity_up_to_phase`.
* The rotated measurement basis {R_X(-w)|0>, R_X(-w)|1>} is realised
  as "apply R_X(w), then measure computationally"; the measured qubit
  is left in the computational state of the observed bit, which keeps
  it in a product with the rest so it can be discarded.

States are mutated in place (one logical owner at a time); distinct
states are independent.  Dense amplitudes are plenty: the protocol
never holds more than a few live qubits, and the experiment circuits
use five.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import RationalAngle

MAX_QUBITS = 12
_NORM_TOL = 1e-12
_SQRT_HALF = 1.0 / math.sqrt(2.0)

H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)
I_MATRIX = np.eye(2, dtype=complex)


def rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]],
                    dtype=complex)


_FIXED_GATES = {"h": H_MATRIX, "x": X_MATRIX, "z": Z_MATRIX, "i": I_MATRIX}
_ROTATION_GATES = {"rx": rx_matrix, "ry": ry_matrix, "rz": rz_matrix}
GATE_KINDS = frozenset(_FIXED_GATES) | frozenset(_ROTATION_GATES) | {"cz"}


@dataclass(frozen=True)
class GateSpec:
    """A gate by name plus, for rotations, its exact angle."""

    kind: str
    angle: RationalAngle | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in _ROTATION_GATES and self.angle is None:
            raise ValueError(f"gate {self.kind!r} needs an angle")

    def matrix(self) -> np.ndarray:
        if self.kind == "cz":
            raise ValueError("cz is a two-qubit gate; use apply_cz")
        if self.kind in _FIXED_GATES:
            return _FIXED_GATES[self.kind]
        return _ROTATION_GATES[self.kind](self.angle.radians)


@dataclass(frozen=True)
class ClusterGraph:
    """Simple graph G(V, E): vertices are qubit indices, edges are CZ links."""

    vertices: frozenset[int]
    edges: frozenset[frozenset[int]]

    @classmethod
    def from_edges(cls, vertices, edges) -> "ClusterGraph":
        vset = frozenset(int(v) for v in vertices)
        eset = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if a not in vset or b not in vset:
                raise ValueError(f"edge ({a},{b}) leaves the vertex set")
            eset.add(frozenset((int(a), int(b))))
        return cls(vset, frozenset(eset))

    @classmethod
    def path(cls, n: int) -> "ClusterGraph":
        return cls.from_edges(range(n), [(i, i + 1) for i in range(n - 1)])

    def neighbors(self, a: int) -> set[int]:
        return {next(iter(e - {a})) for e in self.edges if a in e}


@dataclass(frozen=True)
class MeasurementOutcome:
    """One measurement record: the bit, the basis it was read in, the qubit."""

    bit: int
    basis: str  # "computational" | "plus_minus" | "rotated"
    qubit: int
    omega: RationalAngle | None = field(default=None)


class StateVector:
    """Normalised complex amplitudes over n qubits, little-endian indexing."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps: np.ndarray | None = None):
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"qubit count {num_qubits} outside [1, {MAX_QUBITS}]")
        self.num_qubits = num_qubits
        if amps is None:
            amps = np.zeros(2 ** num_qubits, dtype=complex)
            amps[0] = 1.0
        else:
            amps = np.asarray(amps, dtype=complex)
            if amps.shape != (2 ** num_qubits,):
                raise ValueError(
                    f"need {2 ** num_qubits} amplitudes, got {amps.shape}")
        self.amps = amps

    # -- bookkeeping ----------------------------------------------------

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def _check_qubit(self, qubit: int) -> None:
        if not 0 <= qubit < self.num_qubits:
            raise ValueError(
                f"qubit {qubit} outside 0..{self.num_qubits - 1}")

    def tensor(self, other: "StateVector") -> "StateVector":
        """Joint state with self's qubits at the low indices, other's above."""
        return StateVector(self.num_qubits + other.num_qubits,
                           np.kron(other.amps, self.amps))

    # -- gates ----------------------------------------------------------

    def apply_single(self, gate, qubit: int) -> "StateVector":
        """Apply a 2x2 gate (GateSpec or raw matrix) to one qubit, in place."""
        self._check_qubit(qubit)
        if isinstance(gate, GateSpec):
            matrix = gate.matrix()
        else:
            matrix = np.asarray(gate, dtype=complex)
            if matrix.shape != (2, 2):
                raise ValueError("apply_single needs a 2x2 matrix")
        n = self.num_qubits
        axis = n - 1 - qubit  # C-order: first axis is the highest qubit
        psi = np.moveaxis(self.amps.reshape([2] * n), axis, 0)
        out = (matrix @ psi.reshape(2, -1)).reshape(psi.shape)
        self.amps = np.moveaxis(out, 0, axis).reshape(-1)
        return self

    def apply_cz(self, q1: int, q2: int) -> "StateVector":
        """Negate amplitudes where both qubits are 1 (symmetric in q1, q2)."""
        self._check_qubit(q1)
        self._check_qubit(q2)
        if q1 == q2:
            raise ValueError("cz needs two distinct qubits")
        idx = np.arange(self.amps.size)
        mask = ((idx >> q1) & 1).astype(bool) & ((idx >> q2) & 1).astype(bool)
        self.amps[mask] *= -1
        return self

    # -- measurement ----------------------------------------------------

    def probability_of_one(self, qubit: int) -> float:
        self._check_qubit(qubit)
        idx = np.arange(self.amps.size)
        mask = ((idx >> qubit) & 1).astype(bool)
        return float(np.sum(np.abs(self.amps[mask]) ** 2))

    def _collapse(self, qubit: int, bit: int, p_bit: float) -> None:
        idx = np.arange(self.amps.size)
        off = ((idx >> qubit) & 1) != bit
        self.amps[off] = 0.0
        self.amps /= math.sqrt(p_bit)

    def measure_computational(self, qubit: int, rng) -> MeasurementOutcome:
        """Born-rule sample in {|0>, |1>}; collapses and renormalises."""
        p1 = self.probability_of_one(qubit)
        bit = 1 if rng.random() < p1 else 0
        self._collapse(qubit, bit, p1 if bit else 1.0 - p1)
        return MeasurementOutcome(bit, "computational", qubit)

    def measure_plus_minus(self, qubit: int, rng) -> MeasurementOutcome:
        """Measure in {|+>, |->}: bit 0 means |+>, bit 1 means |->."""
        self.apply_single(H_MATRIX, qubit)
        inner = self.measure_computational(qubit, rng)
        return MeasurementOutcome(inner.bit, "plus_minus", qubit)

    def measure_rotated(self, qubit: int, omega: RationalAngle,
                        rng) -> MeasurementOutcome:
        """Measure in the X-rotated basis {R_X(-w)|0>, R_X(-w)|1>}.

        Outcome k projects the rest of the register exactly as the
        rotated-basis projector would; the measured qubit itself is
        left in |k> (the pre-rotation is not undone).
        """
        self.apply_single(rx_matrix(omega.radians), qubit)
        inner = self.measure_computational(qubit, rng)
        return MeasurementOutcome(inner.bit, "rotated", qubit, omega)

    def discard_qubit(self, qubit: int) -> "StateVector":
        """Drop a qubit that sits in a computational product with the rest.

        Returns a fresh reduced state; rejects qubits still entangled
        (off-branch amplitude norm above 1e-10).
        """
        self._check_qubit(qubit)
        if self.num_qubits == 1:
            raise ValueError("cannot discard the last qubit")
        idx = np.arange(self.amps.size)
        bits = (idx >> qubit) & 1
        mass0 = float(np.sum(np.abs(self.amps[bits == 0]) ** 2))
        mass1 = float(np.sum(np.abs(self.amps[bits == 1]) ** 2))
        value = 1 if mass1 > mass0 else 0
        off_norm = math.sqrt(mass0 if value else mass1)
        if off_norm > 1e-10:
            raise ValueError(
                f"qubit {qubit} is not in a computational product state "
                f"(off-branch norm {off_norm:.3e})")
        kept = np.arange(self.amps.size // 2)
        low = kept & ((1 << qubit) - 1)
        high = kept >> qubit
        old = low | (value << qubit) | (high << (qubit + 1))
        reduced = self.amps[old]
        reduced = reduced / np.linalg.norm(reduced)
        return StateVector(self.num_qubits - 1, reduced)

    # -- persistence ------------------------------------------------------

    def dump(self) -> str:
        """Golden-test text format: one `index re im` line per amplitude."""
        lines = [f"{i} {a.real:.15g} {a.imag:.15g}"
                 for i, a in enumerate(self.amps)]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "StateVector":
        amps = []
        for line in text.strip().splitlines():
            _, re_s, im_s = line.split()
            amps.append(complex(float(re_s), float(im_s)))
        n = int(math.log2(len(amps)))
        if 2 ** n != len(amps):
            raise ValueError("amplitude count is not a power of two")
        return cls(n, np.array(amps))

    def __repr__(self) -> str:
        return f"StateVector(n={self.num_qubits}, norm={self.norm:.12f})"


def new_state(num_qubits: int) -> StateVector:
    """|0...0> on the given number of qubits."""
    return StateVector(num_qubits)


def single_qubit(amp0: complex, amp1: complex) -> StateVector:
    """One-qubit state from two amplitudes; must already be normalised."""
    v = np.array([amp0, amp1], dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("single-qubit amplitudes are not normalised")
    return StateVector(1, v)


def plus_state() -> StateVector:
    return single_qubit(_SQRT_HALF, _SQRT_HALF)


def rotated_plus(delta: RationalAngle) -> StateVector:
    """R_Z(delta)|+>, the steered partner state of the two-qubit cluster."""
    return plus_state().apply_single(rz_matrix(delta.radians), 0)


def build_cluster(graph: ClusterGraph) -> StateVector:
    """H on every vertex of |0...0>, then one CZ per edge."""
    n = len(graph.vertices)
    if graph.vertices != frozenset(range(n)):
        raise ValueError("cluster vertices must be exactly 0..n-1")
    state = new_state(n)
    for v in range(n):
        state.apply_single(H_MATRIX, v)
    for e in sorted(graph.edges, key=sorted):
        a, b = sorted(e)
        state.apply_cz(a, b)
    return state


def stabilizer_check(state: StateVector, graph: ClusterGraph,
                     a: int) -> bool:
    """True iff X_a (x) Z_neighbors fixes the state to within 1e-12."""
    if a not in graph.vertices:
        raise ValueError(f"vertex {a} not in the graph")
    probe = state.copy()
    probe.apply_single(X_MATRIX, a)
    for b in graph.neighbors(a):
        probe.apply_single(Z_MATRIX, b)
    return float(np.linalg.norm(probe.amps - state.amps)) < _NORM_TOL


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """|<a|b>| — global-phase-blind overlap."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    return float(abs(np.vdot(a.amps, b.amps)))
