"""Five-qubit demonstration circuits, a QASM-2.0 text subset, and a simulator.

The two fixed circuits re-enact one reconstruction end to end on a
single register: secret preparation and encryption on q[0], two
teleport gadgets on (q[1], q[3]) and (q[2], q[4]), the two conditioned
correction blocks, and the closing rotation, with every measurement
stored in its own single-bit classical register c0..c4.  The final
qubit q[4] carries the recovered secret.

The text form is a small OpenQASM 2.0 subset — h, x, z, rx, ry, rz,
cz, measure, and `if(cN==v)` conditioned gates — with angles written
as exact multiples of pi (e.g. `rx(10*pi/7)`), so emitting and
re-parsing a circuit loses nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fields import RationalAngle
from .statevector import GateSpec, StateVector, new_state

_GATES_1Q = {"h", "x", "z", "ry", "rx", "rz"}
_GATES_ROT = {"rx", "ry", "rz"}


@dataclass(frozen=True)
class CircuitOp:
    """One instruction: a gate, or a measurement into a classical register."""

    name: str  # gate name, or "measure"
    qubits: tuple[int, ...]
    angle: RationalAngle | None = None
    condition: tuple[str, int] | None = None  # (creg, required value)
    creg: str | None = None  # measure target

    def __post_init__(self):
        if self.name == "measure":
            if self.creg is None or len(self.qubits) != 1:
                raise ValueError("measure needs one qubit and a creg")
            if self.condition is not None:
                raise ValueError("conditioned measurement is not supported")
        elif self.name == "cz":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError("cz needs two distinct qubits")
        elif self.name in _GATES_1Q:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.name} is a single-qubit gate")
            if (self.name in _GATES_ROT) != (self.angle is not None):
                raise ValueError(f"angle mismatch for {self.name}")
        else:
            raise ValueError(f"unsupported op {self.name!r}")


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    cregs: tuple[str, ...]
    ops: tuple[CircuitOp, ...]

    def final_creg(self) -> str:
        for op in reversed(self.ops):
            if op.name == "measure":
                return op.creg
        raise ValueError("circuit has no measurement")


# ---------------------------------------------------------------------------
# the fixed demonstration circuits


def _rot(num: int, den: int) -> RationalAngle:
    return RationalAngle(num, den)


def worked_example_circuit(which: int) -> Circuit:
    """Circuit 1 recovers the superposed secret, circuit 2 recovers |0>."""
    if which not in (1, 2):
        raise ValueError("circuit selector must be 1 or 2")
    ops: list[CircuitOp] = []

    def gate(name, qubit, angle=None, cond=None):
        ops.append(CircuitOp(name, (qubit,), angle, cond))

    if which == 1:
        prep = _rot(1, 3)            # RY by a third of a turn -> (1/2, sqrt3/2)
        encrypt = _rot(4, 7)         # dealer rotation, first secret
        delta_a, delta_b = _rot(1, 7), _rot(2, 7)
        sigma_a = (_rot(5, 7), _rot(1, 1))   # reply to bit 0 / bit 1
        sigma_b = (_rot(0, 1), _rot(4, 7))
        closing = _rot(2, 7)
    else:
        prep = None                  # secret is |0>
        encrypt = _rot(8, 7)
        delta_a, delta_b = _rot(1, 14), _rot(3, 14)
        sigma_a = (_rot(23, 14), _rot(25, 14))
        sigma_b = (_rot(5, 14), _rot(11, 14))
        closing = _rot(4, 7)

    if prep is not None:
        gate("ry", 0, prep)
    gate("rx", 0, encrypt)
    for q in (1, 2, 3, 4):
        gate("h", q)
    ops.append(CircuitOp("cz", (1, 3)))
    ops.append(CircuitOp("cz", (2, 4)))
    # teleport gadgets: rotated-basis measurement, then conditioned Z
    gate("rx", 1, delta_a)
    ops.append(CircuitOp("measure", (1,), creg="c0"))
    gate("rx", 2, delta_b)
    ops.append(CircuitOp("measure", (2,), creg="c1"))
    gate("z", 3, cond=("c0", 1))
    gate("z", 4, cond=("c1", 1))
    # first correction block
    ops.append(CircuitOp("cz", (0, 3)))
    gate("h", 0)
    ops.append(CircuitOp("measure", (0,), creg="c2"))
    gate("x", 3, cond=("c2", 1))
    gate("h", 3)
    gate("rx", 3, sigma_a[0], cond=("c2", 0))
    gate("rx", 3, sigma_a[1], cond=("c2", 1))
    # second correction block
    ops.append(CircuitOp("cz", (3, 4)))
    gate("h", 3)
    ops.append(CircuitOp("measure", (3,), creg="c3"))
    gate("x", 4, cond=("c3", 1))
    gate("h", 4)
    gate("rx", 4, sigma_b[0], cond=("c3", 0))
    gate("rx", 4, sigma_b[1], cond=("c3", 1))
    # the reconstructor's own rotation, then readout
    gate("rx", 4, closing)
    ops.append(CircuitOp("measure", (4,), creg="c4"))
    return Circuit(5, ("c0", "c1", "c2", "c3", "c4"), tuple(ops))


# ---------------------------------------------------------------------------
# text form


def _angle_text(angle: RationalAngle) -> str:
    halfturns = Fraction(2 * angle.num, angle.den)
    k, d = halfturns.numerator, halfturns.denominator
    if k == 0:
        return "0"
    sign = "-" if k < 0 else ""
    k = abs(k)
    head = "pi" if k == 1 else f"{k}*pi"
    return f"{sign}{head}" + ("" if d == 1 else f"/{d}")


_ANGLE_RE = re.compile(r"^(-)?(?:(\d+)\*)?pi(?:/(\d+))?$")


def _parse_angle(text: str) -> RationalAngle:
    text = text.strip().replace(" ", "")
    if text == "0":
        return RationalAngle(0, 1)
    m = _ANGLE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse angle {text!r}")
    sign = -1 if m.group(1) else 1
    k = int(m.group(2)) if m.group(2) else 1
    d = int(m.group(3)) if m.group(3) else 1
    return RationalAngle(sign * k, 2 * d)  # k*pi/d is k/(2d) turns


def emit_qasm(circuit: Circuit) -> str:
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";',
             f'qreg q[{circuit.num_qubits}];']
    lines += [f'creg {name}[1];' for name in circuit.cregs]
    for op in circuit.ops:
        if op.name == "measure":
            stmt = f'measure q[{op.qubits[0]}] -> {op.creg}[0];'
        else:
            args = f'({_angle_text(op.angle)})' if op.angle is not None else ''
            targets = ",".join(f'q[{q}]' for q in op.qubits)
            stmt = f'{op.name}{args} {targets};'
        if op.condition is not None:
            stmt = f'if({op.condition[0]}=={op.condition[1]}) ' + stmt
        lines.append(stmt)
    return "\n".join(lines) + "\n"


_STMT_RES = {
    "qreg": re.compile(r"^qreg\s+q\[(\d+)\]$"),
    "creg": re.compile(r"^creg\s+(\w+)\[1\]$"),
    "measure": re.compile(r"^measure\s+q\[(\d+)\]\s*->\s*(\w+)\[0\]$"),
    "gate": re.compile(r"^(\w+)(?:\(([^)]*)\))?\s+(q\[\d+\](?:\s*,\s*q\[\d+\])*)$"),
    "cond": re.compile(r"^if\((\w+)==([01])\)\s*(.*)$"),
}


def parse_qasm(text: str) -> Circuit:
    """Parse the emitted subset back into a Circuit (exact round trip)."""
    num_qubits = None
    cregs: list[str] = []
    ops: list[CircuitOp] = []
    for raw in text.splitlines():
        stmt = raw.split("//")[0].strip()
        if not stmt:
            continue
        if not stmt.endswith(";"):
            raise ValueError(f"missing ';' in {raw!r}")
        stmt = stmt[:-1].strip()
        if stmt.startswith("OPENQASM") or stmt.startswith("include"):
            continue
        m = _STMT_RES["qreg"].match(stmt)
        if m:
            num_qubits = int(m.group(1))
            continue
        m = _STMT_RES["creg"].match(stmt)
        if m:
            cregs.append(m.group(1))
            continue
        condition = None
        m = _STMT_RES["cond"].match(stmt)
        if m:
            condition = (m.group(1), int(m.group(2)))
            stmt = m.group(3).strip()
        m = _STMT_RES["measure"].match(stmt)
        if m:
            if condition is not None:
                raise ValueError("conditioned measurement is not supported")
            ops.append(CircuitOp("measure", (int(m.group(1)),),
                                 creg=m.group(2)))
            continue
        m = _STMT_RES["gate"].match(stmt)
        if not m:
            raise ValueError(f"cannot parse statement {stmt!r}")
        name, angle_text, targets = m.group(1), m.group(2), m.group(3)
        qubits = tuple(int(t) for t in re.findall(r"q\[(\d+)\]", targets))
        angle = _parse_angle(angle_text) if angle_text is not None else None
        ops.append(CircuitOp(name, qubits, angle, condition))
    if num_qubits is None:
        raise ValueError("missing qreg declaration")
    return Circuit(num_qubits, tuple(cregs), tuple(ops))


# ---------------------------------------------------------------------------
# simulation


def _run_ops(circuit: Circuit, rng=None, forced=None):
    """Execute the op list; measurement outcomes come from rng or `forced`.

    Returns (classical bits dict, final StateVector).  `forced` is a
    mapping creg -> bit for deterministic branch selection; forcing a
    zero-probability branch raises.
    """
    state = new_state(circuit.num_qubits)
    classical = {name: 0 for name in circuit.cregs}
    for op in circuit.ops:
        if op.condition is not None and \
                classical[op.condition[0]] != op.condition[1]:
            continue
        if op.name == "measure":
            qubit = op.qubits[0]
            if forced is not None and op.creg in forced:
                bit = forced[op.creg]
                p1 = state.probability_of_one(qubit)
                p_bit = p1 if bit else 1.0 - p1
                if p_bit < 1e-12:
                    raise ValueError(
                        f"branch {op.creg}={bit} has zero probability")
                state._collapse(qubit, bit, p_bit)
            else:
                bit = state.measure_computational(qubit, rng).bit
            classical[op.creg] = bit
        elif op.name == "cz":
            state.apply_cz(*op.qubits)
        else:
            state.apply_single(GateSpec(op.name, op.angle), op.qubits[0])
    return classical, state


def simulate_shots(circuit: Circuit, shots: int, seed: int = 0) -> dict[str, int]:
    """Sampled histogram of the final measurement's register."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    final = circuit.final_creg()
    counts: dict[str, int] = {}
    for _ in range(shots):
        classical, _ = _run_ops(circuit, rng)
        key = str(classical[final])
        counts[key] = counts.get(key, 0) + 1
    return counts


@dataclass(frozen=True)
class Branch:
    """One mid-measurement branch: forced bits, its probability, and the
    state of the final qubit just before the closing measurement."""

    bits: tuple[tuple[str, int], ...]
    probability: float
    final_qubit_state: StateVector


def enumerate_branches(circuit: Circuit) -> list[Branch]:
    """Walk every nonzero mid-measurement branch up to the final measure."""
    final = circuit.final_creg()
    mid_cregs = [op.creg for op in circuit.ops
                 if op.name == "measure" and op.creg != final]
    final_qubit = next(op.qubits[0] for op in reversed(circuit.ops)
                       if op.name == "measure")
    branches: list[Branch] = []
    for code in range(2 ** len(mid_cregs)):
        forced = {creg: (code >> i) & 1 for i, creg in enumerate(mid_cregs)}
        probability = 1.0
        state = new_state(circuit.num_qubits)
        classical = {name: 0 for name in circuit.cregs}
        dead = False
        for op in circuit.ops:
            if op.condition is not None and \
                    classical[op.condition[0]] != op.condition[1]:
                continue
            if op.name == "measure":
                if op.creg == final:
                    break
                qubit = op.qubits[0]
                bit = forced[op.creg]
                p1 = state.probability_of_one(qubit)
                p_bit = p1 if bit else 1.0 - p1
                if p_bit < 1e-12:
                    dead = True
                    break
                state._collapse(qubit, bit, p_bit)
                probability *= p_bit
                classical[op.creg] = bit
            elif op.name == "cz":
                state.apply_cz(*op.qubits)
            else:
                state.apply_single(GateSpec(op.name, op.angle), op.qubits[0])
        if dead:
            continue
        # Peel off the already-measured qubits in decreasing index order;
        # removing a higher qubit never shifts a lower index, so the
        # original indices stay valid throughout.
        reduced = state
        for q in sorted(range(circuit.num_qubits), reverse=True):
            if q != final_qubit:
                reduced = reduced.discard_qubit(q)
        branches.append(Branch(tuple(sorted(forced.items())), probability,
                               reduced))
    return branches


def exact_final_distribution(circuit: Circuit) -> dict[str, float]:
    """Branch-enumerated exact outcome distribution of the final qubit."""
    probs = {"0": 0.0, "1": 0.0}
    for branch in enumerate_branches(circuit):
        amps = branch.final_qubit_state.amps
        probs["0"] += branch.probability * abs(amps[0]) ** 2
        probs["1"] += branch.probability * abs(amps[1]) ** 2
    return probs


def histogram_text(counts: dict[str, int]) -> str:
    return "".join(f"{key} {counts[key]}\n" for key in sorted(counts))
