"""Invariant suite behind the CLI selftest, reusable from tests.

Each check returns (ok, detail).  The suite covers the algebraic
identities the whole construction rests on (stabilizers, the
commutation rules, the cluster decomposition), the worked example with
its exact classical values, a randomized end-to-end sweep, transcript
replay, and a quick decoy-law sanity run.
"""

from __future__ import annotations

import math

import numpy as np

from .channel import ChannelConfig, estimate_detection_probability
from .fields import RationalAngle, validate_prime
from .protocol import (Session, SessionConfig, replay_transcript,
                       run_full_session)
from .statevector import (ClusterGraph, H_MATRIX, StateVector, X_MATRIX,
                          Z_MATRIX, build_cluster, fidelity_up_to_phase,
                          rx_matrix, rz_matrix, single_qubit,
                          stabilizer_check)

FIDELITY_FLOOR = 1.0 - 1e-9

_PRIMES_11_101 = [11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
                  61, 67, 71, 73, 79, 83, 89, 97, 101]


# ---------------------------------------------------------------------------
# the worked example


def demo_config(seed: int = 0) -> SessionConfig:
    """The (3, 4) session over GF(7) from the protocol's worked example."""
    return SessionConfig(
        modulus=validate_prime(7), t=3, n=4, w=(1, 2), seed=seed,
        names=("Alice", "Bob", "Charlie", "Felix"),
        x={"Alice": 1, "Bob": 3, "Charlie": 5, "Felix": 6},
        dealer_secret=4, high_coeffs=(2, 1),
        decoy_d1=2, decoy_d2=2)


def demo_secrets() -> list[StateVector]:
    return [single_qubit(0.5, math.sqrt(3) / 2), single_qubit(1, 0)]


DEMO_DELTAS = {
    ("Alice", 1): RationalAngle(1, 7),   # 2*pi/7
    ("Alice", 2): RationalAngle(1, 14),  # pi/7
    ("Bob", 1): RationalAngle(2, 7),     # 4*pi/7
    ("Bob", 2): RationalAngle(3, 14),    # 3*pi/7
}

DEMO_PARTICIPATING = ("Alice", "Bob", "Charlie")


def demo_session(seed: int = 0) -> Session:
    return Session(demo_config(seed), demo_secrets(),
                   participating=DEMO_PARTICIPATING,
                   fixed_deltas=DEMO_DELTAS)


DEMO_EXPECTED_SHARES = {"Alice": 6, "Bob": 4, "Charlie": 3, "Felix": 2}
DEMO_EXPECTED_WEIGHTS = {"Alice": 6, "Bob": 2, "Charlie": 2}
DEMO_EXPECTED_GAMMAS = {
    ("Dealer", 1): RationalAngle(4, 7), ("Dealer", 2): RationalAngle(8, 7),
    ("Alice", 1): RationalAngle(6, 7), ("Alice", 2): RationalAngle(12, 7),
    ("Bob", 1): RationalAngle(2, 7), ("Bob", 2): RationalAngle(4, 7),
    ("Charlie", 1): RationalAngle(2, 7), ("Charlie", 2): RationalAngle(4, 7),
}


# ---------------------------------------------------------------------------
# randomized sessions


def random_session_setup(rng):
    """One random (config, secrets, participating) triple at desk scale."""
    q = int(rng.choice(_PRIMES_11_101))
    t = int(rng.integers(1, 6))
    n = int(rng.integers(t, 9))
    m = int(rng.integers(1, 5))
    w = tuple(int(rng.integers(1, q)) for _ in range(m))
    config = SessionConfig(
        modulus=validate_prime(q), t=t, n=n, w=w,
        seed=int(rng.integers(0, 2 ** 31)),
        decoy_d1=2, decoy_d2=2)
    secrets = [random_secret(rng) for _ in range(m)]
    names = list(config.names)
    picks = rng.choice(n, size=t, replace=False)
    participating = [names[int(i)] for i in picks]
    return config, secrets, participating


def random_secret(rng) -> StateVector:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v = v / np.linalg.norm(v)
    return StateVector(1, v)


def random_angle(rng, max_den: int = 101) -> RationalAngle:
    den = int(rng.integers(1, max_den))
    num = int(rng.integers(-2 * den, 2 * den + 1))
    return RationalAngle(num, den)


# ---------------------------------------------------------------------------
# checks


def check_stabilizers() -> tuple[bool, str]:
    for size in (2, 3):
        graph = ClusterGraph.path(size)
        state = build_cluster(graph)
        for a in range(size):
            if not stabilizer_check(state, graph, a):
                return False, f"stabilizer failed at vertex {a} of path {size}"
    return True, "paths of size 2 and 3, every vertex"


def check_commutation(seed: int = 0, count: int = 32) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        phi = random_angle(rng).radians
        pairs = [
            (Z_MATRIX @ H_MATRIX, H_MATRIX @ X_MATRIX),
            (X_MATRIX @ H_MATRIX, H_MATRIX @ Z_MATRIX),
            (rz_matrix(phi) @ H_MATRIX, H_MATRIX @ rx_matrix(phi)),
            (rz_matrix(phi) @ X_MATRIX, X_MATRIX @ rz_matrix(-phi)),
        ]
        for lhs, rhs in pairs:
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst < 1e-12, f"max entry error {worst:.2e} over {count} angles"


def rotated_basis_vector(bit: int, omega: RationalAngle) -> np.ndarray:
    """R_X(-omega)|bit> built straight from the definition."""
    col = np.zeros(2, dtype=complex)
    col[bit] = 1.0
    return rx_matrix(-omega.radians) @ col


def plus_minus_vector(sign: int, omega: RationalAngle) -> np.ndarray:
    """R_Z(omega)|+-> built straight from the definition (sign 0 -> +)."""
    base = np.array([1, 1 if sign == 0 else -1], dtype=complex) / math.sqrt(2)
    return rz_matrix(omega.radians) @ base


def check_cluster_decomposition(seed: int = 0,
                                count: int = 8) -> tuple[bool, str]:
    """CZ|+>|+> equals the rotated-basis steering decomposition exactly."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        omega = random_angle(rng)
        cluster = build_cluster(ClusterGraph.path(2)).amps
        rhs = np.zeros(4, dtype=complex)
        for bit in (0, 1):
            first = rotated_basis_vector(bit, omega)
            second = plus_minus_vector(bit, omega)
            rhs += np.kron(second, first) / math.sqrt(2)  # qubit 0 is first
        worst = max(worst, float(np.max(np.abs(cluster - rhs))))
    return worst < 1e-12, f"max amplitude error {worst:.2e} over {count} angles"


def check_rotated_plus_identity() -> tuple[bool, str]:
    """R_Z(w)|+-> matches its explicit phase form entrywise."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(8):
        omega = random_angle(rng).radians
        for sign in (1, -1):
            got = rz_matrix(omega) @ (np.array([1, sign], dtype=complex)
                                      / math.sqrt(2))
            want = np.array([np.exp(-0.5j * omega),
                             sign * np.exp(0.5j * omega)]) / math.sqrt(2)
            worst = max(worst, float(np.max(np.abs(got - want))))
    return worst < 1e-12, f"max entry error {worst:.2e}"


def check_demo_session(seed: int = 0) -> tuple[bool, str]:
    session = demo_session(seed)
    report = session.run()
    if report.aborted:
        return False, f"aborted: {report.abort_reason}"
    for name, want in DEMO_EXPECTED_SHARES.items():
        if session.contexts[name].share.share != want:
            return False, f"share of {name} != {want}"
    for name, want in DEMO_EXPECTED_WEIGHTS.items():
        if session.contexts[name].weight.c != want:
            return False, f"weight of {name} != {want}"
    for (name, j), want in DEMO_EXPECTED_GAMMAS.items():
        if session.contexts[name].gammas[j - 1] != want:
            return False, f"gamma of {name} secret {j} != {want.pi_string()}"
    if report.r_values != (2, 4):
        return False, f"whole-turn counts {report.r_values} != (2, 4)"
    low = min(report.fidelities)
    return low >= FIDELITY_FLOOR, f"min fidelity {low:.12f}"


def check_random_sessions(seed: int = 0, count: int = 50) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    low = 1.0
    for _ in range(count):
        config, secrets, participating = random_session_setup(rng)
        report = run_full_session(config, secrets, participating)
        if report.aborted:
            return False, f"unexpected abort: {report.abort_reason}"
        low = min(low, min(report.fidelities))
    return low >= FIDELITY_FLOOR, f"min fidelity {low:.12f} over {count} runs"


def check_replay(seed: int = 0) -> tuple[bool, str]:
    session = demo_session(seed)
    report = session.run()
    result = replay_transcript(demo_config(seed), report.transcript,
                               secrets=demo_secrets(),
                               participating=DEMO_PARTICIPATING,
                               fixed_deltas=DEMO_DELTAS)
    return bool(result), "bit-for-bit" if result else \
        f"diverged at seq {result.first_divergence}"


def check_decoy_law(seed: int = 0, trials: int = 3000) -> tuple[bool, str]:
    config = ChannelConfig(d1=2, d2=2)
    rng = np.random.default_rng(seed)
    observed = estimate_detection_probability(config, trials, rng)
    expected = 0.75 ** 4
    sigma = math.sqrt(expected * (1 - expected) / trials)
    z = (observed - expected) / sigma
    return abs(z) < 4.0, f"pass rate {observed:.4f} vs {expected:.4f} (z={z:+.2f})"


SELFTEST_CHECKS = [
    ("cluster stabilizers", check_stabilizers),
    ("commutation identities", check_commutation),
    ("cluster decomposition", check_cluster_decomposition),
    ("rotated plus identity", check_rotated_plus_identity),
    ("worked example", check_demo_session),
    ("random sessions", check_random_sessions),
    ("transcript replay", check_replay),
    ("decoy detection law", check_decoy_law),
]


def run_selftest() -> list[tuple[str, bool, str]]:
    results = []
    for name, fn in SELFTEST_CHECKS:
        ok, detail = fn()
        results.append((name, ok, detail))
    return results
