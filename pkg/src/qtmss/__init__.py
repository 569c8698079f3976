"""Threshold quantum multi-secret sharing over two-particle cluster states.

A numerically exact simulation of a (t, n) threshold scheme in which
one set of classical shares protects many single-qubit secrets: share
arithmetic over GF(q), an exact rational angle algebra, a small dense
statevector engine, the full session state machine with its classical
transcript, decoy-based channel tamper detection with adversary
models, and the five-qubit demonstration circuits.
"""

from .channel import (AdversaryModel, ChannelConfig, DecoyCheck, DecoyRecord,
                      PayloadQubit, estimate_detection_probability,
                      expected_pass_rate, transmit_with_decoys, verify_decoys)
from .fields import (AngleSumError, DealerPolynomial, LagrangeWeight,
                     NotPrimeError, PrimeModulus, RationalAngle, ShareRecord,
                     check_angle_sum, eval_share, lagrange_weight,
                     make_polynomial, random_polynomial, rotation_angle,
                     validate_prime, verify_zero_sum)
from .protocol import (ReconstructionReport, ReplayResult, Session,
                       SessionConfig, Transcript, TranscriptMessage,
                       as_secret, bloch_state, correction_step, finalize,
                       replay_transcript, run_full_session, sample_delta,
                       scan_transcript, split_phase, teleport_delta,
                       transcript_structure, user_sigma)
from .statevector import (ClusterGraph, GateSpec, MeasurementOutcome,
                          StateVector, build_cluster, fidelity_up_to_phase,
                          new_state, plus_state, rotated_plus, single_qubit,
                          stabilizer_check)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
