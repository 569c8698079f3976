"""Command-line front end: worked example, config-driven runs, attack
campaigns, and the five-qubit demonstration circuits.

Every command takes its randomness from --seed (default 0); error paths
exit nonzero with a single-line `error: ...` reason on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import attacks, circuits, selfcheck
from .channel import ChannelConfig, estimate_detection_probability, \
    expected_pass_rate
from .fields import NotPrimeError, RationalAngle, validate_prime
from .protocol import (DEALER, KIND_ANGLE_SUM, KIND_BIT, KIND_SIGMA, KIND_W,
                       Session, SessionConfig, bloch_state)
from .selfcheck import demo_session

FIDELITY_FLOOR = 1.0 - 1e-9


class ConfigError(ValueError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"field {field!r}: {reason}")
        self.field = field


# ---------------------------------------------------------------------------
# demo


def _format_fid(f: float) -> str:
    return f"{f:.9f}"


def cmd_demo(args) -> int:
    session = demo_session(args.seed)
    start = time.monotonic()
    report = session.run()
    elapsed = time.monotonic() - start
    cfg = session.config
    print(f"(t={cfg.t}, n={cfg.n}) session over GF({cfg.modulus.q}), "
          f"seed {cfg.seed}")
    print(f"polynomial: s_D={session.polynomial.s_d}, "
          f"coefficients {list(session.polynomial.coeffs)}")
    print("shares:")
    for name in cfg.names:
        print(f"  {name}: x={cfg.x[name]}, "
              f"f(x)={session.contexts[name].share.share}")
    print(f"participating: {', '.join(session.participating)} "
          f"(reconstructor {session.reconstructor})")
    print("weights:")
    for name in session.participating:
        print(f"  c_{name} = {session.contexts[name].weight.c}")
    print("rotation angles:")
    for j in range(1, cfg.m + 1):
        parts = [f"{DEALER}: {session.contexts[DEALER].gammas[j-1].pi_string()}"]
        parts += [f"{name}: {session.contexts[name].gammas[j-1].pi_string()}"
                  for name in session.participating]
        print(f"  secret {j} (w={cfg.w[j-1]}): " + "; ".join(parts))
    print("trace:")
    for line in _demo_trace(session):
        print("  " + line)
    print("fidelities: " + ", ".join(_format_fid(f)
                                     for f in report.fidelities))
    print(f"whole-turn counts: {list(report.r_values)}")
    print(f"elapsed: {'<1s' if elapsed < 1.0 else f'{elapsed:.1f}s'}")
    if report.aborted:
        print(f"error: session aborted: {report.abort_reason}",
              file=sys.stderr)
        return 1
    if min(report.fidelities) < FIDELITY_FLOOR:
        print("error: reconstruction fidelity below threshold",
              file=sys.stderr)
        return 1
    return 0


def _demo_trace(session) -> list[str]:
    """Narrative of the transcript in the style of the worked example table."""
    lines = []
    helpers = session.helpers
    rec = session.reconstructor
    for msg in session.transcript:
        if msg.kind == KIND_W:
            continue
        if msg.phase == "teleport":
            user = msg.actor
            delta = session.contexts[user].deltas[_current_j(msg, session)]
            jj = _current_j(msg, session)
            if user == helpers[0]:
                gamma_d = session.contexts[DEALER].gammas[jj - 1]
                lines.append(f"[secret {jj}] {DEALER} encrypts: "
                             f"|Psi_{jj}> = R_X({gamma_d.pi_string()})|psi_{jj}>")
            lines.append(
                f"[secret {jj}] {user} measures its cluster particle in the "
                f"basis rotated by -({delta.pi_string()}), announces "
                f"m={msg.payload}; {rec} applies Z^{msg.payload} -> "
                f"|+_({delta.pi_string()})>")
        elif msg.phase == "correct" and msg.kind == KIND_BIT:
            jj = _current_j(msg, session)
            lines.append(f"[secret {jj}] {rec} entangles the carrier, "
                         f"measures in {{|+>,|->}}: m={msg.payload}")
        elif msg.kind == KIND_SIGMA:
            jj = _current_j(msg, session)
            sigma = RationalAngle.from_payload(msg.payload)
            lines.append(f"[secret {jj}] {msg.actor} publishes "
                         f"sigma={sigma.pi_string()}; {rec} applies "
                         f"R_X(sigma) H X^m")
        elif msg.kind == KIND_ANGLE_SUM:
            jj = msg.payload["j"]
            gamma_rec = session.contexts[rec].gammas[jj - 1]
            lines.append(f"[secret {jj}] {rec} applies "
                         f"R_X({gamma_rec.pi_string()}); total rotation = "
                         f"{msg.payload['r']} full turns -> secret recovered")
    return lines


def _current_j(msg, session) -> int:
    """Recover the secret index from the message position (messages are
    grouped per secret after the w announcements)."""
    t, m = session.config.t, session.config.m
    per_secret = (t - 1) + 2 * (t - 1) + 1
    pos = msg.seq - m - 1  # skip the w announcements
    return pos // per_secret + 1


# ---------------------------------------------------------------------------
# config files


def _need(obj: dict, field: str, kind):
    if field not in obj:
        raise ConfigError(field, "missing")
    value = obj[field]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ConfigError(field, f"expected integer, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise ConfigError(field, f"expected list, got {value!r}")
    return value


def load_config(path: str) -> tuple[SessionConfig, list, list[str]]:
    """Parse the flat JSON config into (config, secrets, participating)."""
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("<file>", str(exc))
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"line {exc.lineno}: {exc.msg}")
    q = _need(obj, "q", int)
    try:
        modulus = validate_prime(q)
    except (NotPrimeError, ValueError) as exc:
        raise ConfigError("q", f"modulus not prime: {exc}")
    t = _need(obj, "t", int)
    n = _need(obj, "n", int)
    w = _need(obj, "w", list)
    names = tuple(obj.get("names") or ())
    x_raw = obj.get("x")
    if x_raw is not None and not isinstance(x_raw, (list, dict)):
        raise ConfigError("x", "expected list or object")
    secrets_raw = _need(obj, "secrets", list)
    secrets = []
    for i, quad in enumerate(secrets_raw):
        if not (isinstance(quad, list) and len(quad) == 4
                and all(isinstance(v, int) for v in quad)):
            raise ConfigError(
                "secrets", f"entry {i}: expected "
                "[theta_num, theta_den, phi_num, phi_den]")
        try:
            secrets.append(bloch_state(RationalAngle(quad[0], quad[1]),
                                       RationalAngle(quad[2], quad[3])))
        except ZeroDivisionError:
            raise ConfigError("secrets", f"entry {i}: zero denominator")
    kwargs = dict(
        modulus=modulus, t=t, n=n, w=tuple(w),
        seed=obj.get("seed", 0),
        names=names,
        decoy_d1=obj.get("d1", 2),
        decoy_d2=obj.get("d2", 2),
        abort_threshold=obj.get("threshold", 0),
        delta_denominator=obj.get("delta_den", 360),
    )
    if "s_d" in obj:
        kwargs["dealer_secret"] = obj["s_d"]
    if "coeffs" in obj:
        kwargs["high_coeffs"] = tuple(obj["coeffs"])
    if x_raw is not None:
        if isinstance(x_raw, list):
            use_names = names or tuple(f"P{i}" for i in range(1, n + 1))
            if len(x_raw) != n:
                raise ConfigError("x", f"expected {n} entries")
            kwargs["x"] = dict(zip(use_names, x_raw))
        else:
            kwargs["x"] = x_raw
    try:
        config = SessionConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError("<session>", str(exc))
    if len(secrets) != config.m:
        raise ConfigError("secrets",
                          f"expected {config.m} entries to match w")
    participating = obj.get("participating") or list(config.names[:config.t])
    return config, secrets, participating


def cmd_run(args) -> int:
    config, secrets, participating = load_config(args.config)
    session = Session(config, secrets, participating=participating)
    report = session.run()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "transcript.jsonl").write_text(report.transcript.to_jsonl())
    summary = {
        "q": config.modulus.q, "t": config.t, "n": config.n,
        "w": list(config.w), "seed": config.seed,
        "participating": participating,
        "shares": {name: session.contexts[name].share.share
                   for name in config.names},
        "weights": {name: session.contexts[name].weight.c
                    for name in participating},
        "fidelities": list(report.fidelities),
        "r_values": list(report.r_values),
        "aborted": report.aborted,
        "abort_reason": report.abort_reason,
    }
    (out / "report.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"transcript: {out / 'transcript.jsonl'} "
          f"({len(report.transcript)} messages)")
    print(f"report: {out / 'report.json'}")
    if report.aborted:
        print(f"error: session aborted: {report.abort_reason}",
              file=sys.stderr)
        return 1
    print("fidelities: " + ", ".join(_format_fid(f)
                                     for f in report.fidelities))
    if min(report.fidelities) < FIDELITY_FLOOR:
        print("error: reconstruction fidelity below threshold",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# attacks


def _z_score(observed: float, expected: float, trials: int) -> float | None:
    var = expected * (1.0 - expected) / trials
    if var <= 0:
        return None
    return (observed - expected) / var ** 0.5


def cmd_attack(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    if args.scenario == "intercept_resend":
        config = ChannelConfig(args.d1, args.d2)
        observed = estimate_detection_probability(config, args.trials, rng)
        expected = expected_pass_rate(config)
        rows.append({
            "scenario": args.scenario, "trials": args.trials,
            "passes": round(observed * args.trials),
            "aborts": args.trials - round(observed * args.trials),
            "expected_rate": expected, "observed_rate": observed,
            "z_score": _z_score(observed, expected, args.trials),
        })
    elif args.scenario == "fake_results":
        config = selfcheck.demo_config(args.seed)
        report = attacks.fake_results_campaign(
            config, selfcheck.demo_secrets(), args.trials, args.seed)
        rows.append({
            "scenario": args.scenario, "trials": report.trials,
            "passes": report.successes,
            "aborts": 0,
            "expected_rate": report.expected_rate,
            "observed_rate": report.observed_rate,
            "z_score": _z_score(report.observed_rate, report.expected_rate,
                                report.trials),
        })
    elif args.scenario in ("collusion_no_reconstructor",
                           "collusion_with_reconstructor"):
        config = selfcheck.demo_config(args.seed)
        participating = config.names[:config.t]
        if args.scenario == "collusion_no_reconstructor":
            colluding = participating[:-1]
        else:
            colluding = (participating[0],) + (participating[-1],)
        report = attacks.collusion_scenario(
            config, selfcheck.demo_secrets(), colluding, args.seed,
            trials=args.trials)
        observed = report.abort_rate
        expected = report.expected_abort_rate
        rows.append({
            "scenario": args.scenario, "trials": report.trials,
            "passes": report.trials - report.aborts,
            "aborts": report.aborts,
            "expected_rate": expected, "observed_rate": observed,
            "z_score": (_z_score(observed, expected, report.trials)
                        if expected is not None else None),
            "leaked": len(report.leaked),
        })
        if report.leaked:
            print(f"error: privacy scan found leaks: {report.leaked[0]}",
                  file=sys.stderr)
            return 1
    else:
        print(f"error: unknown scenario {args.scenario!r}", file=sys.stderr)
        return 2
    header = (f"{'scenario':32} {'trials':>7} {'passes':>7} {'aborts':>7} "
              f"{'expected':>9} {'observed':>9} {'z':>6}")
    print(header)
    for row in rows:
        z = row.get("z_score")
        exp = row.get("expected_rate")
        print(f"{row['scenario']:32} {row['trials']:>7} {row['passes']:>7} "
              f"{row['aborts']:>7} "
              f"{(f'{exp:.5f}' if exp is not None else '-'):>9} "
              f"{row['observed_rate']:>9.5f} "
              f"{(f'{z:+.2f}' if z is not None else '-'):>6}")
    mirror = "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)
    if args.json:
        Path(args.json).write_text(mirror)
        print(f"json mirror: {args.json}")
    else:
        sys.stdout.write(mirror)
    bad = [row for row in rows
           if row.get("z_score") is not None and abs(row["z_score"]) > 4.0]
    if bad:
        print("error: observed rate departs from the analytic expectation",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# circuits and selftest


def cmd_circuit(args) -> int:
    if args.shots < 1:
        print("error: shots must be >= 1", file=sys.stderr)
        return 2
    circuit = circuits.worked_example_circuit(args.which)
    if args.emit:
        Path(args.emit).write_text(circuits.emit_qasm(circuit))
        print(f"emitted: {args.emit}")
    counts = circuits.simulate_shots(circuit, args.shots, args.seed)
    sys.stdout.write(circuits.histogram_text(counts))
    return 0


def cmd_selftest(args) -> int:
    start = time.monotonic()
    results = selfcheck.run_selftest()
    failures = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:28} {detail}")
        failures += not ok
    elapsed = time.monotonic() - start
    print(f"{len(results) - failures}/{len(results)} checks passed "
          f"in {elapsed:.1f}s")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtmss",
        description="Threshold quantum multi-secret sharing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", help="run the (3,4) worked example")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_demo)

    p = sub.add_parser("run", help="run a session from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("attack", help="Monte Carlo adversary campaign")
    p.add_argument("--scenario", required=True,
                   choices=["intercept_resend", "fake_results",
                            "collusion_no_reconstructor",
                            "collusion_with_reconstructor"])
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--d1", type=int, default=8)
    p.add_argument("--d2", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="write the JSONL mirror here")
    p.set_defaults(fn=cmd_attack)

    p = sub.add_parser("circuit", help="simulate a demonstration circuit")
    p.add_argument("--which", type=int, required=True, choices=[1, 2])
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--emit", help="write the circuit text here")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_circuit)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
