"""Command-line front end.

Every subcommand prints one JSON object per line with at least the keys
``check``, ``dim``, ``residual`` and ``pass``; the exit status is 0 iff every
record passed, 1 if some check failed and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import nullcontext

import numpy as np

from .errors import QuditError
from .qudit_math import DEFAULT_TOL, check_dimension

TOLERANCE_ENV = "QC_TOLERANCE"


def _default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise QuditError(f"{TOLERANCE_ENV}={raw!r} is not a number") from None
    return tol


def _record(check: str, dim: int, residual: float, passed: bool, **extra) -> dict:
    rec = {"check": check, "dim": dim, "residual": max(0.0, float(residual)), "pass": bool(passed)}
    rec.update(extra)
    return rec


# --------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> list[dict]:
    from .suites import run_suite

    checks = run_suite(args.suite, args.dim, args.tolerance, args.seed)
    return [c.as_dict() for c in checks]


def cmd_run_pattern(args) -> list[dict]:
    from .cluster import StateVector, load_graph
    from .qudit_math import fourier_state
    from .teleport import broadcast_angles, load_pattern, run_pattern

    g = load_graph(args.graph)
    if args.dim is not None and args.dim != g.d:
        raise QuditError(f"--dim {args.dim} disagrees with the graph file (d={g.d})")
    pattern = broadcast_angles(load_pattern(args.pattern), g.d)
    out = run_pattern(None, g, pattern, mode=args.mode, seed=args.seed)
    results = out if isinstance(out, list) else [out]
    records = []
    for r in results:
        heads = [w[0] for w in r.wires]
        inp = StateVector.from_product([g.input_states.get(h, fourier_state(0, g.d)) for h in heads], g.d)
        residual = 1 - r.soundness(inp).value
        records.append(_record(
            "run-pattern.branch", g.d, residual, residual <= max(args.tolerance, 1e-9),
            outcomes=list(r.outcomes),
            frame=[[e.x, e.z, e.c] for e in r.frame.entries],
            probability=r.probability,
            wires=[list(w) for w in r.wires],
        ))
    records.sort(key=lambda rec: rec["outcomes"])
    return records


def cmd_dj(args) -> list[dict]:
    from .algorithms import HiddenShiftInstance, run_circuit_reference, run_cluster_version

    d = args.dim
    inst = HiddenShiftInstance(d, args.a, args.b)
    ref = run_circuit_reference(inst)
    records = [_record("dj.reference", d, 0.0 if ref == (args.a, args.b) else 1.0, ref == (args.a, args.b),
                       recovered=list(ref))]
    if args.mode == "exhaustive":
        branches = run_cluster_version(inst)
    else:
        branches = [run_cluster_version(inst, mode="sampled", seed=args.seed)]
    wrong = sum(br.recovered != ref or br.frame_recovered != ref for br in branches)
    recovered = sorted({br.recovered for br in branches})
    records.append(_record("dj.cluster", d, float(wrong), wrong == 0, branches=len(branches),
                           recovered=[list(x) for x in recovered], agreement=wrong == 0))
    return records


def _parse_angles(text: str | None, d: int, rng: np.random.Generator) -> np.ndarray:
    if text is None:
        return rng.uniform(0, 2 * np.pi, d)
    a = np.array([float(x) for x in text.split(",")])
    if a.shape != (d,):
        raise QuditError(f"expected {d} comma-separated angles, got {len(a)}")
    return a


def cmd_compile_gate(args) -> list[dict]:
    from .mub import compile_gate
    from .teleport import format_pattern

    d = args.dim
    rng = np.random.default_rng(args.seed)
    a = _parse_angles(args.angles, d, rng)
    gp = compile_gate(args.gate, a, args.k)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    residual = 1 - gp.soundness(psi)
    return [_record("compile-gate.soundness", d, residual, residual <= max(args.tolerance, 1e-9),
                    gate=gp.label, steps=len(gp.pattern), pattern=format_pattern(gp.pattern).splitlines())]


def cmd_clifford_report(args) -> list[dict]:
    from .clifford import verify_generation

    d = args.dim
    report = verify_generation(d)
    records = []
    for r in report.records:
        rec = _record("clifford.action", d, 0.0 if r.passed else 1.0, r.passed)
        rec.update(r.as_dict())
        records.append(rec)
    n_err = abs(len(report) - d * (d * d - 1))
    records.append(_record("clifford.action_count", d, float(n_err), n_err == 0, count=len(report)))
    return records


# --------------------------------------------------------------------------
# parser


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tolerance", type=_positive_float, default=None,
                        help=f"pass threshold (default 1e-10, or ${TOLERANCE_ENV})")
    common.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    common.add_argument("--out", help="write records to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="qudit-mbqc", description="Qudit cluster-state computation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("--suite", required=True, choices=["identities", "mub", "clifford", "stabilizer", "all"])
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run-pattern", parents=[common], help="execute a measurement pattern on a graph")
    p.add_argument("graph")
    p.add_argument("pattern")
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(func=cmd_run_pattern)

    p = sub.add_parser("dj", parents=[common], help="recover (a, b) with the circuit and the cluster")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=cmd_dj)

    p = sub.add_parser("compile-gate", parents=[common], help="compile Z(a), X(a) or ZX^k(a) to a pattern")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--gate", choices=["Z", "X", "ZX"], required=True)
    p.add_argument("--k", type=int, default=None, help="power of X for --gate ZX")
    p.add_argument("--angles", default=None, help="comma-separated phases (default: random from --seed)")
    p.set_defaults(func=cmd_compile_gate)

    p = sub.add_parser("clifford-report", parents=[common], help="realise every Clifford action")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_clifford_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.tolerance is None:
            args.tolerance = _default_tolerance()
            if not args.tolerance > 0:
                raise QuditError("tolerance must be positive")
        if args.dim is not None:
            check_dimension(args.dim)
        records = args.func(args)
    except (QuditError, OSError, ValueError) as exc:
        print(f"qudit-mbqc: error: {exc}", file=sys.stderr)
        return 2
    sink = open(args.out, "w") if args.out else nullcontext(sys.stdout)
    with sink as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0 if all(rec["pass"] for rec in records) else 1


if __name__ == "__main__":
    sys.exit(main())
