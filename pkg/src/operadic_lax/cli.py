"""Command-line front end.

Usage::

    operadic-lax verify-classical --omega 2
    operadic-lax evolve sl2 --omega 1 --p0 2 --t-end 3.14159 --out sl2.csv
    operadic-lax solve-params so3 --p0 2
    operadic-lax classify heisenberg
    operadic-lax verify-all --seed 42 --out report.json
    operadic-lax export-algebras fixtures/

Exit codes: 0 pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import algebras as alg
from . import verify
from .errors import DomainError, ShapeError
from .integrator import CoupledState, IntegrationConfig, rk4_run
from .lax_dynamics import (
    COORD_LABELS,
    ParamVector,
    classify_rigidity,
    closed_form_coords,
    closed_form_series,
    solve_params,
    to_coords,
)
from .oscillator import OscState, exact_trajectory, hamiltonian, initial_state, lift_phase

log = logging.getLogger("operadic_lax")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """17 significant digits, locale independent."""
    return format(float(x), ".17g")


def positive(name):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not (math.isfinite(value) and value > 0):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text}")
        return value

    return parse


# -- evolve --------------------------------------------------------------------


def csv_header() -> list[str]:
    cols = ["t", "rk4_q", "rk4_p", "rk4_H", "exact_q", "exact_p", "exact_H"]
    for label in COORD_LABELS:
        cols += [f"rk4_{label}", f"exact_{label}"]
    cols.append("max_err")
    return cols


def evolve_rows(mu0, omega: float, p0: float, t_end: float, dt: float, record_every: int = 1):
    """Rows of the evolve CSV: RK4 beside the closed form at each recorded time."""
    C = solve_params(mu0, p0)
    s0 = initial_state(p0, omega)
    cfg = IntegrationConfig(dt, t_end, record_every)
    tr = rk4_run(CoupledState(0.0, s0, to_coords(mu0)), cfg)
    exact = closed_form_series(C, s0, tr.times)
    rows = []
    for k, t in enumerate(tr.times):
        ex = exact_trajectory(s0, t)
        rq, rp = tr.q[k], tr.p[k]
        row = [t, rq, rp, 0.5 * (rp**2 + omega**2 * rq**2), ex.q, ex.p, hamiltonian(ex)]
        for a, b in zip(tr.mu[k], exact[k]):
            row += [a, b]
        err = max(float(np.max(np.abs(tr.mu[k] - exact[k]))), abs(rq - ex.q), abs(rp - ex.p))
        row.append(err)
        rows.append(row)
    return C, rows


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def reevaluate_exact(C: ParamVector, omega: float, p0: float, t: float, q: float, p: float) -> np.ndarray:
    """Closed-form coordinates from a CSV row's (t, q, p); the time fixes the phase lift."""
    s = OscState(q, p, omega)
    theta = lift_phase(s, omega * t)
    return closed_form_coords(C, s, theta=theta)


def cmd_evolve(args) -> int:
    algebra = alg.load_algebra(args.algebra)
    t_end = args.t_end if args.t_end is not None else 2.0 * math.pi / args.omega
    if not t_end >= args.dt:
        raise UsageError(f"--t-end ({t_end}) must be at least --dt ({args.dt})")
    C, rows = evolve_rows(algebra.constants, args.omega, args.p0, t_end, args.dt, args.record_every)
    try:
        write_csv(args.out, csv_header(), rows)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from None
    max_err = max(r[-1] for r in rows)
    log.info("wrote %d rows to %s (max_err=%.3e)", len(rows), args.out, max_err)
    print(json.dumps({"algebra": algebra.name, "rows": len(rows), "out": str(args.out),
                      "max_err": max_err, **C.as_dict()}, sort_keys=True))
    return EXIT_OK


# -- other commands ------------------------------------------------------------


def solve_params_payload(mu0, p0: float, name: str) -> dict:
    C = solve_params(mu0, p0)
    return {"algebra": name, "p0": p0, **C.as_dict(), "condition_satisfied": C.condition_satisfied}


def cmd_solve_params(args) -> int:
    algebra = alg.load_algebra(args.algebra)
    print(json.dumps(solve_params_payload(algebra.constants, args.p0, algebra.name), indent=2))
    return EXIT_OK


def classify_report(name: str, mu0, omega: float, p0: float) -> verify.VerificationReport:
    inputs = {"algebra": name, "omega": omega, "p0": p0}
    result = classify_rigidity(mu0, p0, omega)
    details = {
        "verdict": result.verdict,
        "condition_satisfied": result.condition_satisfied,
        "max_deviation": result.max_deviation,
        "message": result.message,
        **result.params.as_dict(),
    }
    checks = [verify.CheckResult("classification", inputs, 0.0, 1.0, True, 0.0, details)]
    if result.verdict == "deformed" and alg.check_jacobi(mu0) < 1e-12:
        checks.append(
            verify.run_check("jacobi_along_flow", {**inputs, "points": 50}, 1e-10,
                             lambda: verify.sl2_jacobi_sweep(mu0, p0, omega))
        )
        if np.array_equal(mu0.coeffs, alg.SL2.coeffs):
            checks.append(
                verify.run_check("sl2_isomorphism", {**inputs, "points": 50, "q_cutoff": 0.1}, 1e-9,
                                 lambda: verify.sl2_isomorphism_sweep(mu0, p0, omega))
            )
    return verify.VerificationReport("classify", checks)


def emit_report(report: verify.VerificationReport, out) -> int:
    text = report.to_json()
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from None
    else:
        sys.stdout.write(text)
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_classify(args) -> int:
    algebra = alg.load_algebra(args.algebra)
    report = classify_report(algebra.name, algebra.constants, args.omega, args.p0)
    verdict = report.checks[0].details
    print(f"{algebra.name}: {verdict['verdict']} (condition satisfied: {verdict['condition_satisfied']})",
          file=sys.stderr)
    return emit_report(report, args.out)


def cmd_verify_classical(args) -> int:
    return emit_report(verify.verify_classical(args.omega, args.grid, args.extent), args.out)


def cmd_verify_all(args) -> int:
    builtins = verify.corrupted_builtins(args.corrupt_builtin) if args.corrupt_builtin else None
    return emit_report(verify.verify_all(args.seed, builtins), args.out)


def cmd_export_algebras(args) -> int:
    for path in alg.export_builtins(args.directory):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="operadic-lax", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def algebra_arg(p):
        p.add_argument("algebra", help=f"builtin name ({', '.join(alg.BUILTIN_NAMES)}) or JSON file")

    p = sub.add_parser("verify-classical", help="check the 3x3 Lax pair over a (q, p) grid")
    p.add_argument("--omega", type=positive("omega"), default=1.0)
    p.add_argument("--grid", type=int, default=10, help="points per axis")
    p.add_argument("--extent", type=positive("extent"), default=5.0, help="grid covers [-extent, extent]")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_verify_classical)

    p = sub.add_parser("evolve", help="RK4 and closed-form evolution to CSV")
    algebra_arg(p)
    p.add_argument("--omega", type=positive("omega"), default=1.0)
    p.add_argument("--p0", type=positive("p0"), default=2.0)
    p.add_argument("--t-end", type=positive("t-end"), default=None, help="default: one period 2 pi / omega")
    p.add_argument("--dt", type=positive("dt"), default=1e-4)
    p.add_argument("--record-every", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("solve-params", help="fit C1..C9 to an initial multiplication")
    algebra_arg(p)
    p.add_argument("--p0", type=positive("p0"), default=2.0)
    p.set_defaults(func=cmd_solve_params)

    p = sub.add_parser("classify", help="rigid or dynamically deformed")
    algebra_arg(p)
    p.add_argument("--omega", type=positive("omega"), default=1.0)
    p.add_argument("--p0", type=positive("p0"), default=2.0)
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify-all", help="run every verification suite")
    p.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--corrupt-builtin", choices=alg.BUILTIN_NAMES, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_all)

    p = sub.add_parser("export-algebras", help="write the builtin algebras as JSON files")
    p.add_argument("directory")
    p.set_defaults(func=cmd_export_algebras)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "record_every", 1) < 1:
        parser.error("--record-every must be >= 1")
    if getattr(args, "grid", 2) < 1:
        parser.error("--grid must be >= 1")
    try:
        return args.func(args)
    except (UsageError, DomainError, ShapeError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"operadic-lax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
