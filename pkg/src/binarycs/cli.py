"""Command-line entry point: ``binarycs <subcommand> ...``.

Exit codes: 0 success, 1 verification failure or bad input, 2 infeasible
plan, 3 decode failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import planner
from .baselines import (BasisPursuitConfig, ExpanderDecodeConfig, basis_pursuit_decode,
                        expander_decode)
from .harness import ExperimentSpec, InfeasiblePlanError, run_experiment
from .matrix import DeVoreMatrix, verify_main_assumption
from .recovery import RecoveryConfig, decode_exact, decode_robust
from .sparse import SparseVector

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_DECODE = 0, 1, 2, 3


def _read_text_arg(value: str) -> str:
    """Inline JSON if it looks like JSON, otherwise a file path."""
    if value.lstrip().startswith("{"):
        return value
    return Path(value).read_text()


def read_measurements(path) -> np.ndarray:
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            vals.append(float(line.split(",")[0]))
    return np.array(vals)


def write_measurements(y, path) -> None:
    Path(path).write_text("".join(f"{v!r}\n" for v in np.asarray(y, dtype=float).tolist()))


def cmd_plan(args) -> int:
    plans = planner.plan_table(args.n, [args.k], args.M, args.r)
    sys.stdout.write(planner.plans_to_csv(plans))
    bad = [p for p in plans if not p.feasible]
    for p in bad:
        print(p.diagnostic, file=sys.stderr)
    return EXIT_INFEASIBLE if bad else EXIT_OK


def cmd_build_matrix(args) -> int:
    mat = DeVoreMatrix(args.q, args.r, args.n)
    mat.write_csv(args.out)
    print(f"wrote {mat!r} to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_encode(args) -> int:
    mat = DeVoreMatrix.from_spec(args.matrix)
    x = SparseVector.from_json(_read_text_arg(args.x))
    write_measurements(mat.encode(x), args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    mat = DeVoreMatrix.from_spec(args.matrix)
    y = read_measurements(args.y)
    if y.size != mat.m:
        print(f"measurement file has {y.size} values, matrix has m={mat.m}", file=sys.stderr)
        return EXIT_FAIL
    ok = True
    if args.method == "new":
        decoder = decode_robust if args.robust else decode_exact
        res = decoder(mat, y, RecoveryConfig(args.tol or 0.0))
        x = res.x
        if res.failures:
            ok = False
            print(f"decode failed at {len(res.failures)} column(s): {res.failures[:10]}", file=sys.stderr)
    elif args.method == "expander":
        res = expander_decode(mat, y, ExpanderDecodeConfig(gap_tol=args.tol))
        x, ok = res.x, res.converged
        if not ok:
            print(f"expander decode failed after {res.iterations} iterations: {res.reason}", file=sys.stderr)
    else:
        res = basis_pursuit_decode(mat, y, BasisPursuitConfig(radius=args.radius))
        x, ok = SparseVector.from_dense(res.x, tol=args.tol or 0.0), res.converged
        if not ok:
            print(f"basis pursuit did not converge (primal {res.primal_residual:.3g}, "
                  f"dual {res.dual_residual:.3g})", file=sys.stderr)
    text = x.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_DECODE


def cmd_bench(args) -> int:
    spec = ExperimentSpec.from_json(_read_text_arg(args.spec))
    try:
        result = run_experiment(spec)
    except InfeasiblePlanError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not spec.out:
        sys.stdout.write(result.to_csv())
    print(result.summary_json(), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    mat = DeVoreMatrix.from_spec(args.matrix)
    mode = "exhaustive" if args.exhaustive else "sampled"
    try:
        rep = verify_main_assumption(mat, mode, count=args.pairs, seed=args.seed)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps({"matrix": mat.spec_string(), "mode": rep.mode, "pairs_checked": rep.pairs_checked,
                      "max_inner_product": rep.max_inner_product, "bound": mat.r - 1,
                      "violations": rep.violations, "bad_columns": rep.bad_columns}))
    return EXIT_OK if rep.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="binarycs", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("plan", help="measurement budget per method")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--M", type=int, default=0)
    s.add_argument("--r", type=int, default=3)
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("build-matrix", help="export column supports as CSV")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--r", type=int, default=3)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_build_matrix)

    s = sub.add_parser("encode", help="y = A x for a sparse x given as JSON")
    s.add_argument("--matrix", required=True, help="'q=..,r=..,n=..' or an exported CSV")
    s.add_argument("--x", required=True, help="JSON text or path: {\"n\": .., \"entries\": [[i, v], ..]}")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", help="recover x from measurements")
    s.add_argument("--method", choices=["new", "expander", "bp"], default="new")
    s.add_argument("--matrix", required=True)
    s.add_argument("--y", required=True, help="CSV, one value per line")
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--robust", action="store_true", help="windowed averaging (nearly sparse x)")
    s.add_argument("--radius", type=float, default=0.0, help="bp noise radius")
    s.add_argument("--out")
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("bench", help="run a seeded experiment from a JSON spec")
    s.add_argument("--spec", required=True)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("verify", help="check column weights and pairwise overlaps")
    s.add_argument("--matrix", required=True)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--pairs", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
