"""Command-line front end.

Subcommands:
    solve <file>   run the stochastic central-path solver on an instance file
    oracle <file>  brute-force optimum by vertex enumeration
    bench drift    projection-maintenance counter benchmark (CSV output)

Exit codes: 0 success, 1 nonconverged, 2 input error, 3 numerical failure.
"""

import argparse
import json
import sys

import numpy as np

from .errors import (CenteringFailedError, DomainError, EnumerationGuardError,
                     FactorizationError, InstanceFormatError,
                     PotentialOverflowError, ShapeError, StochLPError)
from .instances import load_instance
from .oracle import vertex_enumerate_solve
from .projection import ProjectionMaintainer
from .solver import SolverConfig, solve

EXIT_OK = 0
EXIT_NONCONVERGED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_INPUT_ERRORS = (InstanceFormatError, ShapeError, DomainError,
                 EnumerationGuardError, OSError)
_NUMERICAL_ERRORS = (FactorizationError, CenteringFailedError,
                     PotentialOverflowError)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="stochlp",
        description="Stochastic central-path LP solver and oracles")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("file")
    p_solve.add_argument("--delta", type=float, default=1e-3)
    p_solve.add_argument("--mode", choices=["paper", "practical"],
                         default="practical")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--a", type=float, default=None)
    p_solve.add_argument("--omega", type=float, default=2.373)
    p_solve.add_argument("--trace", default=None, metavar="OUT.CSV")
    p_solve.add_argument("--max-iters", type=int, default=None)
    p_solve.add_argument("--json", action="store_true")

    p_oracle = sub.add_parser("oracle", help="vertex-enumeration optimum")
    p_oracle.add_argument("file")
    p_oracle.add_argument("--json", action="store_true")

    p_bench = sub.add_parser("bench", help="counter benchmarks")
    p_bench.add_argument("kind", choices=["drift"])
    p_bench.add_argument("--n", type=int, default=64)
    p_bench.add_argument("--steps", type=int, default=None)
    p_bench.add_argument("--eps-mp", type=float, default=0.25)
    p_bench.add_argument("--a", type=float, default=0.5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default=None)
    return parser


def _cmd_solve(args):
    lp, name = load_instance(args.file)
    config = SolverConfig(delta=args.delta, mode=args.mode, seed=args.seed,
                          a=args.a, omega=args.omega,
                          trace_path=args.trace, max_iters=args.max_iters)
    report = solve(lp, config)
    if args.json:
        payload = {
            "name": name,
            "objective": report.objective,
            "infeasibility_l1": report.primal_infeas_l1,
            "iterations": report.iterations,
            "fallbacks": report.fallbacks,
            "converged": report.converged,
            "duality_gap": report.duality_gap,
            "x_hat": [float(v) for v in report.x_hat],
        }
        print(json.dumps(payload))
    else:
        if name:
            print(f"instance:        {name}")
        print(f"objective:       {report.objective:.12g}")
        print(f"infeasibility_l1: {report.primal_infeas_l1:.6g}")
        print(f"iterations:      {report.iterations}")
        print(f"fallbacks:       {report.fallbacks}")
        print(f"converged:       {report.converged}")
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def _cmd_oracle(args):
    lp, name = load_instance(args.file)
    result = vertex_enumerate_solve(lp)
    if args.json:
        print(json.dumps({
            "name": name,
            "status": result.status,
            "optimum": None if result.status != "optimal" else result.optimum,
            "argmin": [float(v) for v in result.argmin],
        }))
    else:
        if result.status == "optimal":
            print(f"{result.optimum:.12g}")
        else:
            print(result.status)
    return EXIT_OK if result.status == "optimal" else EXIT_NONCONVERGED


def _cmd_bench(args):
    n = args.n
    steps = args.steps if args.steps is not None else int(np.ceil(np.sqrt(n)))
    rng = np.random.default_rng(args.seed)
    d = max(2, n // 4)
    a = rng.standard_normal((d, n))
    w = np.ones(n)
    mp = ProjectionMaintainer(a, w, eps_mp=args.eps_mp, a_exp=args.a)
    lines = ["step,r,rank_total,weighted_cost,queries"]
    factor = 1.0 + 1.0 / np.sqrt(n)
    for step in range(1, steps + 1):
        w = w * factor
        before = mp.counters["rank_total"]
        mp.update(w)
        mp.query(rng.standard_normal(n))
        snap = mp.counters
        lines.append(
            f"{step},{snap['rank_total'] - before},{snap['rank_total']},"
            f"{format(snap['weighted_cost'], '.17g')},{snap['queries']}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        return _cmd_bench(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StochLPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
