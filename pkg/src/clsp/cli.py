"""Command-line interface: generate suites, solve instances, run benchmarks.

Subcommands::

    clsp gen   --size 12x12 --seed 0 --out DIR [--reps 5]
    clsp solve --instance FILE --method NAME [--m M] [--w W] [--seed S]
               [--reference FILE]
    clsp bench --config FILE --out DIR
    clsp sweep --config FILE --out DIR

Exit codes: 0 success, 2 configuration error (bad arguments, unreadable
files, malformed configs), 3 infeasible input instance.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import fileio
from .bench import ConfigError, METHODS, gap, run_bench, run_method, run_sweep
from .generator import generate_suite, parse_size
from .model import InfeasibleInstanceError

__all__ = ["main"]


def _cmd_gen(args: argparse.Namespace) -> int:
    parse_size(args.size)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for instance in generate_suite(args.size, args.seed, args.reps):
        filename = f"{instance.name}.txt"
        fileio.write_instance(instance, out / filename)
        letters = instance.name.split("-")[1]
        rows.append((instance.name, letters, filename))
    fileio.write_manifest(rows, out / "manifest.txt")
    print(f"wrote {len(rows)} instances to {out}")
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = fileio.read_instance(args.instance)
    reference = None
    if args.reference:
        reference = fileio.read_reference(args.reference).get(instance.name)
    cost_scaled, extra = run_method(
        args.method, instance, m=args.m, w=args.w, seed=args.seed,
        reference=reference)
    cost = cost_scaled / instance.scale
    print(f"instance {instance.name}")
    print(f"method {args.method}")
    print(f"cost {fileio._format_cost(cost)}")
    if reference is not None:
        print(f"reference {fileio._format_cost(reference)}")
        print(f"gap_pct {gap(cost, reference):.4f}")
    if extra:
        print(f"extra {extra}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    report = run_bench(args.config, args.out)
    for agg in report.aggregates:
        avg = "-" if agg.avg_gap_pct is None else f"{agg.avg_gap_pct:.4f}"
        print(f"{agg.method:12s} instances={agg.instances} avg_gap_pct={avg}")
    print(f"wrote results to {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    records = run_sweep(args.config, args.out)
    for rec in records:
        avg = "-" if rec["avg_gap_pct"] is None else f"{rec['avg_gap_pct']:.4f}"
        print(f"{rec['method']} m={rec['m']} w={rec['w']:g} avg_gap_pct={avg}")
    print(f"wrote sweep to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clsp",
        description="Capacitated lot-sizing heuristics and benchmark harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a factorial instance suite")
    gen.add_argument("--size", required=True, help="suite size, e.g. 12x12")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--reps", type=int, default=5,
                     help="replications per factor cell")
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", help="solve one instance with one method")
    solve.add_argument("--instance", required=True, help="instance file")
    solve.add_argument("--method", required=True, choices=METHODS)
    solve.add_argument("--m", type=int, default=20, help="restart count")
    solve.add_argument("--w", type=float, default=0.3,
                       help="perturbation strength")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--reference", default=None,
                       help="reference-cost file for gap reporting")
    solve.set_defaults(func=_cmd_solve)

    bench = sub.add_parser("bench", help="run a configured benchmark")
    bench.add_argument("--config", required=True, help="key = value file")
    bench.add_argument("--out", required=True, help="output directory")
    bench.set_defaults(func=_cmd_bench)

    sweep = sub.add_parser("sweep", help="run a (m, w) parameter sweep")
    sweep.add_argument("--config", required=True, help="key = value file")
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
