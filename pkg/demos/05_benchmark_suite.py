"""
Benchmark suites, gap reports, and tuning sweeps
================================================

The bench layer turns the solvers into reproducible experiments: generate a
factorial suite of instances, run a list of methods over it, compute optimality
gaps against a reference, and write diff-friendly CSV files.

Everything here is also reachable from the command line:

    clsp gen --size 6x6 --seed 11 --reps 1 --out /tmp/suite
    clsp solve --instance /tmp/suite/6x6-adfhk-1.txt --method RPP3 --m 20
    clsp bench --config bench.cfg --out /tmp/report
    clsp sweep --config sweep.cfg --out /tmp/sweep

A config file is flat ``key = value`` text; the dictionaries below use the
same keys.
"""

import tempfile
from pathlib import Path

from clsp import run_bench, run_sweep

out = Path(tempfile.mkdtemp(prefix="clsp-demo-"))

# A bench run over a freshly generated suite (72 cells x 1 repetition,
# trimmed to 12 instances to keep the demo quick).  best-found mode measures
# every method against the best cost any method achieved on that instance.
report = run_bench({
    "suite": "6x6",
    "suite_seed": "11",
    "suite_reps": "1",
    "limit": "12",
    "methods": "HeinB,DixonSilver,RPP3,ARPP3,ARPP3-TS,LotElim",
    "m": "10",
    "w": "0.3",
    "seed": "5",
    "reference": "best-found",
    "timing": "wall",
}, out / "bench")

print(f"{'method':<10} {'avg gap %':>10} {'worst %':>9} {'avg s':>8}")
for agg in report.aggregates:
    print(f"{agg.method:<10} {agg.avg_gap_pct:>10.3f} "
          f"{agg.worst_gap_pct:>9.3f} {agg.avg_time_s:>8.4f}")
print()
print("per-instance rows:", len(report.rows))
print("files:", sorted(p.name for p in (out / "bench").iterdir()))
print()

# A strength sweep for one randomized method: average gap per (m, w) cell,
# referenced against the best cost found anywhere in the grid.  Keeping the
# same instance seeds across m makes the columns nested restart prefixes,
# so the average gap can only improve as m grows.
records = run_sweep({
    "suite": "6x6",
    "suite_seed": "11",
    "suite_reps": "1",
    "limit": "12",
    "method": "RPP3",
    "m_list": "5,20",
    "w_grid": "0.1,0.3,0.5,0.7,0.9",
    "seed": "5",
    "timing": "off",
}, out / "sweep")

print(f"{'m':>4} {'w':>5} {'avg gap %':>10}")
for rec in records:
    print(f"{rec['m']:>4} {rec['w']:>5.2f} {rec['avg_gap_pct']:>10.3f}")
print()
print("files:", sorted(p.name for p in (out / "sweep").iterdir()))
