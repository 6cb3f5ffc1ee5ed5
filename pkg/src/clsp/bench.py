"""Benchmark harness: run solver pipelines over suites and emit CSV reports.

A run is described by a flat ``key = value`` config (see
:func:`parse_config`).  Every (instance, method) pair produces one row of
the per-instance CSV, and each method one row of the aggregate CSV.  All
randomness derives from the configured seed plus the instance's position
in the suite, so re-running an identical config reproduces every cost;
with ``timing = off`` the emitted CSVs are byte-identical.

Reference costs for optimality gaps come from one of three modes:

* ``best-found`` — the per-instance minimum across the methods in the run;
* ``oracle`` — the exhaustive fixed-pattern optimum (tiny instances only);
* ``file:PATH`` — externally computed costs (``instance-id cost`` lines);
  instances missing from the file get no gap and are reported.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .adaptive import DEFAULT_GRID, run_arpp
from .elimination import LeConfig, run_le
from .flow import exact_optimum, solve_fixed_setup
from .generator import generate_suite, parse_size
from .indices import PRESETS
from .model import (
    InfeasibleInstanceError,
    Instance,
    is_feasible_plan,
    lot_for_lot,
)
from .pbp import run_pbp, run_rpp
from .tabu import TabuConfig, run_tabu
from . import fileio

__all__ = [
    "BenchRow",
    "ConfigError",
    "MethodAggregate",
    "METHODS",
    "RunReport",
    "gap",
    "load_config",
    "parse_config",
    "run_bench",
    "run_method",
    "run_sweep",
]

METHODS: Tuple[str, ...] = tuple(PRESETS) + (
    "LotElim",
    "RPP1", "RPP2", "RPP3",
    "RLE1", "RLE2",
    "ARPP1", "ARPP2", "ARPP3",
    "ARPP3-TS", "ARPP3-LE",
)

_RANDOMIZED = frozenset(m for m in METHODS if m not in PRESETS and m != "LotElim")
_TAKES_W = frozenset({"RPP1", "RPP2", "RPP3", "RLE1", "RLE2"})

CSV_HEADER = "instance_id,method,m,w,seed,cost,reference,gap_pct,time_s,extra"
AGG_HEADER = ("method,instances,avg_gap_pct,best_gap_pct,worst_gap_pct,"
              "avg_time_s,total_time_s")


class ConfigError(ValueError):
    """Invalid benchmark configuration."""


def gap(c_heuristic: float, c_reference: float) -> float:
    """Percent deviation of a heuristic cost from a reference cost."""
    if c_reference <= 0:
        raise ValueError("reference cost must be positive")
    return (c_heuristic - c_reference) / c_reference * 100.0


@dataclass(frozen=True)
class BenchRow:
    instance_id: str
    method: str
    m: Optional[int]
    w: Optional[float]
    seed: Optional[int]
    cost: float
    reference: Optional[float]
    gap_pct: Optional[float]
    time_s: Optional[float]
    extra: str

    def csv(self) -> str:
        return ",".join([
            self.instance_id,
            self.method,
            "" if self.m is None else str(self.m),
            "" if self.w is None else f"{self.w:g}",
            "" if self.seed is None else str(self.seed),
            _fmt_cost(self.cost),
            "" if self.reference is None else _fmt_cost(self.reference),
            "" if self.gap_pct is None else f"{self.gap_pct:.4f}",
            "" if self.time_s is None else f"{self.time_s:.6f}",
            self.extra,
        ])


@dataclass(frozen=True)
class MethodAggregate:
    method: str
    instances: int
    avg_gap_pct: Optional[float]
    best_gap_pct: Optional[float]
    worst_gap_pct: Optional[float]
    avg_time_s: Optional[float]
    total_time_s: Optional[float]

    def csv(self) -> str:
        def opt(v, spec):
            return "" if v is None else format(v, spec)

        return ",".join([
            self.method, str(self.instances),
            opt(self.avg_gap_pct, ".4f"), opt(self.best_gap_pct, ".4f"),
            opt(self.worst_gap_pct, ".4f"), opt(self.avg_time_s, ".6f"),
            opt(self.total_time_s, ".6f"),
        ])


@dataclass(frozen=True)
class RunReport:
    rows: Tuple[BenchRow, ...]
    aggregates: Tuple[MethodAggregate, ...]


def _fmt_cost(cost: float) -> str:
    return str(int(cost)) if float(cost) == int(cost) else repr(float(cost))


# -- configuration --------------------------------------------------------


def parse_config(text: str) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` comments and blank lines ignored."""
    config: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = body.split("=", 1)
        config[key.strip()] = value.strip()
    return config


def load_config(source: Union[str, os.PathLike, Mapping[str, str]]) -> Dict[str, str]:
    if isinstance(source, Mapping):
        return dict(source)
    return parse_config(Path(source).read_text())


def _get_int(config, key, default):
    try:
        return int(config.get(key, default))
    except ValueError:
        raise ConfigError(f"{key} must be an integer") from None


def _get_float(config, key, default):
    try:
        return float(config.get(key, default))
    except ValueError:
        raise ConfigError(f"{key} must be a number") from None


def _method_params(config, method):
    """Per-method m/w with ``METHOD.m`` / ``METHOD.w`` overriding globals."""
    m = _get_int(config, f"{method}.m", _get_int(config, "m", 20))
    w = _get_float(config, f"{method}.w", _get_float(config, "w", 0.3))
    if m < 0:
        raise ConfigError("m must be >= 0")
    if not 0.0 <= w <= 1.0:
        raise ConfigError("w must lie in [0, 1]")
    return m, w


def _load_suite(config) -> List[Tuple[str, Instance]]:
    spec = config.get("suite")
    if not spec:
        raise ConfigError("config needs a 'suite' entry")
    if os.path.exists(spec):
        base = Path(spec).parent
        pairs = [(ident, fileio.read_instance(base / rel))
                 for ident, _, rel in fileio.read_manifest(spec)]
    else:
        try:
            parse_size(spec)
        except ValueError:
            raise ConfigError(
                f"suite {spec!r} is neither a manifest file nor a size") from None
        seed = _get_int(config, "suite_seed", 0)
        reps = _get_int(config, "suite_reps", 5)
        pairs = [(inst.name, inst) for inst in generate_suite(spec, seed, reps)]
    limit = _get_int(config, "limit", 0)
    return pairs[:limit] if limit > 0 else pairs


def _parse_methods(config) -> List[str]:
    raw = config.get("methods", "")
    names = [m.strip() for m in raw.split(",") if m.strip()] if raw else list(METHODS)
    if not names:
        raise ConfigError("method list is empty")
    for name in names:
        if name not in METHODS:
            raise ConfigError(f"unknown method {name!r}")
    return names


# -- method execution ------------------------------------------------------


def _baseline_plan(instance: Instance):
    """Lot-for-lot start for the elimination baselines.

    When producing exactly the demand each period violates capacity, the
    cheapest flow over the demand-positive slots is used (pre-building
    within the same setup pattern); if even that pattern cannot carry the
    demand, all slots are opened.
    """
    plan = lot_for_lot(instance)
    if is_feasible_plan(instance, plan):
        return plan
    shape = (instance.n_items, instance.n_periods)
    for pattern in (instance.demand > 0, np.ones(shape, dtype=bool)):
        result = solve_fixed_setup(instance, pattern)
        if result.ok:
            return result.plan
    raise InfeasibleInstanceError(f"{instance.name or 'instance'} is infeasible")


def _ref_to_scaled(reference: Optional[float], scale: int) -> Optional[int]:
    if reference is None:
        return None
    return int(math.floor(reference * scale + 1e-9))


def run_method(
    method: str,
    instance: Instance,
    *,
    m: int = 20,
    w: float = 0.3,
    seed: int = 0,
    reference: Optional[float] = None,
    tabu_cap: Optional[int] = 2,
) -> Tuple[int, str]:
    """Run one named method; returns (scaled cost, extra-info string)."""
    if method in PRESETS:
        return run_pbp(instance, method).cost_scaled, ""
    ref_scaled = _ref_to_scaled(reference, instance.scale)
    if method == "LotElim":
        res = run_le(instance, _baseline_plan(instance))
        return res.cost_scaled, f"eliminated={res.eliminated}"
    if method in ("RPP1", "RPP2", "RPP3"):
        res = run_rpp(instance, scheme=int(method[-1]), strength=w, reps=m, seed=seed)
        return res.cost_scaled, f"rep={res.chosen_rep}"
    if method in ("RLE1", "RLE2"):
        cfg = LeConfig(variant=method, w=w, m=m, seed=seed)
        res = run_le(instance, _baseline_plan(instance), cfg)
        return res.cost_scaled, f"rep={res.chosen_rep}"
    if method in ("ARPP1", "ARPP2", "ARPP3"):
        res = run_arpp(instance, scheme=int(method[-1]), reps=m, seed=seed,
                       reference_scaled=ref_scaled)
        return res.cost_scaled, f"probes={res.probe_count};w_star={res.w_star:g}"
    if method == "ARPP3-TS":
        first = run_arpp(instance, scheme=3, reps=m, seed=seed,
                         reference_scaled=ref_scaled)
        restricted = instance.n_items * instance.n_periods > 144
        improved = run_tabu(instance, first.plan, TabuConfig(
            iteration_cap=tabu_cap, reference_scaled=ref_scaled,
            restricted=restricted))
        return improved.cost_scaled, (
            f"probes={first.probe_count};iters={improved.iterations}")
    if method == "ARPP3-LE":
        first = run_arpp(instance, scheme=3, reps=m, seed=seed,
                         reference_scaled=ref_scaled)
        improved = run_le(instance, first.plan)
        return improved.cost_scaled, (
            f"probes={first.probe_count};eliminated={improved.eliminated}")
    raise ConfigError(f"unknown method {method!r}")


# -- bench driver ----------------------------------------------------------


def _references(config, pairs) -> Tuple[Dict[str, float], List[str], str]:
    """Per-instance reference costs, ids lacking one, and the mode name."""
    mode = config.get("reference", "best-found")
    if mode == "best-found":
        return {}, [], mode
    if mode == "oracle":
        refs = {}
        for ident, inst in pairs:
            refs[ident] = exact_optimum(inst).total_scaled / inst.scale
        return refs, [], mode
    if mode.startswith("file:"):
        table = fileio.read_reference(mode[5:])
        missing = [ident for ident, _ in pairs if ident not in table]
        return {i: table[i] for i, _ in pairs if i in table}, missing, mode
    raise ConfigError(f"unknown reference mode {mode!r}")


def _task_seed(master: int, index: int) -> int:
    return master * 100000 + index


def run_bench(config: Union[str, os.PathLike, Mapping[str, str]],
              out_dir: Union[str, os.PathLike, None] = None) -> RunReport:
    """Run the configured method grid; optionally write the two CSVs."""
    config = load_config(config)
    pairs = _load_suite(config)
    methods = _parse_methods(config)
    master = _get_int(config, "seed", 0)
    tabu_cap = _get_int(config, "tabu_cap", 2)
    timing = config.get("timing", "wall")
    if timing not in ("wall", "off"):
        raise ConfigError("timing must be 'wall' or 'off'")
    refs, missing, mode = _references(config, pairs)
    best_found = mode == "best-found"

    raw: List[Tuple[str, str, Optional[int], Optional[float], Optional[int],
                    float, Optional[float], str]] = []
    for index, (ident, inst) in enumerate(pairs):
        for method in methods:
            m, w = _method_params(config, method)
            seed = _task_seed(master, index) if method in _RANDOMIZED else None
            start = time.perf_counter()
            cost, extra = run_method(
                method, inst, m=m, w=w, seed=seed or 0,
                reference=refs.get(ident), tabu_cap=tabu_cap)
            elapsed = time.perf_counter() - start if timing == "wall" else None
            raw.append((ident, method,
                        m if method in _RANDOMIZED else None,
                        w if method in _TAKES_W else None,
                        seed, cost / inst.scale, elapsed, extra))

    if best_found:
        for ident, _ in pairs:
            byid = [r[5] for r in raw if r[0] == ident]
            refs[ident] = min(byid)

    rows = []
    for ident, method, m, w, seed, cost, elapsed, extra in raw:
        ref = refs.get(ident)
        rows.append(BenchRow(ident, method, m, w, seed, cost, ref,
                             None if ref is None else gap(cost, ref),
                             elapsed, extra))

    aggregates = []
    for method in methods:
        sub = [r for r in rows if r.method == method]
        gaps = [r.gap_pct for r in sub if r.gap_pct is not None]
        times = [r.time_s for r in sub if r.time_s is not None]
        aggregates.append(MethodAggregate(
            method, len(sub),
            sum(gaps) / len(gaps) if gaps else None,
            min(gaps) if gaps else None,
            max(gaps) if gaps else None,
            sum(times) / len(times) if times else None,
            sum(times) if times else None,
        ))

    report = RunReport(tuple(rows), tuple(aggregates))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_lines(out / "results.csv", [CSV_HEADER] + [r.csv() for r in rows])
        _write_lines(out / "aggregates.csv",
                     [AGG_HEADER] + [a.csv() for a in aggregates])
        if missing:
            _write_lines(out / "missing_references.txt", missing)
    return report


def _write_lines(path: Path, lines: Sequence[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


# -- sweep driver ----------------------------------------------------------


def _parse_list(raw: str, cast, key: str):
    try:
        values = [cast(v.strip()) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key} must be a comma-separated list") from None
    if not values:
        raise ConfigError(f"{key} must be a comma-separated list")
    return values


def run_sweep(config: Union[str, os.PathLike, Mapping[str, str]],
              out_dir: Union[str, os.PathLike, None] = None) -> List[dict]:
    """Average gap/time per (m, w) for one restart method over a suite."""
    config = load_config(config)
    method = config.get("method", "RPP3")
    if method not in ("RPP1", "RPP2", "RPP3", "RLE1", "RLE2"):
        raise ConfigError("sweep methods are RPP1/RPP2/RPP3 and RLE1/RLE2")
    m_list = _parse_list(config.get("m_list", "5,20,100"), int, "m_list")
    w_grid = _parse_list(
        config.get("w_grid", ",".join(f"{w:g}" for w in DEFAULT_GRID)),
        float, "w_grid")
    pairs = _load_suite(config)
    master = _get_int(config, "seed", 0)
    timing = config.get("timing", "wall")
    if timing not in ("wall", "off"):
        raise ConfigError("timing must be 'wall' or 'off'")
    refs, _, mode = _references(config, pairs)
    best_found = mode == "best-found"

    costs: Dict[Tuple[int, float], List[float]] = {
        (m, w): [] for m in m_list for w in w_grid}
    times: Dict[Tuple[int, float], float] = {key: 0.0 for key in costs}
    for index, (ident, inst) in enumerate(pairs):
        seed = _task_seed(master, index)
        for w_index, w in enumerate(w_grid):
            for m in m_list:
                start = time.perf_counter()
                cost, _ = run_method(method, inst, m=m, w=w,
                                     seed=_task_seed(seed, w_index))
                times[(m, w)] += time.perf_counter() - start
                costs[(m, w)].append(cost / inst.scale)

    if best_found:
        for pos, (ident, _) in enumerate(pairs):
            refs[ident] = min(series[pos] for series in costs.values())
    ref_list = [refs.get(ident) for ident, _ in pairs]

    records = []
    for m in m_list:
        for w in w_grid:
            gaps = [gap(c, r) for c, r in zip(costs[(m, w)], ref_list)
                    if r is not None]
            records.append({
                "method": method, "m": m, "w": w,
                "avg_gap_pct": sum(gaps) / len(gaps) if gaps else None,
                "avg_time_s": (times[(m, w)] / len(pairs)
                               if timing == "wall" else None),
            })

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        header = "method,m,w,avg_gap_pct,avg_time_s"

        def fmt(rec):
            agap = rec["avg_gap_pct"]
            atime = rec["avg_time_s"]
            return ",".join([
                rec["method"], str(rec["m"]), f"{rec['w']:g}",
                "" if agap is None else f"{agap:.4f}",
                "" if atime is None else f"{atime:.6f}",
            ])

        _write_lines(out / "sweep.csv", [header] + [fmt(r) for r in records])
        for w in w_grid:
            series = [r for r in records if r["w"] == w]
            _write_lines(
                out / f"series_w{w:g}.csv",
                ["m,avg_gap_pct"] + [
                    ",".join([
                        str(r["m"]),
                        "" if r["avg_gap_pct"] is None else f"{r['avg_gap_pct']:.4f}",
                    ]) for r in series
                ])
    return records
