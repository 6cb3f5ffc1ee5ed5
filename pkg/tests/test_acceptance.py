"""End-to-end acceptance checks: one test per release criterion.

Each test states a complete, externally meaningful guarantee (oracle
dominance, identity at zero perturbation, subproblem exactness, improvement
monotonicity, method ordering, tuning-curve shape, probe efficiency,
combined-method quality, runtime ceilings, replay determinism).  The module
is slower than the unit tests -- the ordering and tuning checks run full
360-instance suites -- but every expensive artifact is built once per module
and shared.

Absolute-gap bands against proven optima only apply when an external
reference file is present at ``references/optimal_12x12.txt`` (format:
``<instance_id> <cost>`` per line); without it those clauses are vacuous and
only the self-contained properties are checked.  Band violations warn rather
than fail: they depend on instance-population details that are deliberately
not pinned by the generator's contract.
"""

import time
import warnings
from itertools import combinations_with_replacement
from math import comb
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import linprog

from clsp.adaptive import run_arpp
from clsp.bench import gap, run_bench, run_method, run_sweep
from clsp.elimination import LeConfig, run_le
from clsp.fileio import read_reference
from clsp.flow import FixedSetupSolver, exact_optimum, solve_fixed_setup
from clsp.generator import generate_suite
from clsp.indices import PRESETS
from clsp.model import (
    Instance,
    check_plan,
    cost_scaled,
    instance_feasible,
    is_feasible_plan,
    lot_for_lot,
)
from clsp.pbp import run_pbp, run_rpp
from clsp.tabu import TabuConfig, run_tabu

REFERENCE_FILE = Path(__file__).resolve().parents[1] / "references" / "optimal_12x12.txt"

pytestmark = pytest.mark.slow


# -- shared instance material ------------------------------------------------


def _random_tiny(rng, k_hi=3):
    """Feasible-or-not random instance with N in 1..3, T in 2..5."""
    n = int(rng.integers(1, 4))
    t = int(rng.integers(2, 6))
    d = rng.integers(0, 9, (n, t))
    k = rng.integers(1, k_hi + 1, n)
    load = int((k[:, None] * d).sum())
    c = rng.integers(max(1, load // t), max(2, 2 * load // t + 1), t)
    return Instance(demand=d, capacity=c, setup_cost=rng.integers(1, 60, n),
                    holding_cost=rng.integers(0, 5, n), capacity_usage=k)


def _feasible_start(inst):
    """Lot-for-lot when it fits, else the cheapest-flow repair of it."""
    plan = lot_for_lot(inst)
    if is_feasible_plan(inst, plan):
        return plan
    result = solve_fixed_setup(inst, inst.demand > 0)
    if result.ok:
        return result.plan
    return solve_fixed_setup(inst, np.ones(inst.demand.shape, dtype=bool)).plan


@pytest.fixture(scope="module")
def tiny_suite():
    """500 feasible tiny instances with proven optimal costs (scaled)."""
    start = time.perf_counter()
    rng = np.random.default_rng(202401)
    out = []
    while len(out) < 500:
        inst = _random_tiny(rng)
        if inst.demand.sum() == 0 or not instance_feasible(inst):
            continue
        out.append((inst, exact_optimum(inst).total_scaled))
    return out, time.perf_counter() - start


@pytest.fixture(scope="module")
def suite12():
    return list(generate_suite("12x12", 0, 5))


@pytest.fixture(scope="module")
def suite24():
    return list(generate_suite("24x24", 0, 5))


@pytest.fixture(scope="module")
def heinb12(suite12):
    return [run_pbp(inst) for inst in suite12]


@pytest.fixture(scope="module")
def arpp3_m20(suite12):
    """Adaptive runs at m=20 plus their total wall time (shared by 2 tests)."""
    results, seconds = [], 0.0
    for idx, inst in enumerate(suite12):
        t0 = time.perf_counter()
        results.append(run_arpp(inst, scheme=3, reps=20, seed=idx))
        seconds += time.perf_counter() - t0
    return results, seconds


@pytest.fixture(scope="module")
def sweep12():
    """Full tuning sweep: 18 strengths x m in {5,20,100} over 360 instances."""
    return run_sweep({
        "method": "RPP3", "suite": "12x12", "suite_seed": "0",
        "suite_reps": "5", "seed": "0", "timing": "wall",
    })


# -- criterion 1: every method dominated by the exact oracle -----------------


def test_01_all_methods_feasible_and_above_exact_optimum(tiny_suite):
    instances, build_seconds = tiny_suite
    start = time.perf_counter()
    violations = 0
    for idx, (inst, opt) in enumerate(instances):
        produced = [run_pbp(inst, name).plan for name in PRESETS]
        for scheme in (1, 2, 3):
            for w in (0.0, 0.3, 0.9):
                produced.append(
                    run_rpp(inst, scheme=scheme, strength=w, reps=4,
                            seed=(idx, scheme)).plan)
        begin = _feasible_start(inst)
        produced.append(run_le(inst, begin).plan)
        for variant in ("RLE1", "RLE2"):
            produced.append(
                run_le(inst, begin,
                       LeConfig(variant=variant, w=0.3, m=2, seed=idx)).plan)
        produced.append(
            run_tabu(inst, begin, TabuConfig(iteration_cap=3)).plan)
        produced.append(run_arpp(inst, scheme=3, reps=4, seed=idx).plan)
        for plan in produced:
            if check_plan(inst, plan) or cost_scaled(inst, plan) < opt:
                violations += 1
    elapsed = build_seconds + (time.perf_counter() - start)
    assert violations == 0
    assert elapsed < 300.0


# -- criterion 2: zero perturbation strength is the deterministic plan -------


def test_02_zero_strength_reproduces_deterministic_plan(tiny_suite, suite12):
    instances = [inst for inst, _ in tiny_suite[0]] + suite12[:50]
    for inst in instances:
        base = run_pbp(inst).plan
        for scheme in (1, 2, 3):
            res = run_rpp(inst, scheme=scheme, strength=0.0, reps=2, seed=1)
            assert np.array_equal(res.plan.lots_scaled, base.lots_scaled)
            assert res.plan.scale == base.scale


# -- criterion 3: fixed-pattern subproblem matches an independent oracle -----


def _lp_pattern_oracle(inst, allowed):
    """Optimal pattern cost by LP over unit allocations; None if infeasible.

    Variables are capacity units of item i produced in period s to serve the
    demand of period t >= s.  The constraint matrix is a pure transportation
    structure with integer right-hand sides, so the LP vertex optimum is
    integral and the exact scaled cost can be recomputed from the rounded
    solution without float error.
    """
    n, t = inst.n_items, inst.n_periods
    scale = int(np.lcm.reduce(inst.capacity_usage))
    cells = [(i, p) for i in range(n) for p in range(t) if inst.demand[i, p] > 0]
    if not cells:
        return scale * int(inst.setup_cost @ allowed.sum(axis=1))
    cols, obj = [], []
    for i, p in cells:
        slots = [s for s in range(p + 1) if allowed[i, s]]
        if not slots:
            return None
        for s in slots:
            cols.append((i, s, p))
            obj.append(inst.holding_cost[i] * (p - s) / inst.capacity_usage[i])
    a_eq = np.zeros((len(cells), len(cols)))
    b_eq = np.empty(len(cells))
    for row, (i, p) in enumerate(cells):
        b_eq[row] = inst.demand[i, p] * inst.capacity_usage[i]
        for col, (ci, _, cp) in enumerate(cols):
            if (ci, cp) == (i, p):
                a_eq[row, col] = 1.0
    a_ub = np.zeros((t, len(cols)))
    for col, (_, s, _) in enumerate(cols):
        a_ub[s, col] = 1.0
    res = linprog(obj, A_ub=a_ub, b_ub=inst.capacity, A_eq=a_eq, b_eq=b_eq,
                  method="highs")
    if res.status == 2:
        return None
    assert res.status == 0
    units = np.asarray(res.x)
    assert np.max(np.abs(units - np.round(units))) < 1e-6
    units = np.round(units).astype(np.int64)
    holding = sum(
        int(units[col]) * int(inst.holding_cost[i]) * (p - s)
        * (scale // int(inst.capacity_usage[i]))
        for col, (i, s, p) in enumerate(cols))
    setups = scale * int(inst.setup_cost @ allowed.sum(axis=1))
    return holding + setups


def _brute_force_estimate(inst, allowed):
    """Leaf count of full enumeration; used to keep the exhaustive tier small.

    Lots are continuous, so the indivisible thing being allocated is one
    capacity unit (1/K_i of an item), matching the solver's exact scaled
    representation.
    """
    total = 1
    for i in range(inst.n_items):
        for p in range(inst.n_periods):
            units = int(inst.demand[i, p]) * int(inst.capacity_usage[i])
            if units == 0:
                continue
            slots = sum(1 for s in range(p + 1) if allowed[i, s])
            if slots == 0:
                return 0
            total *= comb(units + slots - 1, units)
            if total > 20000:
                return total
    return total


def _brute_force_oracle(inst, allowed):
    """Exhaustive allocation of every capacity unit; None if infeasible."""
    scale = int(np.lcm.reduce(inst.capacity_usage))
    cells = []
    for i in range(inst.n_items):
        for p in range(inst.n_periods):
            if inst.demand[i, p] > 0:
                slots = [s for s in range(p + 1) if allowed[i, s]]
                if not slots:
                    return None
                units = int(inst.demand[i, p]) * int(inst.capacity_usage[i])
                cells.append((i, p, units, slots))
    best = [None]
    caps = inst.capacity.astype(np.int64).copy()

    def assign(index, holding):
        nonlocal caps
        if index == len(cells):
            if best[0] is None or holding < best[0]:
                best[0] = holding
            return
        i, p, units, slots = cells[index]
        unit_hold = int(inst.holding_cost[i]) * (scale // int(inst.capacity_usage[i]))
        for combo in combinations_with_replacement(slots, units):
            need = np.bincount(combo, minlength=len(caps))
            if np.any(need > caps):
                continue
            caps -= need
            added = sum(p - s for s in combo) * unit_hold
            assign(index + 1, holding + added)
            caps += need

    assign(0, 0)
    if best[0] is None:
        return None
    setups = scale * int(inst.setup_cost @ allowed.sum(axis=1))
    return best[0] + setups


def test_03_fixed_pattern_cost_matches_allocation_oracle():
    rng = np.random.default_rng(77)
    brute_checked = 0
    unit_usage_checked = 0
    for index in range(200):
        inst = _random_tiny(rng, k_hi=1 if index % 2 else 3)
        solver = FixedSetupSolver(inst)
        for _ in range(5):
            allowed = rng.random(inst.demand.shape) < rng.uniform(0.5, 1.0)
            result = solver.set_pattern(allowed)
            oracle = _lp_pattern_oracle(inst, allowed)
            if oracle is None:
                assert not result.ok
                continue
            assert result.ok
            assert result.total_scaled == oracle
            scale = result.plan.scale
            assert abs(result.total_scaled / scale - oracle / scale) <= 1e-6
            if np.all(inst.capacity_usage == 1):
                lots = result.plan.lots
                assert np.array_equal(lots, np.floor(lots))
                unit_usage_checked += 1
            if _brute_force_estimate(inst, allowed) <= 20000:
                assert _brute_force_oracle(inst, allowed) == oracle
                brute_checked += 1
    assert brute_checked >= 150
    assert unit_usage_checked >= 150


# -- criterion 4: improvement steps never lose ground ------------------------


def test_04_improvement_never_worse_and_restarts_beat_baseline(suite12, heinb12):
    for idx, (inst, base) in enumerate(zip(suite12, heinb12)):
        improved = run_tabu(inst, base.plan, TabuConfig(iteration_cap=2))
        assert improved.cost_scaled <= base.cost_scaled
        begin = _feasible_start(inst)
        assert run_le(inst, begin).cost_scaled <= cost_scaled(inst, begin)
        for scheme in (1, 2, 3):
            res = run_rpp(inst, scheme=scheme, strength=0.3, reps=4,
                          seed=(4, idx, scheme))
            assert res.cost_scaled <= base.cost_scaled


# -- criterion 5: constructive < randomized < adaptive method ordering -------


def test_05_average_gap_ordering_across_methods(suite12, heinb12, arpp3_m20):
    adaptive_results, _ = arpp3_m20
    costs = {"Gunther": [], "DixonSilver": [], "HeinB": [], "RPP3": [],
             "ARPP3": []}
    for idx, inst in enumerate(suite12):
        scale = inst.scale
        costs["Gunther"].append(run_pbp(inst, "Gunther").cost_scaled / scale)
        costs["DixonSilver"].append(
            run_pbp(inst, "DixonSilver").cost_scaled / scale)
        costs["HeinB"].append(heinb12[idx].cost_scaled / scale)
        costs["RPP3"].append(
            run_rpp(inst, scheme=3, strength=0.3, reps=20,
                    seed=idx).cost_scaled / scale)
        costs["ARPP3"].append(adaptive_results[idx].cost_scaled / scale)
    reference = [min(costs[m][i] for m in costs) for i in range(len(suite12))]
    avg = {m: float(np.mean([gap(c, r) for c, r in zip(costs[m], reference)]))
           for m in costs}
    assert avg["Gunther"] > avg["DixonSilver"]
    assert avg["DixonSilver"] >= avg["HeinB"]
    assert avg["HeinB"] > avg["RPP3"]
    assert avg["RPP3"] > avg["ARPP3"]

    if REFERENCE_FILE.exists():
        optima = read_reference(REFERENCE_FILE)
        ids = [inst.name for inst in suite12]
        if all(name in optima for name in ids):
            refs = [optima[name] for name in ids]
            hb = float(np.mean([gap(c, r)
                                for c, r in zip(costs["HeinB"], refs)]))
            ad = float(np.mean([gap(c, r)
                                for c, r in zip(costs["ARPP3"], refs)]))
            if not 2.14 <= hb <= 6.14:
                warnings.warn(f"HeinB gap vs optima {hb:.2f}% outside soft "
                              "band [2.14, 6.14]")
            if not 0.46 <= ad <= 3.46:
                warnings.warn(f"adaptive gap vs optima {ad:.2f}% outside "
                              "soft band [0.46, 3.46]")


# -- criterion 6: tuning curve convex in w, monotone in m --------------------


def test_06_strength_sweep_convex_in_w_and_monotone_in_m(sweep12):
    table = {(rec["m"], round(rec["w"], 2)): rec["avg_gap_pct"]
             for rec in sweep12}
    assert table[(100, 0.30)] < table[(100, 0.05)]
    assert table[(100, 0.30)] < table[(100, 0.90)]
    strengths = sorted({w for _, w in table})
    assert len(strengths) == 18
    for w in strengths:
        assert table[(100, w)] <= table[(20, w)] <= table[(5, w)]


# -- criterion 7: adaptive probing beats the full sweep ----------------------


def test_07_adaptive_probe_count_and_time_savings(suite12, arpp3_m20, sweep12):
    adaptive_results, adaptive_seconds = arpp3_m20
    assert max(res.probe_count for res in adaptive_results) <= 8
    sweep_seconds = sum(rec["avg_time_s"] for rec in sweep12
                        if rec["m"] == 20) * len(suite12)
    assert adaptive_seconds <= 0.5 * sweep_seconds


# -- criterion 8: combining restarts with tabu search pays on both sizes -----


def test_08_combined_method_improves_on_both_suite_sizes(suite12, suite24):
    for suite in (suite12, suite24):
        costs = {"HeinB": [], "ARPP3": [], "ARPP3-TS": []}
        for idx, inst in enumerate(suite):
            scale = inst.scale
            for method in costs:
                scaled, _ = run_method(method, inst, m=10, seed=idx,
                                       tabu_cap=2)
                costs[method].append(scaled / scale)
        reference = [min(costs[m][i] for m in costs)
                     for i in range(len(suite))]
        avg = {m: float(np.mean([gap(c, r)
                                 for c, r in zip(costs[m], reference)]))
               for m in costs}
        assert avg["ARPP3-TS"] < avg["ARPP3"] < avg["HeinB"]

    if REFERENCE_FILE.exists():
        optima = read_reference(REFERENCE_FILE)
        ids = [inst.name for inst in suite12]
        if all(name in optima for name in ids):
            gaps = []
            for idx, inst in enumerate(suite12):
                scaled, _ = run_method("ARPP3-TS", inst, m=500, seed=idx,
                                       tabu_cap=2)
                gaps.append(gap(scaled / inst.scale, optima[inst.name]))
            mean_gap = float(np.mean(gaps))
            if mean_gap > 2.0:
                warnings.warn(f"combined method gap vs optima {mean_gap:.2f}%"
                              " above soft 2.0% target")


# -- criterion 9: runtime ceilings -------------------------------------------


def test_09_runtime_ceilings(suite12, suite24):
    run_pbp(suite24[0])  # warm caches before timing
    t0 = time.perf_counter()
    run_rpp(suite12[0], scheme=3, strength=0.3, reps=20, seed=0)
    assert time.perf_counter() - t0 <= 1.0

    single = min(_timed(run_pbp, suite24[0]) for _ in range(3))
    assert single <= 0.05

    t0 = time.perf_counter()
    for inst in suite12:
        run_pbp(inst)
    assert time.perf_counter() - t0 <= 30.0


def _timed(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


# -- criterion 10: benchmark replay is byte-identical ------------------------


def test_10_bench_replay_is_byte_identical(tmp_path):
    config = {
        "suite": "12x12", "suite_seed": "0", "suite_reps": "1", "limit": "6",
        "methods": "HeinB,RPP3,ARPP3-TS,RLE2,LotElim",
        "m": "4", "w": "0.3", "seed": "7", "timing": "off",
        "reference": "best-found",
    }
    run_bench(config, tmp_path / "a")
    run_bench(config, tmp_path / "b")
    for name in ("results.csv", "aggregates.csv"):
        first = (tmp_path / "a" / name).read_bytes()
        second = (tmp_path / "b" / name).read_bytes()
        assert first == second
