"""Period-by-period construction heuristic and its randomized restarts."""

import numpy as np
import pytest

from clsp.flow import exact_optimum
from clsp.indices import PRESETS, RuleConfig
from clsp.model import (
    InfeasibleInstanceError,
    Instance,
    cost_scaled,
    is_feasible_plan,
)
from clsp.pbp import PERTURBATION_SCHEMES, run_pbp, run_rpp


def make(demand, capacity, setup, holding=1, usage=1):
    demand = np.atleast_2d(np.asarray(demand, dtype=np.int64))
    n = demand.shape[0]

    def vec(v):
        return np.full(n, v, dtype=np.int64) if np.isscalar(v) else np.asarray(v, np.int64)

    return Instance(demand=demand, capacity=np.asarray(capacity, dtype=np.int64),
                    setup_cost=vec(setup), holding_cost=vec(holding),
                    capacity_usage=vec(usage))


def random_instance(rng, max_items=3, max_periods=5, demand_hi=9):
    """Small instances with enough slack to be feasible most of the time."""
    n = int(rng.integers(1, max_items + 1))
    t = int(rng.integers(2, max_periods + 1))
    d = rng.integers(0, demand_hi, (n, t))
    k = rng.integers(1, 4, n)
    load = int((k[:, None] * d).sum())
    c = rng.integers(max(1, load // t), max(2, 2 * load // t + 1), t)
    return Instance(demand=d, capacity=c, setup_cost=rng.integers(1, 40, n),
                    holding_cost=rng.integers(0, 4, n), capacity_usage=k)


class TestConstruction:
    def test_single_item_merge(self):
        # Carrying 4 units one period (cost 4) beats a second setup (cost 10).
        inst = make([3, 4], [10, 10], setup=10)
        for name in PRESETS:
            res = run_pbp(inst, name)
            assert res.plan.lots.tolist() == [[7.0, 0.0]]
            assert res.cost_scaled == 14

    def test_merge_dominates_under_expensive_setups(self):
        # Tight later periods force production forward; with S=100 batching
        # everything into period 1 saves two setups.
        inst = make([3, 3, 3], [10, 2, 2], setup=100)
        res = run_pbp(inst, "HeinB")
        assert res.plan.lots.tolist() == [[9.0, 0.0, 0.0]]
        assert res.cost_scaled == 109

    def test_forced_shifts_move_the_minimum(self):
        # With S=1 no merge pays; only the capacity deficit (2 units after
        # period 1, one more after period 2) is pulled forward.
        inst = make([3, 3, 3], [10, 2, 2], setup=1)
        for name in PRESETS:
            res = run_pbp(inst, name)
            assert res.plan.lots.tolist() == [[5.0, 2.0, 2.0]]
            assert res.cost_scaled == 6

    def test_partial_shift_with_heavy_usage(self):
        # K=3: the period-2 deficit of 9 capacity units moves 3 demand units.
        inst = make([4, 4], [24, 3], setup=1, usage=3)
        res = run_pbp(inst, "HeinB")
        assert res.plan.lots.tolist() == [[7.0, 1.0]]
        assert res.plan.scale == 3
        assert res.cost_scaled == 15
        assert res.cost_scaled == exact_optimum(inst).total_scaled

    def test_cost_property_rescales_to_natural_units(self):
        inst = make([4, 4], [24, 3], setup=1, usage=3)
        res = run_pbp(inst, "HeinB")
        assert res.cost == pytest.approx(5.0)

    def test_infeasible_instance_raises(self):
        inst = make([5, 0], [1, 100], setup=1)
        with pytest.raises(InfeasibleInstanceError):
            run_pbp(inst, "HeinB")

    def test_accepts_config_object(self):
        inst = make([3, 4], [10, 10], setup=10)
        cfg = RuleConfig(rank="gunther", lot="gunther", feas="unit_holding")
        assert run_pbp(inst, cfg).cost_scaled == 14

    def test_deterministic_without_perturbation(self):
        rng = np.random.default_rng(7)
        inst = random_instance(rng)
        a = run_pbp(inst, "DixonSilver")
        b = run_pbp(inst, "DixonSilver")
        assert a.plan == b.plan and a.cost_scaled == b.cost_scaled

    def test_feasible_and_costed_on_random_instances(self):
        rng = np.random.default_rng(123)
        checked = 0
        while checked < 40:
            inst = random_instance(rng)
            try:
                results = {name: run_pbp(inst, name) for name in PRESETS}
            except InfeasibleInstanceError:
                continue
            optimum = exact_optimum(inst).total_scaled
            for res in results.values():
                assert is_feasible_plan(inst, res.plan)
                assert cost_scaled(inst, res.plan) == res.cost_scaled
                assert res.cost_scaled >= optimum
            checked += 1


class TestPerturbationValidation:
    def test_schemes(self):
        assert PERTURBATION_SCHEMES == (1, 2, 3)

    def test_bad_scheme(self):
        inst = make([3, 4], [10, 10], setup=10)
        with pytest.raises(ValueError):
            run_pbp(inst, scheme=4, strength=0.1, rng=np.random.default_rng(0))

    def test_bad_strength(self):
        inst = make([3, 4], [10, 10], setup=10)
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            run_pbp(inst, scheme=1, strength=-0.1, rng=rng)
        with pytest.raises(ValueError):
            run_pbp(inst, scheme=1, strength=1.5, rng=rng)
        # multiplicative schemes exclude strength 1.0; scheme 1 allows it
        with pytest.raises(ValueError):
            run_pbp(inst, scheme=2, strength=1.0, rng=rng)
        with pytest.raises(ValueError):
            run_rpp(inst, scheme=3, strength=1.0, reps=1)

    def test_perturbed_run_needs_rng(self):
        inst = make([3, 4], [10, 10], setup=10)
        with pytest.raises(ValueError):
            run_pbp(inst, scheme=1, strength=0.2)

    def test_negative_reps(self):
        inst = make([3, 4], [10, 10], setup=10)
        with pytest.raises(ValueError):
            run_rpp(inst, scheme=1, strength=0.2, reps=-1)


@pytest.fixture(scope="module")
def inst():
    rng = np.random.default_rng(42)
    while True:
        cand = random_instance(rng, max_items=3, max_periods=5)
        try:
            run_pbp(cand, "HeinB")
        except InfeasibleInstanceError:
            continue
        return cand


class TestRandomizedRestarts:

    def test_zero_strength_replicates_plain_run(self, inst):
        plain = run_pbp(inst, "HeinB")
        for scheme in PERTURBATION_SCHEMES:
            res = run_rpp(inst, scheme=scheme, strength=0.0, reps=6, seed=5)
            assert res.chosen_rep == 0
            assert res.cost_scaled == plain.cost_scaled
            assert res.plan == plain.plan
            assert set(res.rep_costs) == {plain.cost_scaled}

    def test_never_worse_than_plain(self, inst):
        plain = run_pbp(inst, "HeinB")
        for scheme in PERTURBATION_SCHEMES:
            res = run_rpp(inst, scheme=scheme, strength=0.4, reps=12, seed=1)
            assert res.cost_scaled <= plain.cost_scaled
            assert is_feasible_plan(inst, res.plan)

    def test_rep_costs_bookkeeping(self, inst):
        res = run_rpp(inst, scheme=2, strength=0.3, reps=10, seed=9)
        assert len(res.rep_costs) == 11
        assert res.cost_scaled == min(res.rep_costs)
        assert res.rep_costs.index(res.cost_scaled) == res.chosen_rep

    def test_restart_streams_nest(self, inst):
        small = run_rpp(inst, scheme=3, strength=0.5, reps=5, seed=3)
        large = run_rpp(inst, scheme=3, strength=0.5, reps=15, seed=3)
        assert large.rep_costs[:6] == small.rep_costs
        assert large.cost_scaled <= small.cost_scaled

    def test_seed_determinism(self, inst):
        a = run_rpp(inst, scheme=1, strength=0.6, reps=8, seed=11)
        b = run_rpp(inst, scheme=1, strength=0.6, reps=8, seed=11)
        assert a.rep_costs == b.rep_costs and a.plan == b.plan

    def test_tuple_seed_keys(self, inst):
        a = run_rpp(inst, scheme=2, strength=0.4, reps=8, seed=(7, 0))
        b = run_rpp(inst, scheme=2, strength=0.4, reps=8, seed=(7, 1))
        c = run_rpp(inst, scheme=2, strength=0.4, reps=8, seed=(7, 0))
        assert a.rep_costs == c.rep_costs
        assert a.rep_costs[0] == b.rep_costs[0]  # candidate 0 is unperturbed

    def test_zero_reps_is_plain_run(self, inst):
        plain = run_pbp(inst, "HeinB")
        res = run_rpp(inst, scheme=1, strength=0.8, reps=0, seed=2)
        assert res.chosen_rep == 0
        assert res.plan == plain.plan
        assert res.rep_costs == (plain.cost_scaled,)

    def test_perturbed_plans_stay_feasible(self):
        rng = np.random.default_rng(77)
        checked = 0
        while checked < 10:
            inst = random_instance(rng)
            try:
                plain = run_pbp(inst, "HeinB")
            except InfeasibleInstanceError:
                continue
            for scheme in PERTURBATION_SCHEMES:
                res = run_rpp(inst, scheme=scheme, strength=0.7, reps=8,
                              seed=checked, config="DixonSilver")
                assert is_feasible_plan(inst, res.plan)
                assert cost_scaled(inst, res.plan) == res.cost_scaled
            checked += 1
