"""Lot elimination: close setups one at a time, keeping strict improvements.

The improvement pass scans periods from the horizon backwards.  In each
period it considers the items currently producing there, most expensive
setup first, and tentatively forbids the slot.  The fixed-pattern
subproblem is re-solved over the reduced pattern; the closure sticks only
if the total cost strictly decreases, otherwise the slot is restored.
Slots can only ever be removed — re-opening them is the tabu search's job.

Two randomized variants re-run the pass with perturbed decisions and keep
the best outcome:

* ``RLE1`` multiplies each item's setup cost by a uniform draw from
  [1-w, 1+w] once per pass; the noisy values change only the scan *order*,
  acceptance always compares true costs.
* ``RLE2`` draws r in [0, 1) per candidate slot and attempts the closure
  only when r > w, so w is the probability of skipping a candidate.

Both run the pass ``m + 1`` times: candidate 0 uses unperturbed setup
costs (for RLE2 the skip gate still applies — at w = 1 every pass leaves
the input untouched), candidates 1..m use streams derived from the seed.
The cheapest resulting plan wins; ties keep the earliest candidate, so
RLE1 at w = 0 reproduces the deterministic pass exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .flow import FixedSetupSolver
from .model import Instance, Plan, cost_scaled, is_feasible_plan
from .pbp import _rep_rng

__all__ = ["LE_VARIANTS", "LeConfig", "LeResult", "run_le"]

LE_VARIANTS = ("Deterministic", "RLE1", "RLE2")


@dataclass(frozen=True)
class LeConfig:
    """Variant selection plus perturbation knobs (ignored when deterministic)."""

    variant: str = "Deterministic"
    w: float = 0.0
    m: int = 0
    seed: Union[int, Sequence[int]] = 0

    def __post_init__(self) -> None:
        if self.variant not in LE_VARIANTS:
            raise ValueError(f"variant must be one of {LE_VARIANTS}")
        if not 0.0 <= self.w <= 1.0:
            raise ValueError("perturbation level w must lie in [0, 1]")
        if self.m < 0:
            raise ValueError("repetitions m must be >= 0")


@dataclass(frozen=True)
class LeResult:
    plan: Plan
    cost_scaled: int
    eliminated: int          # slots closed in the winning pass
    chosen_rep: int
    rep_costs: Tuple[int, ...] = field(repr=False)

    @property
    def cost(self) -> float:
        return self.cost_scaled / self.plan.scale


def _elimination_pass(
    instance: Instance,
    solver: FixedSetupSolver,
    initial_plan: Plan,
    initial_cost: int,
    order_setup: np.ndarray,
    gate_w: float,
    gate_rng: Optional[np.random.Generator],
) -> Tuple[Plan, int, int]:
    """One backwards sweep; returns (plan, true cost, closures accepted)."""
    if not solver.set_pattern(initial_plan.setups).ok:
        raise ValueError("initial plan is infeasible for this instance")
    plan, cost, eliminated = initial_plan, initial_cost, 0
    for k in range(instance.n_periods - 1, -1, -1):
        members = [i for i in range(instance.n_items) if plan.lots_scaled[i, k] > 0]
        members.sort(key=lambda i: (-order_setup[i], i))
        for i in members:
            if gate_rng is not None and gate_rng.random() <= gate_w:
                continue
            trial = solver.eval_flip(i, k, open_slot=False)
            if trial.ok and trial.total_scaled < cost:
                solver.commit_flip(i, k, open_slot=False)
                plan, cost = trial.plan, trial.total_scaled
                eliminated += 1
    if eliminated:
        cost = cost_scaled(instance, plan)
    return plan, cost, eliminated


def run_le(instance: Instance, initial_plan: Plan,
           config: LeConfig = LeConfig()) -> LeResult:
    """Best plan over the deterministic pass and any randomized repetitions."""
    if not is_feasible_plan(instance, initial_plan):
        raise ValueError("initial plan is infeasible for this instance")
    initial_cost = cost_scaled(instance, initial_plan)
    solver = FixedSetupSolver(instance)
    setup = instance.setup_cost.astype(np.float64)
    seed_key = (
        (int(config.seed),) if isinstance(config.seed, (int, np.integer))
        else tuple(int(v) for v in config.seed)
    )

    def one_pass(rep: int) -> Tuple[Plan, int, int]:
        rng = _rep_rng(seed_key, rep)
        order = setup
        gate_rng = None
        if config.variant == "RLE1" and rep > 0:
            order = setup * rng.uniform(1.0 - config.w, 1.0 + config.w,
                                        instance.n_items)
        elif config.variant == "RLE2":
            gate_rng = rng
        return _elimination_pass(instance, solver, initial_plan, initial_cost,
                                 order, config.w, gate_rng)

    reps = 0 if config.variant == "Deterministic" else config.m
    best_plan, best_cost, best_elim = one_pass(0)
    best_rep, costs = 0, [best_cost]
    for rep in range(1, reps + 1):
        plan, cost, elim = one_pass(rep)
        costs.append(cost)
        if cost < best_cost:
            best_plan, best_cost, best_elim, best_rep = plan, cost, elim, rep
    return LeResult(best_plan, best_cost, best_elim, best_rep, tuple(costs))
