"""Tabu search over setup patterns with single-slot flips.

The search state is the set of open setup slots.  A move flips one slot
(period 1 is never touched: with no opening inventory, first-period
setups cannot be traded away) and is evaluated by re-solving the
fixed-pattern subproblem.  Each iteration picks the cheapest neighbor;
a neighbor beating the incumbent best is always taken (aspiration by
objective), otherwise the cheapest non-tabu neighbor is taken, and if
every neighbor is tabu the cheapest one is taken anyway as an escape.
The accepted flip's (item, period, new state) triple is tabu for the
next ``theta`` iterations.

In restricted mode — meant for large instances, where evaluating every
flip is too slow — iterations follow a three-step cycle: two iterations
offering only closures of currently producing slots, then one offering
only openings of closed slots.

The search stops when the incumbent best reaches a caller-supplied
reference cost, when it fails to improve for ``non_improve_limit``
consecutive iterations, or at the optional iteration cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .flow import FixedSetupSolver
from .model import Instance, Plan, cost_scaled, is_feasible_plan

__all__ = ["TabuConfig", "TabuResult", "run_tabu", "tabu_tenure"]


def tabu_tenure(n_periods: int) -> int:
    """Default tenure: three fifths of the horizon, at least one iteration."""
    return max(1, 3 * n_periods // 5)


@dataclass(frozen=True)
class TabuConfig:
    theta: Optional[int] = None          # tenure; default tabu_tenure(T)
    non_improve_limit: int = 2
    iteration_cap: Optional[int] = None
    reference_scaled: Optional[int] = None  # stop once best <= this
    restricted: bool = False

    def __post_init__(self) -> None:
        if self.theta is not None and self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.non_improve_limit < 1:
            raise ValueError("non_improve_limit must be >= 1")
        if self.iteration_cap is not None and self.iteration_cap < 0:
            raise ValueError("iteration_cap must be >= 0")


@dataclass(frozen=True)
class TabuResult:
    plan: Plan
    cost_scaled: int
    iterations: int

    @property
    def cost(self) -> float:
        return self.cost_scaled / self.plan.scale


def _moves(instance: Instance, pattern, plan: Plan, iteration: int,
           restricted: bool) -> List[Tuple[int, int, bool]]:
    """Candidate flips (item, period, new_state) for this iteration."""
    n, t = instance.n_items, instance.n_periods
    if not restricted:
        return [(i, k, not pattern[i, k]) for k in range(1, t) for i in range(n)]
    if iteration % 3 != 0:  # iterations 1, 2, 4, 5, ...: close producing slots
        return [(i, k, False) for k in range(1, t) for i in range(n)
                if plan.lots_scaled[i, k] > 0]
    return [(i, k, True) for k in range(1, t) for i in range(n)
            if not pattern[i, k]]


def run_tabu(instance: Instance, initial_plan: Plan,
             config: TabuConfig = TabuConfig()) -> TabuResult:
    """Improve a feasible plan by tabu search; never returns a worse one."""
    if not is_feasible_plan(instance, initial_plan):
        raise ValueError("initial plan is infeasible for this instance")
    theta = config.theta if config.theta is not None else tabu_tenure(
        instance.n_periods)

    solver = FixedSetupSolver(instance)
    current = solver.set_pattern(initial_plan.setups)
    current_plan = initial_plan
    best_plan, best_cost = initial_plan, cost_scaled(instance, initial_plan)
    tabu_until: Dict[Tuple[int, int, bool], int] = {}
    iteration = 0
    non_improve = 0

    while True:
        if config.reference_scaled is not None and best_cost <= config.reference_scaled:
            break
        if config.iteration_cap is not None and iteration >= config.iteration_cap:
            break
        iteration += 1

        evaluated = []  # (total, period, item, new_state)
        for i, k, new_state in _moves(instance, solver.pattern,
                                      current_plan, iteration, config.restricted):
            trial = solver.eval_flip(i, k, open_slot=new_state)
            if trial.ok:
                evaluated.append((trial.total_scaled, k, i, new_state))
        if not evaluated:
            break
        evaluated.sort(key=lambda e: e[:3])

        chosen = None
        total, k, i, new_state = evaluated[0]
        if total < best_cost:
            chosen = evaluated[0]           # aspiration: tabu status ignored
        elif tabu_until.get((i, k, new_state), 0) < iteration:
            chosen = evaluated[0]
        else:
            for cand in evaluated[1:]:
                if tabu_until.get((cand[2], cand[1], cand[3]), 0) < iteration:
                    chosen = cand
                    break
            if chosen is None:
                chosen = evaluated[0]       # all tabu: least-bad escape
        total, k, i, new_state = chosen

        current = solver.commit_flip(i, k, open_slot=new_state)
        current_plan = current.plan
        tabu_until[(i, k, new_state)] = iteration + theta

        if total < best_cost:
            best_plan, best_cost = current_plan, cost_scaled(instance, current_plan)
            non_improve = 0
        else:
            non_improve += 1
            if non_improve >= config.non_improve_limit:
                break
    return TabuResult(best_plan, best_cost, iteration)
