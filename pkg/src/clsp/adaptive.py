"""Self-adaptive choice of the perturbation level by bisection on a grid.

The best perturbation level differs per instance, and a full sweep of the
grid is expensive.  This routine probes the smallest, middle, and largest
grid levels with randomized restarts, then repeatedly keeps the two
best-scoring levels as a bracket and probes the midpoint of their grid
indices, until the bracket collapses to adjacent indices, the midpoint is
already probed, or the best gap reaches the stop threshold (when a
reference cost is available to compute gaps; without one, raw costs rank
the probes — the ordering is identical).

Every probe runs the same restart procedure with a stream derived from
(seed, grid index), so a level is never probed twice and any probe can be
replayed in isolation.  The returned plan is the best across *all*
probes, not just the final bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .indices import RuleConfig
from .model import Instance, Plan
from .pbp import run_rpp

__all__ = ["DEFAULT_GRID", "GAP_STOP_PCT", "ArppResult", "run_arpp"]

# Perturbation levels 0.05, 0.10, ... 0.90.
DEFAULT_GRID: Tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(1, 19))

# Stop refining once the best probe is within 0.1 % of the reference.
GAP_STOP_PCT = 0.1


@dataclass(frozen=True)
class ArppResult:
    plan: Plan
    cost_scaled: int
    w_star: float
    probe_count: int
    probe_costs: Dict[float, int] = field(repr=False)

    @property
    def cost(self) -> float:
        return self.cost_scaled / self.plan.scale


def run_arpp(
    instance: Instance,
    *,
    scheme: int,
    reps: int,
    grid: Sequence[float] = DEFAULT_GRID,
    seed: Union[int, Sequence[int]] = 0,
    reference_scaled: Optional[int] = None,
    config: Union[str, RuleConfig] = "HeinB",
) -> ArppResult:
    """Restart search with a perturbation level tuned per instance."""
    grid = tuple(grid)
    if len(grid) < 3:
        raise ValueError("grid needs at least 3 perturbation levels")
    if sorted(set(grid)) != list(grid):
        raise ValueError("grid must be strictly increasing")
    seed_key = (
        (int(seed),) if isinstance(seed, (int, np.integer))
        else tuple(int(v) for v in seed)
    )

    probes: Dict[int, Tuple[int, Plan]] = {}

    def probe(idx: int) -> int:
        if idx not in probes:
            res = run_rpp(instance, scheme=scheme, strength=grid[idx],
                          reps=reps, seed=seed_key + (idx,), config=config)
            probes[idx] = (res.cost_scaled, res.plan)
        return probes[idx][0]

    def best_reached() -> bool:
        if reference_scaled is None:
            return False
        best = min(cost for cost, _ in probes.values())
        gap = (best - reference_scaled) / reference_scaled * 100.0
        return gap <= GAP_STOP_PCT

    lo, mid, hi = 0, (len(grid) - 1) // 2, len(grid) - 1
    for idx in (lo, mid, hi):
        probe(idx)
    bracket = [lo, mid, hi]
    while not best_reached():
        # keep the two cheapest probes of the bracket (ties: lower index)
        ranked = sorted(bracket, key=lambda idx: (probes[idx][0], idx))
        lo, hi = sorted(ranked[:2])
        if hi - lo <= 1:
            break
        mid = (lo + hi) // 2
        if mid in probes:
            break
        probe(mid)
        bracket = [lo, mid, hi]

    best_idx = min(probes, key=lambda idx: (probes[idx][0], idx))
    cost, plan = probes[best_idx]
    return ArppResult(plan, cost, grid[best_idx], len(probes),
                      {grid[i]: c for i, (c, _) in sorted(probes.items())})
