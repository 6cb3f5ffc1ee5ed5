"""Data model for the multi-item capacitated lot-sizing problem (CLSP).

N items share one renewable resource over T periods.  Producing one unit of
item i consumes ``K[i]`` units of the period capacity ``C[t]``.  Every period
in which item i produces anything incurs its setup cost ``S[i]``; every unit
of item i carried in end-of-period inventory incurs ``h[i]``.  Demand
``d[i, t]`` must be met without backlog and with zero initial inventory, so
total cost = setup cost + holding cost (unit production cost is constant
across feasible plans and therefore dropped).

Exactness convention
--------------------
All instance data are integers.  Lot matrices are stored as integers scaled
by ``instance.scale`` (the lcm of all ``K[i]``): every quantity the solvers
can produce -- including fractional pre-production amounts of the form
``q / K[i]`` -- is then represented exactly, and plan costs compare as exact
integers in "scaled money" units (money times ``scale``).  Floats appear only
in user-facing summaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

__all__ = [
    "Instance",
    "InfeasibleInstanceError",
    "Plan",
    "CostBreakdown",
    "PlanIssue",
    "lot_for_lot",
    "inventory_scaled",
    "cost_scaled",
    "evaluate_cost",
    "check_plan",
    "is_feasible_plan",
    "instance_feasible",
]


class InfeasibleInstanceError(ValueError):
    """Raised when no plan can satisfy demand within the given capacity."""


def _int_array(values, shape_name: str, ndim: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != ndim:
        raise ValueError(f"{shape_name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{shape_name} must be non-empty")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.allclose(arr, rounded, rtol=0, atol=1e-9):
            raise ValueError(f"{shape_name} must be integral")
        arr = rounded
    arr = arr.astype(np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """One CLSP instance.

    Arrays are normalised to read-only int64 on construction.

    demand          -- (N, T) demand d[i, t], >= 0
    capacity        -- (T,)  shared capacity C[t], >= 0
    setup_cost      -- (N,)  S[i], >= 0
    holding_cost    -- (N,)  h[i], >= 0
    capacity_usage  -- (N,)  K[i], >= 1 capacity units per unit produced
    """

    demand: np.ndarray
    capacity: np.ndarray
    setup_cost: np.ndarray
    holding_cost: np.ndarray
    capacity_usage: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        d = _int_array(self.demand, "demand", 2)
        n, t = d.shape
        c = _int_array(self.capacity, "capacity", 1)
        s = _int_array(self.setup_cost, "setup_cost", 1)
        h = _int_array(self.holding_cost, "holding_cost", 1)
        k = _int_array(self.capacity_usage, "capacity_usage", 1)
        if c.shape != (t,):
            raise ValueError(f"capacity must have length {t}, got {c.shape}")
        for name, arr in (("setup_cost", s), ("holding_cost", h), ("capacity_usage", k)):
            if arr.shape != (n,):
                raise ValueError(f"{name} must have length {n}, got {arr.shape}")
        if (d < 0).any():
            raise ValueError("demand must be non-negative")
        if (c < 0).any():
            raise ValueError("capacity must be non-negative")
        if (s < 0).any() or (h < 0).any():
            raise ValueError("costs must be non-negative")
        if (k < 1).any():
            raise ValueError("capacity_usage must be >= 1")
        object.__setattr__(self, "demand", d)
        object.__setattr__(self, "capacity", c)
        object.__setattr__(self, "setup_cost", s)
        object.__setattr__(self, "holding_cost", h)
        object.__setattr__(self, "capacity_usage", k)

    @property
    def n_items(self) -> int:
        return self.demand.shape[0]

    @property
    def n_periods(self) -> int:
        return self.demand.shape[1]

    @cached_property
    def scale(self) -> int:
        """Common denominator for exactly representable lot quantities."""
        return math.lcm(*(int(k) for k in self.capacity_usage))

    def describe(self) -> str:
        return (
            f"{self.name or 'instance'}: {self.n_items} items x {self.n_periods} periods, "
            f"total demand {int(self.demand.sum())}"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self.name == other.name and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("demand", "capacity", "setup_cost", "holding_cost",
                      "capacity_usage")
        )

    def __hash__(self) -> int:
        return hash((self.name, self.demand.tobytes(), self.capacity.tobytes(),
                     self.setup_cost.tobytes(), self.holding_cost.tobytes(),
                     self.capacity_usage.tobytes()))


@dataclass(frozen=True, eq=False)
class Plan:
    """A production plan: lot sizes per item and period.

    ``lots_scaled[i, t]`` is the lot of item i in period t multiplied by
    ``scale``.  Setup indicators are derived (a setup is paid exactly where a
    lot is positive); inventory is derived from lots and demand.  Plans never
    carry paid-but-unused setups.
    """

    lots_scaled: np.ndarray
    scale: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.lots_scaled, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "lots_scaled", arr)

    @classmethod
    def from_lots(cls, instance: Instance, lots) -> "Plan":
        """Build a plan from a lot matrix in natural units.

        Accepts integer lots or floats that are exact multiples of
        ``1 / instance.scale`` (anything else raises ValueError).
        """
        arr = np.asarray(lots, dtype=np.float64)
        if arr.shape != instance.demand.shape:
            raise ValueError(
                f"lots must have shape {instance.demand.shape}, got {arr.shape}"
            )
        scaled = arr * instance.scale
        rounded = np.rint(scaled)
        if not np.allclose(scaled, rounded, rtol=0, atol=1e-6):
            raise ValueError(
                f"lots must be multiples of 1/{instance.scale} for this instance"
            )
        if (rounded < 0).any():
            raise ValueError("lots must be non-negative")
        return cls(rounded.astype(np.int64), instance.scale)

    @property
    def lots(self) -> np.ndarray:
        """Lot sizes in natural units (float array)."""
        return self.lots_scaled / self.scale

    @property
    def setups(self) -> np.ndarray:
        """Derived setup indicators y[i, t] = (lot > 0)."""
        return self.lots_scaled > 0

    def with_lots_scaled(self, lots_scaled: np.ndarray) -> "Plan":
        return Plan(lots_scaled, self.scale)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Plan):
            return NotImplemented
        return self.scale == other.scale and np.array_equal(
            self.lots_scaled, other.lots_scaled
        )

    def __hash__(self) -> int:
        return hash((self.scale, self.lots_scaled.tobytes()))


@dataclass(frozen=True)
class CostBreakdown:
    """Plan cost split into components (natural money units)."""

    setup_total: float
    holding_total: float
    total: float


@dataclass(frozen=True)
class PlanIssue:
    """One constraint violation found by check_plan.

    kind is one of "negative-lot", "shortage" (negative inventory, i.e.
    unmet demand) or "capacity" (period overload); amount is the violation
    magnitude in natural units (capacity units for "capacity").
    """

    kind: str
    item: Optional[int]
    period: int
    amount: float


def lot_for_lot(instance: Instance) -> Plan:
    """The x = d plan: produce each period's demand in that period."""
    return Plan(instance.demand * instance.scale, instance.scale)


def inventory_scaled(instance: Instance, plan: Plan) -> np.ndarray:
    """End-of-period inventory, scaled by ``instance.scale``.

    Negative entries mean unmet demand (the plan is infeasible).
    """
    net = plan.lots_scaled - instance.demand * plan.scale
    return np.cumsum(net, axis=1)


def cost_scaled(instance: Instance, plan: Plan) -> int:
    """Total cost in scaled money units (money * instance.scale).

    Exact integer; the unit of comparison used throughout the solvers.
    Only meaningful for plans without shortages.
    """
    setup_total = int(np.dot(instance.setup_cost, (plan.lots_scaled > 0).sum(axis=1)))
    inv = inventory_scaled(instance, plan)
    holding = int(np.dot(instance.holding_cost, inv.sum(axis=1)))
    return setup_total * plan.scale + holding


def evaluate_cost(instance: Instance, plan: Plan) -> CostBreakdown:
    """Setup/holding/total cost of a plan in natural money units."""
    setup_total = int(np.dot(instance.setup_cost, (plan.lots_scaled > 0).sum(axis=1)))
    inv = inventory_scaled(instance, plan)
    holding_scaled = int(np.dot(instance.holding_cost, inv.sum(axis=1)))
    holding = holding_scaled / plan.scale
    return CostBreakdown(float(setup_total), holding, setup_total + holding)


def check_plan(instance: Instance, plan: Plan) -> list[PlanIssue]:
    """All constraint violations of a plan (empty list = feasible)."""
    issues: list[PlanIssue] = []
    scale = plan.scale
    x = plan.lots_scaled
    for item, period in zip(*np.nonzero(x < 0)):
        issues.append(
            PlanIssue("negative-lot", int(item), int(period), float(x[item, period] / scale))
        )
    inv = inventory_scaled(instance, plan)
    for item, period in zip(*np.nonzero(inv < 0)):
        issues.append(
            PlanIssue("shortage", int(item), int(period), float(-inv[item, period] / scale))
        )
    used = instance.capacity_usage @ x  # scaled capacity units per period
    excess = used - instance.capacity * scale
    for period in np.nonzero(excess > 0)[0]:
        issues.append(
            PlanIssue("capacity", None, int(period), float(excess[period] / scale))
        )
    return issues


def is_feasible_plan(instance: Instance, plan: Plan) -> bool:
    return not check_plan(instance, plan)


def instance_feasible(instance: Instance) -> bool:
    """Whether any feasible plan exists.

    With zero initial inventory and free earlier production, an instance is
    feasible iff cumulative capacity covers cumulative requirements:
    for every t, sum_{s<=t} sum_i K[i] d[i,s] <= sum_{s<=t} C[s].
    """
    requirement = instance.capacity_usage @ instance.demand
    return bool(
        (np.cumsum(requirement) <= np.cumsum(instance.capacity)).all()
    )
