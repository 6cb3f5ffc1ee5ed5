"""Priority and feasibility indices for period-by-period lot consolidation.

The constructive heuristic walks the horizon left to right and, at each
period k, decides which future lots to pull into k's spare capacity.  Two
kinds of scores drive that decision:

* a *ranking/lot-sizing index* ``u`` -- estimated cost saving from merging an
  item's next lot into period k (positive means the merge pays for itself);

* a *feasibility index* ``v`` -- estimated cost of force-shifting one
  capacity unit of an item into period k when future capacity is short
  (always non-positive; the least-bad item wins).

All scores are computed from a small bundle of per-candidate quantities
(:class:`SlotQuantities`) so each formula is a pure function that can be
pinned by hand-computed tests.  For an item i with its current lot in period
k and a candidate lot in period t:

* ``t1`` / ``h1`` / ``d1`` describe keeping the split: t1 is the number of
  periods covered by the lot at k (up to the next positive lot), h1 the
  holding cost accumulated by demand in that span, d1 the demand covered.
* ``t2`` / ``h2`` / ``d2`` describe the merge: the span extends through t.
* ``delta = t - k`` is how far the candidate lot would be carried.
* ``lot`` / ``lot_load`` are the candidate lot size and its capacity load.
* ``move_cap`` is the largest quantity of the item's period-t demand that
  still fits into k's remaining headroom after earlier shortfalls reserve
  their share.
* ``tbo`` is the economic time between orders, sqrt(2 S / (h * mean demand));
  ``batch_gain`` the estimated saving of batching at that interval instead
  of ordering every period; ``future_rate`` the average production per
  remaining period.

Rule sets are named by configuration (:data:`PRESETS`); a configuration
may use different formulas for ranking, for the merge-eligibility test, and
for feasibility shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict

__all__ = [
    "ELIGIBILITY_TOL",
    "NEG_INF",
    "PRESETS",
    "RANKING_RULES",
    "FEASIBILITY_RULES",
    "RuleConfig",
    "SlotQuantities",
    "batch_gain",
    "evaluate_feasibility",
    "evaluate_ranking",
    "time_between_orders",
]

NEG_INF = float("-inf")

# A merge is eligible while its lot-sizing index is not meaningfully negative.
ELIGIBILITY_TOL = -1e-9


def time_between_orders(setup: float, holding: float, mean_demand: float) -> float:
    """Economic reorder interval in periods; 1.0 when there is no trade-off."""
    rate = holding * mean_demand
    if rate <= 0.0:
        return 1.0
    return math.sqrt(2.0 * setup / rate)


def batch_gain(setup: float, holding: float, mean_demand: float, tbo: float) -> float:
    """Estimated saving per cycle of ordering every ``tbo`` periods.

    Batching tbo periods of average demand saves (tbo - 1) setups and pays
    for carrying the later periods' demand; zero when tbo collapses to 1.
    """
    return setup * (tbo - 1.0) - tbo * (tbo - 1.0) * mean_demand * holding / 2.0


@dataclass(frozen=True)
class SlotQuantities:
    """Everything a rule may look at for one (item, candidate period) pair."""

    setup: float        # setup cost S_i (possibly perturbed for indices)
    holding: float      # holding cost h_i
    usage: int          # capacity units per unit produced, K_i
    t1: int             # periods covered by the lot at k before the merge
    t2: int             # periods covered after the merge (through t)
    delta: int          # t - k, carry distance of the candidate lot
    h1: float           # holding paid on demand in [k, k + t1)
    h2: float           # holding paid on demand in [k, t]
    d1: float           # demand covered in [k, k + t1)
    d2: float           # demand covered in [k, t]
    lot: float          # candidate lot x[i, t] in natural units
    lot_load: float     # K_i * lot, capacity units the merge claims
    move_cap: float     # largest demand quantity shiftable into k's headroom
    tbo: float          # economic time between orders
    gain: float         # batching saving at the tbo interval
    future_rate: float  # average future production per remaining period


# -- ranking / lot-sizing formulas -------------------------------------------


def _silver_meal(q: SlotQuantities) -> float:
    """Cost-per-period saving of extending the period-k lot through t."""
    return (q.setup + q.h1) / q.t1 - (q.setup + q.h2) / q.t2


def _least_unit_cost(q: SlotQuantities) -> float:
    """Cost-per-unit saving of the merge; undefined without demand."""
    if q.d1 <= 0.0 or q.d2 <= 0.0:
        return NEG_INF
    return (q.setup + q.h1) / q.d1 - (q.setup + q.h2) / q.d2


def _absolute_cost(q: SlotQuantities) -> float:
    """Setup saved minus holding added by carrying the candidate lot."""
    return q.setup - q.holding * q.delta * q.lot


def _dixon_silver(q: SlotQuantities) -> float:
    """Per-period saving normalised by the capacity the merge claims."""
    if q.lot_load <= 0.0:
        return NEG_INF
    return _silver_meal(q) / q.lot_load


def _gunther(q: SlotQuantities) -> float:
    """Absolute saving normalised by the capacity the merge claims."""
    if q.lot_load <= 0.0:
        return NEG_INF
    return _absolute_cost(q) / q.lot_load


def _least_total_cost(q: SlotQuantities) -> float:
    """Setup saved versus total holding of the merged span."""
    return q.setup - q.h2


def _interval_weighted_rank(q: SlotQuantities) -> float:
    """Batching attractiveness: economic gain scaled by production rate."""
    if q.usage <= 0:
        return NEG_INF
    return q.gain * q.future_rate / q.usage


def _interval_capped_saving(q: SlotQuantities) -> float:
    """Capacity-normalised saving, damped beyond the economic interval.

    Positive savings are multiplied by tbo / (tbo + overshoot), where the
    overshoot is how far the merge reaches past the item's economic reorder
    interval.  The factor is 1 inside the interval and decays hyperbolically
    beyond it, so near-interval merges are preferred while the eligibility
    sign of the plain capacity-normalised saving is preserved.
    """
    if q.lot_load <= 0.0:
        return NEG_INF
    saving = _dixon_silver(q)
    if saving <= 0.0:
        return saving
    overshoot = max(0.0, q.delta - q.tbo)
    return saving * q.tbo / (q.tbo + overshoot)


# -- feasibility formulas -----------------------------------------------------


def _feas_unit_holding(q: SlotQuantities) -> float:
    """Holding added per capacity unit force-shifted over delta periods."""
    return -q.holding * q.delta / q.usage


def _feas_move_quantity(q: SlotQuantities) -> float:
    """Holding added by shifting the largest still-fitting quantity."""
    return -q.holding * q.delta * q.move_cap


def _feas_interval_slack(q: SlotQuantities) -> float:
    """Unit-holding burden discounted for items still inside their interval."""
    slack = max(0.0, q.delta - q.tbo)
    return -q.holding * (q.delta + slack) / q.usage


RANKING_RULES: Dict[str, Callable[[SlotQuantities], float]] = {
    "silver_meal": _silver_meal,
    "least_unit_cost": _least_unit_cost,
    "absolute_cost": _absolute_cost,
    "dixon_silver": _dixon_silver,
    "gunther": _gunther,
    "least_total_cost": _least_total_cost,
    "interval_weighted_rank": _interval_weighted_rank,
    "interval_capped_saving": _interval_capped_saving,
}

FEASIBILITY_RULES: Dict[str, Callable[[SlotQuantities], float]] = {
    "unit_holding": _feas_unit_holding,
    "move_quantity": _feas_move_quantity,
    "interval_slack": _feas_interval_slack,
}


def evaluate_ranking(rule: str, q: SlotQuantities) -> float:
    return RANKING_RULES[rule](q)


def evaluate_feasibility(rule: str, q: SlotQuantities) -> float:
    return FEASIBILITY_RULES[rule](q)


@dataclass(frozen=True)
class RuleConfig:
    """Which formula ranks items, gates merges, and drives forced shifts."""

    rank: str
    lot: str
    feas: str

    def __post_init__(self) -> None:
        if self.rank not in RANKING_RULES:
            raise ValueError(f"unknown ranking rule {self.rank!r}")
        if self.lot not in RANKING_RULES:
            raise ValueError(f"unknown lot-sizing rule {self.lot!r}")
        if self.feas not in FEASIBILITY_RULES:
            raise ValueError(f"unknown feasibility rule {self.feas!r}")


def _classic(rule: str, feas: str = "unit_holding") -> RuleConfig:
    return RuleConfig(rank=rule, lot=rule, feas=feas)


PRESETS: Dict[str, RuleConfig] = {
    "Gunther": _classic("gunther", feas="move_quantity"),
    "DixonSilver": _classic("dixon_silver"),
    "HeinA1": RuleConfig(rank="interval_weighted_rank", lot="dixon_silver",
                         feas="interval_slack"),
    "HeinA2_LUC": RuleConfig(rank="interval_weighted_rank", lot="least_unit_cost",
                             feas="interval_slack"),
    "HeinA2_SM": RuleConfig(rank="interval_weighted_rank", lot="silver_meal",
                            feas="interval_slack"),
    "HeinA3_LTC": RuleConfig(rank="interval_weighted_rank", lot="least_total_cost",
                             feas="interval_slack"),
    "HeinA3_AC": RuleConfig(rank="interval_weighted_rank", lot="absolute_cost",
                            feas="interval_slack"),
    "HeinB": RuleConfig(rank="interval_capped_saving", lot="interval_capped_saving",
                        feas="interval_slack"),
}
