"""Period-by-period plan construction and its randomized restarts.

The constructive heuristic starts from lot-for-lot (produce each demand in
its own period) and walks the horizon left to right.  At each period k it
uses the spare capacity s_k to pull future lots forward:

1. *Lot sizing.*  Items with a lot in k and another lot inside the active
   window compete for k's slack.  The configured ranking index picks the
   most attractive item; the merge happens if the lot-sizing index says it
   pays for itself (within tolerance) and the lot fits.  The window reaches
   up to the first future period where cumulative capacity runs short.

2. *Feasibility shifts.*  If the periods after k are collectively short of
   capacity, work must move into k regardless of cost.  The maximum
   cumulative shortfall Q is relocated, item by item, choosing the least-bad
   item by the configured feasibility index; the last shift may be partial.

Bookkeeping after each merge is incremental: only the moved item's indices
are refreshed unless the move closed the whole window shortfall, in which
case the window and every index are recomputed.

Randomized restarts (:func:`run_rpp`) repeat the construction with one of
three perturbation schemes and keep the cheapest plan:

* scheme 1 replaces the configured rule set, per period, by one of five
  classic rules with probability ``strength``;
* scheme 2 multiplies every freshly computed index by a factor drawn from
  U[1-strength, 1+strength] (one draw per item per refresh);
* scheme 3 multiplies each item's setup cost as seen by the ranking and
  lot-sizing rules by a per-run factor from U[1-strength, 1+strength]; the
  reorder-interval quantities and the final plan cost still use the true
  setup costs.

Candidate 0 is always the unperturbed construction, so the restart winner is
never worse than the plain heuristic, and ``strength = 0`` reproduces it
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .indices import (
    ELIGIBILITY_TOL,
    NEG_INF,
    PRESETS,
    RuleConfig,
    SlotQuantities,
    batch_gain,
    evaluate_feasibility,
    evaluate_ranking,
    time_between_orders,
)
from .model import (
    InfeasibleInstanceError,
    Instance,
    Plan,
    cost_scaled,
    instance_feasible,
)

__all__ = [
    "PbpResult",
    "RppResult",
    "run_pbp",
    "run_rpp",
    "PERTURBATION_SCHEMES",
]

PERTURBATION_SCHEMES = (1, 2, 3)

# Rule sets scheme 1 draws from: (ranking, lot sizing, feasibility).
_RULE_MIX = (
    ("gunther", "gunther", "move_quantity"),
    ("dixon_silver", "dixon_silver", "unit_holding"),
    ("silver_meal", "silver_meal", "unit_holding"),
    ("least_unit_cost", "least_unit_cost", "unit_holding"),
    ("absolute_cost", "absolute_cost", "unit_holding"),
)


@dataclass(frozen=True)
class PbpResult:
    """One constructed plan and its exact scaled cost."""

    plan: Plan
    cost_scaled: int

    @property
    def cost(self) -> float:
        return self.cost_scaled / self.plan.scale


@dataclass(frozen=True)
class RppResult:
    """Best plan over restarts.  rep_costs[0] is the unperturbed run."""

    plan: Plan
    cost_scaled: int
    chosen_rep: int
    rep_costs: Tuple[int, ...]

    @property
    def cost(self) -> float:
        return self.cost_scaled / self.plan.scale


class _Prep:
    """Instance data unpacked into plain lists for the hot loops."""

    __slots__ = ("instance", "n", "t", "scale", "d", "dpre", "gpre",
                 "k_usage", "s0", "h", "c", "dbar", "init_load")

    def __init__(self, instance: Instance):
        if not instance_feasible(instance):
            raise InfeasibleInstanceError(
                f"{instance.name or 'instance'}: cumulative demand exceeds "
                "cumulative capacity"
            )
        self.instance = instance
        n, t = instance.n_items, instance.n_periods
        self.n = n
        self.t = t
        self.scale = instance.scale
        self.d = [[int(v) for v in row] for row in instance.demand]
        self.k_usage = [int(v) for v in instance.capacity_usage]
        self.s0 = [int(v) for v in instance.setup_cost]
        self.h = [int(v) for v in instance.holding_cost]
        self.c = [int(v) for v in instance.capacity]
        self.dpre = []
        self.gpre = []
        for row in self.d:
            p = [0]
            g = [0]
            for j, v in enumerate(row):
                p.append(p[-1] + v)
                g.append(g[-1] + j * v)
            self.dpre.append(p)
            self.gpre.append(g)
        self.dbar = [p[-1] / t for p in self.dpre]
        self.init_load = [
            [self.k_usage[i] * self.d[i][j] for j in range(t)] for i in range(n)
        ]


class _Run:
    """Mutable state for one construction pass."""

    def __init__(self, prep: _Prep, config: RuleConfig, scheme: int,
                 strength: float, rng: Optional[np.random.Generator]):
        self.prep = prep
        self.config = config
        self.scheme = scheme
        self.strength = strength
        self.rng = rng
        n, t, scale = prep.n, prep.t, prep.scale
        self.x = [[v * scale for v in row] for row in prep.d]
        self.load = [row[:] for row in prep.init_load]
        self.s = [prep.c[j] - sum(self.load[i][j] for i in range(n))
                  for j in range(t)]
        self.fut = [0] * n  # scaled production after the current period
        self._x_total = [sum(row) for row in self.x]

        setups = [float(v) for v in prep.s0]
        if scheme == 3:
            w = strength
            setups = [s * rng.uniform(1.0 - w, 1.0 + w) for s in setups]
        self.setups = setups
        self.tbo = [time_between_orders(prep.s0[i], prep.h[i], prep.dbar[i])
                    for i in range(n)]
        self.gain = [batch_gain(prep.s0[i], prep.h[i], prep.dbar[i], self.tbo[i])
                     for i in range(n)]

        # per-period rule names (may be replaced by scheme 1)
        self.rank_rule = config.rank
        self.lot_rule = config.lot
        self.feas_rule = config.feas

        # per-item caches for the current period
        self.cand_t = [0] * n
        self.rank_val = [0.0] * n
        self.lot_val = [0.0] * n
        self.feas_t = [0] * n
        self.feas_val = [0.0] * n

    # -- index plumbing -----------------------------------------------------

    def _noise(self) -> float:
        if self.scheme == 2:
            w = self.strength
            return float(self.rng.uniform(1.0 - w, 1.0 + w))
        return 1.0

    def _quantities(self, i: int, k: int, t_cand: int,
                    with_move_cap: bool) -> SlotQuantities:
        prep = self.prep
        x_row = self.x[i]
        t = prep.t
        first_pos = t_cand
        for j in range(k + 1, t_cand):
            if x_row[j] > 0:
                first_pos = j
                break
        dpre = prep.dpre[i]
        gpre = prep.gpre[i]
        h = prep.h[i]
        base_p = dpre[k]
        base_g = gpre[k]
        d1 = dpre[first_pos] - base_p
        h1 = h * ((gpre[first_pos] - base_g) - k * d1)
        d2 = dpre[t_cand + 1] - base_p
        h2 = h * ((gpre[t_cand + 1] - base_g) - k * d2)
        usage = prep.k_usage[i]
        move_cap = 0.0
        if with_move_cap:
            s = self.s
            worst = 0
            cum = 0
            for j in range(k + 1, t_cand):
                cum -= s[j]
                if cum > worst:
                    worst = cum
            headroom = self.s[k] - worst
            move_cap = max(0.0, min(float(prep.d[i][t_cand]), headroom / usage))
        return SlotQuantities(
            setup=self.setups[i],
            holding=float(h),
            usage=usage,
            t1=first_pos - k,
            t2=t_cand - k + 1,
            delta=t_cand - k,
            h1=float(h1),
            h2=float(h2),
            d1=float(d1),
            d2=float(d2),
            lot=x_row[t_cand] / prep.scale,
            lot_load=float(self.load[i][t_cand]),
            move_cap=move_cap,
            tbo=self.tbo[i],
            gain=self.gain[i],
            future_rate=self.fut[i] / prep.scale / (t - 1 - k),
        )

    def _refresh_lot(self, i: int, k: int, t_star: int) -> bool:
        """Find item i's first fitting lot in the window and score it."""
        load_row = self.load[i]
        sk = self.s[k]
        t_cand = -1
        for j in range(k + 1, t_star + 1):
            ld = load_row[j]
            if 0 < ld <= sk:
                t_cand = j
                break
        if t_cand < 0:
            return False
        q = self._quantities(i, k, t_cand, with_move_cap=False)
        ru = evaluate_ranking(self.rank_rule, q)
        lu = ru if self.lot_rule == self.rank_rule \
            else evaluate_ranking(self.lot_rule, q)
        b = self._noise()
        self.cand_t[i] = t_cand
        self.rank_val[i] = ru * b
        self.lot_val[i] = lu * b
        return True

    def _refresh_feas(self, i: int, k: int, alpha: int) -> bool:
        """Find item i's first lot in (k, alpha] and score the forced shift."""
        load_row = self.load[i]
        t_cand = -1
        for j in range(k + 1, alpha + 1):
            if load_row[j] > 0:
                t_cand = j
                break
        if t_cand < 0:
            return False
        q = self._quantities(i, k, t_cand,
                             with_move_cap=self.feas_rule == "move_quantity")
        self.feas_t[i] = t_cand
        self.feas_val[i] = evaluate_feasibility(self.feas_rule, q) * self._noise()
        return True

    # -- state mutation -----------------------------------------------------

    def _merge(self, i: int, k: int, t_from: int) -> int:
        """Pull item i's whole lot at t_from into k; returns the load moved."""
        x_row = self.x[i]
        load_row = self.load[i]
        mv_scaled = x_row[t_from]
        mv_load = load_row[t_from]
        x_row[k] += mv_scaled
        x_row[t_from] = 0
        load_row[k] += mv_load
        load_row[t_from] = 0
        self.s[k] -= mv_load
        self.s[t_from] += mv_load
        self.fut[i] -= mv_scaled
        return mv_load

    def _partial_shift(self, i: int, k: int, t_from: int, amount: int) -> None:
        """Move exactly ``amount`` capacity units of item i from t_from to k."""
        shift_scaled = amount * self.prep.scale // self.prep.k_usage[i]
        x_row = self.x[i]
        load_row = self.load[i]
        x_row[k] += shift_scaled
        x_row[t_from] -= shift_scaled
        load_row[k] += amount
        load_row[t_from] -= amount
        self.s[k] -= amount
        self.s[t_from] += amount
        self.fut[i] -= shift_scaled

    # -- per-period logic ----------------------------------------------------

    def _window(self, k: int) -> Tuple[Optional[int], int]:
        """First future period with a cumulative capacity shortfall."""
        s = self.s
        cum = 0
        for j in range(k + 1, self.prep.t):
            cum -= s[j]
            if cum > 0:
                return j, cum
        return None, 0

    def _pick_period_rules(self) -> None:
        self.rank_rule = self.config.rank
        self.lot_rule = self.config.lot
        self.feas_rule = self.config.feas
        if self.scheme == 1:
            a = float(self.rng.random())
            w = self.strength
            if a < w:
                slot = int(a * 5.0 / w) if w > 0 else 0
                rules = _RULE_MIX[min(slot, 4)]
                self.rank_rule, self.lot_rule, self.feas_rule = rules

    def _build_members(self, k: int, t_star: int) -> list:
        members = []
        for i in range(self.prep.n):
            if self.x[i][k] > 0 and self._refresh_lot(i, k, t_star):
                members.append(i)
        return members

    def _lot_sizing(self, k: int) -> Tuple[Optional[int], int]:
        alpha, beta = self._window(k)
        t_last = self.prep.t - 1
        t_star = alpha if alpha is not None else t_last
        members = self._build_members(k, t_star)
        s = self.s
        while s[k] > 0 and members:
            best = -1
            best_val = NEG_INF
            for i in members:
                v = self.rank_val[i]
                if v > best_val:
                    best_val = v
                    best = i
            t_from = self.cand_t[best]
            load_needed = self.load[best][t_from]
            if self.lot_val[best] >= ELIGIBILITY_TOL and s[k] >= load_needed:
                moved = self._merge(best, k, t_from)
                if alpha is None:
                    if not self._refresh_lot(best, k, t_star):
                        members.remove(best)
                        continue
                elif moved >= beta:
                    alpha, beta = self._window(k)
                    t_star = alpha if alpha is not None else t_last
                    members = self._build_members(k, t_star)
                    if best not in members:
                        continue
                else:
                    beta -= moved
                    if not self._refresh_lot(best, k, t_star):
                        members.remove(best)
                        continue
            # drop the chosen item unless it still has an affordable,
            # worthwhile candidate
            if (self.lot_val[best] < ELIGIBILITY_TOL
                    or s[k] < self.load[best][self.cand_t[best]]):
                members.remove(best)
        return alpha, beta

    def _feasibility_shifts(self, k: int, alpha: int) -> None:
        s = self.s
        cum = 0
        shortfall = 0
        for j in range(k + 1, self.prep.t):
            cum -= s[j]
            if j >= alpha and cum > shortfall:
                shortfall = cum
        if shortfall <= 0:
            return
        if shortfall > s[k]:
            raise InfeasibleInstanceError(
                f"period {k}: cannot cover future capacity shortfall"
            )
        members = []
        for i in range(self.prep.n):
            if self._refresh_feas(i, k, alpha):
                members.append(i)
        while shortfall > 0:
            best = -1
            best_val = NEG_INF
            for i in members:
                v = self.feas_val[i]
                if v > best_val:
                    best_val = v
                    best = i
            if best < 0:
                raise InfeasibleInstanceError(
                    f"period {k}: no lot available to shift forward"
                )
            t_from = self.feas_t[best]
            available = self.load[best][t_from]
            if available > shortfall:
                self._partial_shift(best, k, t_from, shortfall)
                shortfall = 0
            else:
                self._merge(best, k, t_from)
                shortfall -= available
                if not self._refresh_feas(best, k, alpha):
                    members.remove(best)

    def execute(self) -> PbpResult:
        prep = self.prep
        for k in range(prep.t - 1):
            for i in range(prep.n):
                if k == 0:
                    self.fut[i] = self._x_total[i] - self.x[i][0]
                else:
                    self.fut[i] -= self.x[i][k]
            self._pick_period_rules()
            alpha, _ = self._lot_sizing(k)
            if alpha is not None and self.s[k] > 0:
                self._feasibility_shifts(k, alpha)
        lots = np.array(self.x, dtype=np.int64)
        plan = Plan(lots, prep.scale)
        return PbpResult(plan, cost_scaled(prep.instance, plan))


def _validate_perturbation(scheme: int, strength: float) -> None:
    if scheme not in PERTURBATION_SCHEMES:
        raise ValueError(f"perturbation scheme must be one of {PERTURBATION_SCHEMES}")
    if not 0.0 <= strength <= 1.0:
        raise ValueError("perturbation strength must lie in [0, 1]")
    if scheme in (2, 3) and strength >= 1.0:
        raise ValueError("multiplicative schemes need strength < 1")


def run_pbp(
    instance: Instance,
    config: Union[str, RuleConfig] = "HeinB",
    *,
    scheme: Optional[int] = None,
    strength: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> PbpResult:
    """Construct one plan; optionally with a perturbation scheme applied."""
    if isinstance(config, str):
        config = PRESETS[config]
    if scheme is not None:
        _validate_perturbation(scheme, strength)
        if rng is None:
            raise ValueError("perturbed runs need an rng")
    prep = _Prep(instance)
    return _Run(prep, config, scheme or 0, strength, rng).execute()


def _rep_rng(seed_key: Tuple[int, ...], rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed_key + (rep,))))


def run_rpp(
    instance: Instance,
    *,
    scheme: int,
    strength: float,
    reps: int,
    seed: Union[int, Sequence[int]] = 0,
    config: Union[str, RuleConfig] = "HeinB",
) -> RppResult:
    """Best of the plain construction plus ``reps`` perturbed restarts.

    Restart r draws its random stream from the seed key extended by r, so
    the first m restarts of a larger run are exactly the restarts of a
    smaller one: the best cost is non-increasing in ``reps`` for a fixed
    seed.  Ties keep the earliest candidate, so strength 0 returns the
    unperturbed plan unchanged.
    """
    _validate_perturbation(scheme, strength)
    if reps < 0:
        raise ValueError("reps must be >= 0")
    if isinstance(config, str):
        config = PRESETS[config]
    seed_key = (int(seed),) if isinstance(seed, (int, np.integer)) else tuple(
        int(v) for v in seed
    )
    prep = _Prep(instance)
    best = _Run(prep, config, 0, 0.0, None).execute()
    best_rep = 0
    costs = [best.cost_scaled]
    for rep in range(1, reps + 1):
        result = _Run(prep, config, scheme, strength, _rep_rng(seed_key, rep)).execute()
        costs.append(result.cost_scaled)
        if result.cost_scaled < best.cost_scaled:
            best = result
            best_rep = rep
    return RppResult(best.plan, best.cost_scaled, best_rep, tuple(costs))
