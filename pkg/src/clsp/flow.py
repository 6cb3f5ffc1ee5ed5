"""Minimum-holding-cost production plans for a fixed setup pattern.

With the setup pattern fixed, the remaining problem -- meet all demand at
minimum holding cost using only the allowed (item, period) slots, subject to
the shared capacity -- is a transportation problem: production in period s
for demand in period t >= s costs ``h[i] * (t - s)`` per unit.  It is solved
here as an integer min-cost flow on a time-expanded network:

    source --(cap C[s])--> period s --(allowed slots)--> item node (i, s)
    (i, s) --(holding arc, cost h[i]*scale/K[i] per capacity unit)--> (i, s+1)
    (i, t) --(cap K[i]*d[i,t])--> sink

Flows are measured in capacity units (z = K[i] * x), so all arc data are
integers and the successive-shortest-path algorithm returns exact integer
costs in "scaled money" (money * instance.scale).  Forbidden slots are
removed arcs (capacity zero), so an unsatisfiable pattern shows up as an
infeasible flow rather than a big-M cost.

The kernels are numba-compiled; warm-start entry points re-optimise after
closing or opening a single slot, which is what the improvement searches
evaluate thousands of times per instance.

``exact_optimum`` enumerates every setup pattern (guarded to N*T <= 18) and
keeps the cheapest fixed-pattern solution; it is the ground-truth oracle the
test suite compares every heuristic against on tiny instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .model import Instance, Plan, cost_scaled

__all__ = [
    "LpResult",
    "ExactResult",
    "FixedSetupSolver",
    "solve_fixed_setup",
    "exact_optimum",
    "EXACT_CELL_BUDGET",
]

EXACT_CELL_BUDGET = 18

_UNREACHED = np.int64(2) ** 62
_CAP_INF = np.int64(2) ** 60


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

@njit(cache=True)
def _dijkstra(first, adj, edge_to, edge_cost, rcap, pi, src,
              dist, prev_edge, visited, heap_node, heap_dist):
    """Shortest reduced-cost distances from src over residual arcs."""
    n = dist.shape[0]
    for v in range(n):
        dist[v] = _UNREACHED
        prev_edge[v] = -1
        visited[v] = 0
    dist[src] = 0
    heap_node[0] = src
    heap_dist[0] = 0
    hsize = 1
    while hsize > 0:
        top_d = heap_dist[0]
        top_v = heap_node[0]
        hsize -= 1
        heap_node[0] = heap_node[hsize]
        heap_dist[0] = heap_dist[hsize]
        i = 0
        while True:
            left = 2 * i + 1
            right = left + 1
            smallest = i
            if left < hsize and heap_dist[left] < heap_dist[smallest]:
                smallest = left
            if right < hsize and heap_dist[right] < heap_dist[smallest]:
                smallest = right
            if smallest == i:
                break
            heap_dist[i], heap_dist[smallest] = heap_dist[smallest], heap_dist[i]
            heap_node[i], heap_node[smallest] = heap_node[smallest], heap_node[i]
            i = smallest
        if visited[top_v] or top_d != dist[top_v]:
            continue
        visited[top_v] = 1
        base = top_d + pi[top_v]
        for idx in range(first[top_v], first[top_v + 1]):
            e = adj[idx]
            if rcap[e] <= 0:
                continue
            w = edge_to[e]
            if visited[w]:
                continue
            nd = base + edge_cost[e] - pi[w]
            if nd < dist[w]:
                dist[w] = nd
                prev_edge[w] = e
                j = hsize
                heap_node[j] = w
                heap_dist[j] = nd
                hsize += 1
                while j > 0:
                    parent = (j - 1) // 2
                    if heap_dist[parent] <= heap_dist[j]:
                        break
                    heap_dist[parent], heap_dist[j] = heap_dist[j], heap_dist[parent]
                    heap_node[parent], heap_node[j] = heap_node[j], heap_node[parent]
                    j = parent
    return 0


@njit(cache=True)
def _push(first, adj, edge_to, edge_cost, rcap, pi, src, dst, amount,
          dist, prev_edge, visited, heap_node, heap_dist):
    """Push up to ``amount`` units src -> dst along successive shortest paths.

    Returns the units actually pushed (< amount means no residual path).
    Mutates rcap and pi; potentials stay dual-feasible.
    """
    pushed = np.int64(0)
    n = pi.shape[0]
    while pushed < amount:
        _dijkstra(first, adj, edge_to, edge_cost, rcap, pi, src,
                  dist, prev_edge, visited, heap_node, heap_dist)
        ddst = dist[dst]
        if ddst >= _UNREACHED:
            break
        for v in range(n):
            if dist[v] < ddst:
                pi[v] += dist[v]
            else:
                pi[v] += ddst
        delta = amount - pushed
        v = dst
        while v != src:
            e = prev_edge[v]
            if rcap[e] < delta:
                delta = rcap[e]
            v = edge_to[e ^ 1]
        v = dst
        while v != src:
            e = prev_edge[v]
            rcap[e] -= delta
            rcap[e ^ 1] += delta
            v = edge_to[e ^ 1]
        pushed += delta
    return pushed


@njit(cache=True)
def _reopen_arc(first, adj, edge_to, edge_cost, rcap, pi, e,
                dist, prev_edge, visited, heap_node, heap_dist):
    """Restore optimality after raising rcap[e] from zero.

    Cancels every negative cycle through e and leaves the potentials
    dual-feasible for the enlarged residual graph.
    """
    n = pi.shape[0]
    u = edge_to[e ^ 1]
    v = edge_to[e]
    while rcap[e] > 0:
        rc = edge_cost[e] + pi[u] - pi[v]
        if rc >= 0:
            break
        saved = rcap[e]
        rcap[e] = 0  # keep the negative arc out of Dijkstra
        _dijkstra(first, adj, edge_to, edge_cost, rcap, pi, v,
                  dist, prev_edge, visited, heap_node, heap_dist)
        rcap[e] = saved
        du = dist[u]
        if du >= -rc:
            # No improving cycle; shift potentials so the arc becomes tight.
            bound = -rc
            for w in range(n):
                if dist[w] < bound:
                    pi[w] += dist[w]
                else:
                    pi[w] += bound
            break
        delta = rcap[e]
        w = u
        while w != v:
            pe = prev_edge[w]
            if rcap[pe] < delta:
                delta = rcap[pe]
            w = edge_to[pe ^ 1]
        w = u
        while w != v:
            pe = prev_edge[w]
            rcap[pe] -= delta
            rcap[pe ^ 1] += delta
            w = edge_to[pe ^ 1]
        rcap[e] -= delta
        rcap[e ^ 1] += delta
        for w in range(n):
            if dist[w] < du:
                pi[w] += dist[w]
            else:
                pi[w] += du
    return 0


@njit(cache=True)
def _close_arc(first, adj, edge_to, edge_cost, rcap, pi, e,
               dist, prev_edge, visited, heap_node, heap_dist):
    """Forbid arc e, rerouting any flow it carried.

    Returns True when the flow could be rerouted (pattern still feasible).
    """
    flow = rcap[e ^ 1]
    rcap[e] = 0
    if flow == 0:
        return True
    rcap[e ^ 1] = 0
    u = edge_to[e ^ 1]
    v = edge_to[e]
    pushed = _push(first, adj, edge_to, edge_cost, rcap, pi, u, v, flow,
                   dist, prev_edge, visited, heap_node, heap_dist)
    return pushed == flow


@njit(cache=True)
def _holding_cost(rcap, chain_rev_lo, chain_rev_hi, chain_cost):
    """Scaled holding cost of the current flow (reverse caps carry flow)."""
    holding = np.int64(0)
    j = 0
    for idx in range(chain_rev_lo, chain_rev_hi, 2):
        holding += rcap[idx] * chain_cost[j]
        j += 1
    return holding


@njit(cache=True)
def _enumerate_patterns(first, adj, edge_to, edge_cost, base_rcap, pi,
                        source, sink, total_flow,
                        cand_arcs, cand_setup_scaled, req_masks,
                        chain_rev_lo, chain_rev_hi, chain_cost,
                        dist, prev_edge, visited, heap_node, heap_dist):
    """Try every setup pattern over the candidate slots; return the best.

    Setup cost is charged per open slot, which yields the same minimum as
    charging realized lots only (any realized support is itself a pattern).
    Patterns that leave some demand without an open slot at or before its
    period are skipped via the per-item requirement masks.
    """
    n_cand = cand_arcs.shape[0]
    n_masks = np.int64(1) << n_cand
    best_cost = _UNREACHED
    best_mask = np.int64(-1)
    solved = np.int64(0)
    rcap = np.empty_like(base_rcap)
    for mask in range(n_masks):
        ok = True
        for r in range(req_masks.shape[0]):
            if mask & req_masks[r] == 0:
                ok = False
                break
        if not ok:
            continue
        setup = np.int64(0)
        for b in range(n_cand):
            if mask & (np.int64(1) << b):
                setup += cand_setup_scaled[b]
        if setup >= best_cost:
            continue
        rcap[:] = base_rcap
        for b in range(n_cand):
            if not mask & (np.int64(1) << b):
                rcap[cand_arcs[b]] = 0
        for v in range(pi.shape[0]):
            pi[v] = 0
        pushed = _push(first, adj, edge_to, edge_cost, rcap, pi,
                       source, sink, total_flow,
                       dist, prev_edge, visited, heap_node, heap_dist)
        solved += 1
        if pushed < total_flow:
            continue
        holding = np.int64(0)
        j = 0
        for idx in range(chain_rev_lo, chain_rev_hi, 2):
            holding += rcap[idx] * chain_cost[j]
            j += 1
        cost = setup + holding
        if cost < best_cost:
            best_cost = cost
            best_mask = mask
    return best_cost, best_mask, solved


# --------------------------------------------------------------------------
# python-side solver
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LpResult:
    """Outcome of a fixed-pattern solve.

    status is "optimal" or "infeasible".  Costs are in scaled money units
    (money * instance.scale).  setup_scaled charges every open slot of the
    pattern whether or not the plan uses it, so total_scaled is the unique
    optimum of the fixed-pattern subproblem; the plan's realized cost
    (``cost_scaled``), which only counts slots actually producing, can be
    lower when the holding optimum leaves an open slot idle.
    """

    status: str
    plan: Optional[Plan]
    setup_scaled: Optional[int]
    holding_scaled: Optional[int]

    @property
    def total_scaled(self) -> Optional[int]:
        if self.setup_scaled is None:
            return None
        return self.setup_scaled + self.holding_scaled

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True)
class ExactResult:
    """Global optimum from exhaustive pattern enumeration."""

    total_scaled: int
    plan: Plan
    patterns_solved: int

    @property
    def total(self) -> float:
        return self.total_scaled / self.plan.scale


class FixedSetupSolver:
    """Reusable fixed-pattern solver bound to one instance.

    ``solve`` is stateless (cold start).  ``set_pattern`` / ``eval_flip`` /
    ``commit_flip`` keep a parent flow so that single-slot pattern changes
    re-optimise incrementally; results are identical to cold solves (the
    test suite checks this), only faster.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        n, t = instance.n_items, instance.n_periods
        scale = instance.scale
        k = instance.capacity_usage
        self._n = n
        self._t = t
        n_nodes = t + n * t + 2
        self.source = t + n * t
        self.sink = self.source + 1

        tails: list[int] = []
        heads: list[int] = []
        caps: list[int] = []
        costs: list[int] = []

        def add(u: int, v: int, cap: int, cost: int) -> None:
            tails.append(u)
            heads.append(v)
            caps.append(cap)
            costs.append(cost)

        for s in range(t):
            add(self.source, s, int(instance.capacity[s]), 0)
        for i in range(n):
            for s in range(t):
                add(s, t + i * t + s, int(_CAP_INF), 0)
        for i in range(n):
            unit = int(instance.holding_cost[i]) * (scale // int(k[i]))
            for s in range(t - 1):
                add(t + i * t + s, t + i * t + s + 1, int(_CAP_INF), unit)
        for i in range(n):
            for s in range(t):
                add(t + i * t + s, self.sink, int(k[i] * instance.demand[i, s]), 0)

        m = len(tails)
        edge_to = np.empty(2 * m, dtype=np.int32)
        edge_cost = np.empty(2 * m, dtype=np.int64)
        base_rcap = np.empty(2 * m, dtype=np.int64)
        edge_tail = np.empty(2 * m, dtype=np.int32)
        edge_to[0::2] = heads
        edge_to[1::2] = tails
        edge_tail[0::2] = tails
        edge_tail[1::2] = heads
        edge_cost[0::2] = costs
        edge_cost[1::2] = [-c for c in costs]
        base_rcap[0::2] = caps
        base_rcap[1::2] = 0

        order = np.argsort(edge_tail, kind="stable").astype(np.int32)
        counts = np.bincount(edge_tail, minlength=n_nodes)
        first = np.zeros(n_nodes + 1, dtype=np.int64)
        first[1:] = np.cumsum(counts)

        self.first = first
        self.adj = order
        self.edge_to = edge_to
        self.edge_cost = edge_cost
        self.base_rcap = base_rcap
        self.total_flow = int((k[:, None] * instance.demand).sum())

        # production arc (i, s) -> forward edge id
        self._prod_arc = (2 * (t + np.arange(n * t))).reshape(n, t).astype(np.int64)
        self._prod_rev_lo = 2 * t + 1
        self._prod_rev_hi = 2 * (t + n * t)
        self._slot_setup = instance.setup_cost.astype(np.int64) * scale
        self._chain_rev_lo = self._prod_rev_hi + 1
        self._chain_rev_hi = self._chain_rev_lo - 1 + 2 * n * (t - 1)
        self._chain_cost = np.repeat(
            instance.holding_cost.astype(np.int64) * (scale // k.astype(np.int64)),
            t - 1,
        ) if t > 1 else np.zeros(0, dtype=np.int64)

        self._dist = np.empty(n_nodes, dtype=np.int64)
        self._prev = np.empty(n_nodes, dtype=np.int32)
        self._visited = np.empty(n_nodes, dtype=np.uint8)
        self._heap_node = np.empty(2 * m + 4, dtype=np.int32)
        self._heap_dist = np.empty(2 * m + 4, dtype=np.int64)

        self._rcap = np.empty_like(base_rcap)
        self._pi = np.zeros(n_nodes, dtype=np.int64)
        self._scratch_rcap = np.empty_like(base_rcap)
        self._scratch_pi = np.empty_like(self._pi)
        self._parent_allowed: Optional[np.ndarray] = None
        self._parent_setup = 0

    # -- cold solve ---------------------------------------------------------

    def _run(self, allowed: np.ndarray, rcap: np.ndarray, pi: np.ndarray) -> bool:
        rcap[:] = self.base_rcap
        closed = self._prod_arc[~allowed]
        rcap[closed] = 0
        pi[:] = 0
        pushed = _push(
            self.first, self.adj, self.edge_to, self.edge_cost, rcap, pi,
            self.source, self.sink, self.total_flow,
            self._dist, self._prev, self._visited, self._heap_node, self._heap_dist,
        )
        return pushed == self.total_flow

    def _result(self, rcap: np.ndarray, setup_scaled: int) -> LpResult:
        holding = _holding_cost(
            rcap, self._chain_rev_lo, self._chain_rev_hi, self._chain_cost
        )
        return LpResult(
            "optimal", self._extract_plan(rcap), setup_scaled, int(holding)
        )

    def _pattern_setup(self, allowed: np.ndarray) -> int:
        return int((self._slot_setup[:, None] * allowed).sum())

    def _extract_plan(self, rcap: np.ndarray) -> Plan:
        z = rcap[self._prod_rev_lo:self._prod_rev_hi:2].reshape(self._n, self._t)
        per_unit = self.instance.scale // self.instance.capacity_usage.astype(np.int64)
        return Plan(z * per_unit[:, None], self.instance.scale)

    def solve(self, allowed: np.ndarray) -> LpResult:
        """Minimum-holding plan using only the allowed slots (cold start)."""
        allowed = np.asarray(allowed, dtype=bool)
        if allowed.shape != (self._n, self._t):
            raise ValueError(f"allowed must have shape {(self._n, self._t)}")
        if not self._run(allowed, self._scratch_rcap, self._scratch_pi):
            return LpResult("infeasible", None, None, None)
        return self._result(self._scratch_rcap, self._pattern_setup(allowed))

    # -- warm re-optimisation ----------------------------------------------

    def set_pattern(self, allowed: np.ndarray) -> LpResult:
        """Cold-solve a pattern and keep the flow as the parent state."""
        allowed = np.asarray(allowed, dtype=bool)
        if not self._run(allowed, self._rcap, self._pi):
            self._parent_allowed = None
            return LpResult("infeasible", None, None, None)
        self._parent_allowed = allowed.copy()
        self._parent_setup = self._pattern_setup(allowed)
        return self._result(self._rcap, self._parent_setup)

    def _apply_flip(self, rcap, pi, item: int, period: int, open_slot: bool) -> bool:
        e = int(self._prod_arc[item, period])
        if open_slot:
            rcap[e] = _CAP_INF
            _reopen_arc(
                self.first, self.adj, self.edge_to, self.edge_cost, rcap, pi, e,
                self._dist, self._prev, self._visited, self._heap_node, self._heap_dist,
            )
            return True
        return bool(
            _close_arc(
                self.first, self.adj, self.edge_to, self.edge_cost, rcap, pi, e,
                self._dist, self._prev, self._visited, self._heap_node, self._heap_dist,
            )
        )

    @property
    def pattern(self) -> np.ndarray:
        """The current parent pattern (copy); requires a prior set_pattern."""
        if self._parent_allowed is None:
            raise RuntimeError("set_pattern must succeed before reading the pattern")
        return self._parent_allowed.copy()

    def eval_flip(self, item: int, period: int, open_slot: bool) -> LpResult:
        """Re-optimise the parent pattern with one slot flipped (scratch)."""
        if self._parent_allowed is None:
            raise RuntimeError("set_pattern must succeed before eval_flip")
        if bool(self._parent_allowed[item, period]) == open_slot:
            raise ValueError(f"slot ({item}, {period}) is already in that state")
        self._scratch_rcap[:] = self._rcap
        self._scratch_pi[:] = self._pi
        if not self._apply_flip(self._scratch_rcap, self._scratch_pi, item, period, open_slot):
            return LpResult("infeasible", None, None, None)
        delta = int(self._slot_setup[item])
        setup = self._parent_setup + (delta if open_slot else -delta)
        return self._result(self._scratch_rcap, setup)

    def commit_flip(self, item: int, period: int, open_slot: bool) -> LpResult:
        """Like eval_flip, but the flipped pattern becomes the parent."""
        result = self.eval_flip(item, period, open_slot)
        if result.ok:
            self._rcap, self._scratch_rcap = self._scratch_rcap, self._rcap
            self._pi, self._scratch_pi = self._scratch_pi, self._pi
            self._parent_allowed[item, period] = open_slot
            self._parent_setup = result.setup_scaled
        return result


def solve_fixed_setup(instance: Instance, allowed: np.ndarray) -> LpResult:
    """One-shot fixed-pattern solve (builds a solver and discards it)."""
    return FixedSetupSolver(instance).solve(allowed)


def exact_optimum(instance: Instance, budget: int = EXACT_CELL_BUDGET) -> ExactResult:
    """Globally optimal cost by enumerating all setup patterns.

    Refuses instances with more than ``budget`` item-period cells (the
    enumeration is exponential).  Slots with no demand at or after them are
    never worth opening and are excluded up front; patterns that leave some
    demand with no open slot at or before its period are skipped.
    """
    n, t = instance.n_items, instance.n_periods
    if n * t > budget:
        raise ValueError(
            f"exact_optimum limited to {budget} item-period cells, got {n * t}"
        )
    solver = FixedSetupSolver(instance)

    future = np.cumsum(instance.demand[:, ::-1], axis=1)[:, ::-1]
    cand = [(i, s) for i in range(n) for s in range(t) if future[i, s] > 0]
    cand_arcs = np.array(
        [solver._prod_arc[i, s] for i, s in cand], dtype=np.int64
    )
    cand_setup = np.array(
        [int(instance.setup_cost[i]) * instance.scale for i, _ in cand],
        dtype=np.int64,
    )
    bit = {slot: b for b, slot in enumerate(cand)}
    reqs = []
    for i in range(n):
        for s in range(t):
            if instance.demand[i, s] > 0:
                mask = 0
                for ss in range(s + 1):
                    if (i, ss) in bit:
                        mask |= 1 << bit[(i, ss)]
                reqs.append(mask)
    req_masks = np.array(sorted(set(reqs)), dtype=np.int64)
    if (req_masks == 0).any():
        raise ValueError("instance has demand with no usable production slot")

    base = solver.base_rcap.copy()
    noncand = [
        solver._prod_arc[i, s]
        for i in range(n)
        for s in range(t)
        if (i, s) not in bit
    ]
    if noncand:
        base[np.array(noncand, dtype=np.int64)] = 0

    best_cost, best_mask, solved = _enumerate_patterns(
        solver.first, solver.adj, solver.edge_to, solver.edge_cost, base,
        solver._pi, solver.source, solver.sink, np.int64(solver.total_flow),
        cand_arcs, cand_setup, req_masks,
        solver._chain_rev_lo, solver._chain_rev_hi, solver._chain_cost,
        solver._dist, solver._prev, solver._visited,
        solver._heap_node, solver._heap_dist,
    )
    if best_mask < 0:
        raise ValueError("instance is infeasible")

    allowed = np.zeros((n, t), dtype=bool)
    for b, (i, s) in enumerate(cand):
        if best_mask & (1 << b):
            allowed[i, s] = True
    final = solver.solve(allowed)
    assert final.ok and final.total_scaled == int(best_cost)
    assert cost_scaled(instance, final.plan) == int(best_cost)
    return ExactResult(int(best_cost), final.plan, int(solved))
