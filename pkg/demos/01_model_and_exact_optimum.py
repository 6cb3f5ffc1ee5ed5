"""
Instances, plans, and the exact fixed-pattern machinery
=======================================================

A walk through the data model: build a small instance by hand, inspect the
trivial lot-for-lot plan, solve the cost-minimal production plan for a fixed
setup pattern, and enumerate every pattern to get a proven optimum.
"""

import numpy as np

from clsp import (
    Instance,
    check_plan,
    cost_scaled,
    evaluate_cost,
    exact_optimum,
    lot_for_lot,
    solve_fixed_setup,
)

# Two items over four periods.  Item arrays are per item, demand is a matrix.
# capacity_usage says how many units of the shared capacity one unit of the
# item consumes; the shared per-period capacity is a plain vector.
inst = Instance(
    demand=[[4, 0, 6, 2],
            [3, 5, 0, 4]],
    capacity=[20, 20, 20, 20],
    setup_cost=[40, 30],
    holding_cost=[2, 1],
    capacity_usage=[2, 1],
)
print("instance scale (lot grid):", inst.scale)

# Lot-for-lot produces each period's demand in that period: zero holding
# cost, a setup in every demand period.  It is the canonical starting plan.
start = lot_for_lot(inst)
breakdown = evaluate_cost(inst, start)
print("lot-for-lot setup/holding/total:",
      breakdown.setup_total, breakdown.holding_total, breakdown.total)

# check_plan returns a list of violations (empty = feasible).
print("violations:", check_plan(inst, start))

# Fix the setup pattern (which item may produce in which period) and the
# remaining problem is a pure allocation question that is solved exactly.
# Open slots are charged their setup cost whether or not they end up used,
# so the reported total is the unique optimum for that pattern.
pattern = np.array([[True, False, True, False],
                    [True, False, False, True]])
result = solve_fixed_setup(inst, pattern)
print("fixed pattern optimal total:", result.total_scaled / inst.scale)
print("lots:\n", result.plan.lots)

# Closing a slot the demand needs makes the pattern infeasible; the solver
# says so instead of guessing.
bad = np.zeros_like(pattern)
bad[0, 3] = True
print("deliberately broken pattern:", solve_fixed_setup(inst, bad).status)

# For small instances every pattern can be enumerated, which yields a proven
# global optimum -- the reference the heuristics are judged against.
best = exact_optimum(inst)
print("proven optimum:", best.total, "after", best.patterns_solved,
      "pattern solves")
print("optimal lots:\n", best.plan.lots)
assert cost_scaled(inst, best.plan) <= cost_scaled(inst, start)
