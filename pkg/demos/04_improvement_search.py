"""
Improvement searches: lot elimination and tabu search
=====================================================

Both searches move through the space of setup patterns and let the exact
fixed-pattern solver price each pattern, so they never return a plan worse
than their input.

* Lot elimination greedily closes setup slots (most expensive setup first)
  while closing pays; the randomized variants noise the closing order or
  randomly skip closures and keep the best of m repetitions.
* Tabu search flips one setup slot per iteration (open or close), forbids
  undoing a flip for a tenure derived from the horizon length, and keeps the
  incumbent best.
"""

from clsp import (
    LeConfig,
    TabuConfig,
    cost_scaled,
    generate_instance,
    is_feasible_plan,
    lot_for_lot,
    run_le,
    run_pbp,
    run_tabu,
    solve_fixed_setup,
)

inst = generate_instance("12x12", "bdfhk", rep=1, seed=99)

# The elimination baseline starts from lot-for-lot (repaired by the exact
# solver if producing every demand in place exceeds capacity).
start = lot_for_lot(inst)
if not is_feasible_plan(inst, start):
    start = solve_fixed_setup(inst, inst.demand > 0).plan
print("start cost:", cost_scaled(inst, start) / inst.scale)

res = run_le(inst, start)
print(f"deterministic elimination: {res.cost:.1f} "
      f"({res.eliminated} slots closed)")

for variant in ("RLE1", "RLE2"):
    r = run_le(inst, start, LeConfig(variant=variant, w=0.3, m=10, seed=3))
    print(f"{variant} best-of-10: {r.cost:.1f} (winning pass {r.chosen_rep})")
print()

# Tabu search polishes a good constructive plan.  A reference cost (when one
# is known) lets it stop early; the iteration cap bounds work deterministically.
plan = run_pbp(inst).plan
print("constructive cost:", cost_scaled(inst, plan) / inst.scale)
improved = run_tabu(inst, plan, TabuConfig(iteration_cap=25))
print(f"tabu-improved cost: {improved.cost:.1f} "
      f"after {improved.iterations} iterations")

# The restricted neighbourhood alternates between closing producing slots
# and opening closed ones instead of scoring every flip -- the usual choice
# on large instances to keep iterations cheap.
restricted = run_tabu(inst, plan,
                      TabuConfig(iteration_cap=25, restricted=True))
print(f"tabu (restricted moves): {restricted.cost:.1f}")
