"""
Constructive period-by-period heuristics
========================================

Eight classic rule combinations build a plan in one deterministic pass:
walking the horizon left to right, each period's spare capacity is used to
pull future lots forward when the ranking index likes the move, and future
capacity shortfalls are repaired by forced early production.

The presets differ only in which ranking / lot-sizing / feasibility indices
they plug into that skeleton.
"""

from clsp import PRESETS, cell_for_letters, generate_instance, run_pbp

# A mid-difficulty generated instance: 12 items x 12 periods, tight capacity.
# The five letters select a cell of the factorial design; see the generator
# module for the full catalogue.
inst = generate_instance("12x12", "begil", rep=1, seed=42)
print("cell parameters:", cell_for_letters("begil"))
print()

# Every preset returns a feasible plan with an exact (scaled-integer) cost.
print(f"{'preset':<12} {'cost':>10} {'setups':>7}")
for name in PRESETS:
    res = run_pbp(inst, name)
    print(f"{name:<12} {res.cost:>10.1f} {int(res.plan.setups.sum()):>7}")

# The two-stage preset with the damped economic-interval index is the
# workhorse default used by every randomized method in this package.
best = run_pbp(inst)  # default preset
print()
print("default preset cost:", best.cost)
