"""
Randomized restarts and the self-tuning strength search
=======================================================

Re-running the constructive pass with slightly perturbed decisions and
keeping the best of m candidates buys solution quality for CPU time.  Three
perturbation schemes exist:

1. rule mixing   -- each period may swap in a random classic rule,
2. index noising -- every computed index value is multiplied by a factor
                    from U[1-w, 1+w],
3. setup noising -- each item's setup cost, as seen by the decision rules,
                    is multiplied by a factor from U[1-w, 1+w].

Candidate 0 is always the unperturbed pass, so the winner never loses to the
plain heuristic, and strength w = 0 reproduces it exactly.  The adaptive
variant probes the strength grid with a bisection-style search instead of
sweeping it.
"""

from clsp import DEFAULT_GRID, generate_instance, run_arpp, run_pbp, run_rpp

inst = generate_instance("12x12", "begil", rep=1, seed=17)
base = run_pbp(inst)
print("deterministic baseline:", base.cost)
print()

# Best-of-20 for each scheme at a moderate strength.  rep_costs[0] is the
# unperturbed candidate, so the improvement over the baseline is visible.
for scheme in (1, 2, 3):
    res = run_rpp(inst, scheme=scheme, strength=0.3, reps=20, seed=7)
    print(f"scheme {scheme}: best {res.cost:.1f}"
          f"  (baseline candidate {res.rep_costs[0] / inst.scale:.1f},"
          f" winner is candidate {res.chosen_rep})")
print()

# The response to the strength w is not monotone: too little noise explores
# nothing, too much degrades the decisions faster than diversity pays.
print(f"{'w':>5} {'best-of-20 cost':>16}")
for w in (0.05, 0.3, 0.6, 0.9):
    res = run_rpp(inst, scheme=3, strength=w, reps=20, seed=7)
    print(f"{w:>5.2f} {res.cost:>16.1f}")
print()

# The adaptive search spends a few probes locating a good strength on the
# 18-point grid instead of paying for all of them.
res = run_arpp(inst, scheme=3, reps=20, seed=7)
print(f"adaptive: cost {res.cost:.1f} at w* = {res.w_star:g} "
      f"after {res.probe_count} probes (grid has {len(DEFAULT_GRID)} points)")
for w, cost in sorted(res.probe_costs.items()):
    print(f"  probed w = {w:<5g} -> {cost / inst.scale:.1f}")
