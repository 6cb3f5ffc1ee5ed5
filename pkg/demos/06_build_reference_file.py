"""
Building an optimal-reference file
==================================

Gap reports are most meaningful against proven optima.  A reference file is
plain text, one ``<instance_id> <cost>`` pair per line, and plugs into the
bench layer via ``reference = file:PATH`` (or ``--reference`` for a single
solve).

For tiny instances the built-in exhaustive enumerator is enough, and that is
what this demo runs.  For real suite sizes (12x12 and up) enumeration is
hopeless: solve the mixed-integer program below with any MILP solver and
write the same file format.  With binary setup y[i,t], lots x[i,t] >= 0 and
inventory I[i,t] >= 0:

    minimize    sum(S[i] * y[i,t] + h[i] * I[i,t])
    subject to  I[i,t-1] + x[i,t] - d[i,t] = I[i,t]      (I[i,0] = 0)
                sum_i K[i] * x[i,t] <= C[t]
                K[i] * x[i,t] <= C[t] * y[i,t]
                x, I >= 0,  y binary

The acceptance tests look for ``references/optimal_12x12.txt`` at the repo
root; when it exists, the absolute-gap clauses against proven optima are
exercised as well.
"""

import tempfile
from pathlib import Path

from clsp import exact_optimum, generate_suite, run_method
from clsp.fileio import read_reference

out = Path(tempfile.mkdtemp(prefix="clsp-demo-")) / "optimal_3x4.txt"

# A miniature suite: every factorial cell once, at 3 items x 4 periods.
suite = list(generate_suite("3x4", 2, 1))[:10]

lines = []
for inst in suite:
    best = exact_optimum(inst)
    lines.append(f"{inst.name} {best.total:g}")
out.write_text("\n".join(lines) + "\n", encoding="utf-8")
print(f"wrote {len(lines)} proven optima to {out}")

# Round-trip and use: gap of the default constructive heuristic per instance.
optima = read_reference(out)
print(f"{'instance':<14} {'optimum':>9} {'HeinB':>9} {'gap %':>7}")
for inst in suite:
    scaled, _ = run_method("HeinB", inst)
    cost = scaled / inst.scale
    ref = optima[inst.name]
    print(f"{inst.name:<14} {ref:>9.1f} {cost:>9.1f} "
          f"{100.0 * (cost - ref) / ref:>7.2f}")
