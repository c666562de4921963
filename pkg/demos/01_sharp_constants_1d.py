"""Sharp constants on the line.

On the line the supremum of F_{p,q} (q <= 1) is attained by a single
interval. This script evaluates the unit interval with the closed-form
backend, compares it with the explicit formula, and shows that splitting the
interval into pieces of the same total length only lowers the value.
"""

import math

from torsionlab import IntervalUnion, evaluate, one_d_sharp, one_d_sharp_inf
from torsionlab.functionals import INF

unit = IntervalUnion(((0.0, 1.0),))
report = evaluate(unit, [1, 2, 5, 10, INF], qs=[0.0, 0.5, 1.0])

print("p      F_p(interval)     formula")
for p in (1.0, 2.0, 5.0, 10.0):
    print(f"{p:<6g} {report.fp[p][0]:.12f}  {one_d_sharp(p, 1.0):.12f}")
print(f"inf    {report.fp[INF][0]:.12f}  {one_d_sharp_inf(1.0):.12f}")

print()
print("closed forms: pi^2/12 =", math.pi**2 / 12, " pi^2/sqrt(120) =", math.pi**2 / math.sqrt(120),
      " pi^2/8 =", math.pi**2 / 8)

# Three pieces of lengths 0.5, 0.3, 0.2 spread out on the line
pieces = IntervalUnion(((0.0, 0.5), (1.0, 1.3), (2.0, 2.2)))
split = evaluate(pieces, [2.0], qs=[0.0, 0.5, 1.0])
print()
print("q      single interval   three pieces")
for q in (0.0, 0.5, 1.0):
    print(f"{q:<6g} {report.fpq[(2.0, q)][0]:.12f}    {split.fpq[(2.0, q)][0]:.12f}")
