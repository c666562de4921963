"""Finite differences against closed forms.

The grid backend solves -Lap v = 1 and the eigenvalue problem on a uniform
grid, with a symmetric boundary stencil that sees the true boundary position.
Two spacings and a Richardson step give fourth-digit-plus agreement with the
closed forms on the interval, square and disk.
"""

import math
import time

from torsionlab import Ball, Cuboid, IntervalUnion, evaluate, pde

SQUARE_T1 = 0.035144253738788429  # from the rapidly converging single series

cases = [
    ("interval", IntervalUnion(((0.0, 1.0),)), math.pi**2, 1 / 12),
    ("square", Cuboid((1.0, 1.0)), 2 * math.pi**2, SQUARE_T1),
    ("disk", Ball(2, 1.0), 5.783185962946784, math.pi / 8),
]

for name, spec, lam, t1 in cases:
    t0 = time.perf_counter()
    r = evaluate(spec, [1.0], backend="numeric", h=1 / 64)
    dt = time.perf_counter() - t0
    print(f"{name:8s} lambda1 {r.lambda1.lower:.10f} (rel err {abs(r.lambda1.lower - lam) / lam:.1e})"
          f"  T1 {r.tp[1.0]:.10f} (rel err {abs(r.tp[1.0] - t1) / t1:.1e})  {dt:.2f}s")

# Convergence order on the disk without extrapolation
print()
prev = None
for h in (1 / 16, 1 / 32, 1 / 64, 1 / 128):
    t1 = pde.lp_norm(pde.solve_torsion(pde.rasterize(Ball(2, 1.0), h)), 1.0)
    err = abs(t1 - math.pi / 8)
    rate = "" if prev is None else f"  order {math.log2(prev / err):.2f}"
    print(f"h = 1/{round(1 / h):<4d} T1 error {err:.3e}{rate}")
    prev = err
