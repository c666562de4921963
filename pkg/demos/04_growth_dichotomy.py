"""F_{p,q} is bounded exactly when q <= 1.

n equal balls of total area one: the eigenvalue grows like n while the
torsion function shrinks, and the balance tips at q = 1.
"""

from torsionlab import equal_ball_sequence, fpq_upper_bound, talenti_fp0

ns = (1, 10, 100, 1000)
print("q     " + "".join(f"n={n:<14d}" for n in ns) + "bound")
for q in (0.0, 0.5, 1.0, 1.5, 2.0):
    vals = [equal_ball_sequence(2, 1.0, q, n).fp_value for n in ns]
    bound = f"{fpq_upper_bound(2, q):.6g}" if q <= 1 else "none"
    print(f"{q:<5g} " + "".join(f"{x:<16.6g}" for x in vals) + bound)

print()
print("sup F_{1,0} in the plane (attained by the disk):", talenti_fp0(2, 1.0))
