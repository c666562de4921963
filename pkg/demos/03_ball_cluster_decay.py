"""F_p can be made small.

Add n small balls to a unit ball. With the radius chosen to minimise the
bound, F_p decays like n^(-2/(2p+m)). Everything here uses closed forms,
so large n costs nothing.
"""

import math

from torsionlab import cluster_sequence
from torsionlab.constructions import sequence_to_csv

for m, p in [(2, 1.0), (2, 2.0), (3, 1.0)]:
    ns = [10, 100, 1000, 10000]
    samples = [cluster_sequence(m, p, n) for n in ns]
    slope = math.log(samples[-1].fp_value / samples[1].fp_value) / math.log(ns[-1] / ns[1])
    print(f"m={m} p={p:g}: fitted slope {slope:.4f}, predicted {-2 / (2 * p + m):.4f}")

print()
print(sequence_to_csv([cluster_sequence(2, 1.0, n) for n in (10, 100, 1000, 10000)]), end="")
