"""Efron's identity on the triangle, told in three numbers.

The expected missing mass of the hull of n uniform points equals the
expected vertex count of n + 1 points divided by n + 1. For three points in
a triangle both sides are 1 - 1/12, since a random triangle in a triangle
covers 1/12 of it on average.

    python3 demos/efron_identity.py [reps]
"""

import sys

from polylab.analysis import check_efron, check_extended_efron
from polylab.geometry import Simplex
from polylab.rng import RngStream
from polylab.sampling import DensitySpec

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
triangle = DensitySpec.uniform(Simplex.standard(2))

rep = check_efron(triangle, 3, reps, RngStream(2024))
s = rep.statistics
print(f"E[1 - mu(P_3)]   = {s['missing_mass']:.4f} +- {s['missing_mass_stderr']:.4f}")
print(f"E[R_4] / 4       = {s['vertex_ratio']:.4f} +- {s['vertex_ratio_stderr']:.4f}")
print(f"exact            = {11 / 12:.4f}")
print("identity holds within 3 sigma:", rep.passed)

# falling-factorial version: equality at q = 1, an inequality beyond
for q in (1, 2, 3):
    s = check_extended_efron(triangle, 6, q, reps, RngStream(2024).spawn(q)).statistics
    print(f"q={q}: LHS {s['lhs']:.4f}  >=  P(all {q} fresh outside) {s['rhs_fresh']:.4f}")
