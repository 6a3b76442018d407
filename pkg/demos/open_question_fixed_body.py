"""Exploring the worst-case density for a fixed body.

The known worst-case bound is a supremum over all bodies. Whether it holds
body by body is open. This script only looks: it prints E_f[R_n] / E_K[R_n]
for a few non-uniform densities on the disk and watches how the ratio moves
with n. Nothing is asserted.
"""

import sys

from polylab.analysis import default_roster, rate_study
from polylab.geometry import Ball
from polylab.rng import RngStream
from polylab.sampling import DensitySpec

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 200
grid = [64 * 2 ** k for k in range(6)]
K = Ball.unit(2)

base = rate_study(DensitySpec.uniform(K), grid, reps, RngStream(100))
uniform = [base[n]["R_n"].mean() for n in grid]

for i, (name, spec) in enumerate(default_roster(K).items()):
    if spec.is_uniform:
        continue
    study = rate_study(spec, grid, reps, RngStream(100).spawn(i + 1))
    ratios = "  ".join(f"{study[n]['R_n'].mean() / u:5.2f}" for n, u in zip(grid, uniform))
    print(f"{name:>14}: {ratios}")
print(f"{'n':>14}: " + "  ".join(f"{n:5d}" for n in grid))
