"""How fast the hull of uniform points fills a disk.

Missing area should shrink like n^(-2/3) and the vertex count grow like
n^(1/3). The square has corners, so its vertex count only grows like log n
and sits well under the disk's exponent.
"""

import sys

from polylab.analysis import check_rate, rate_study
from polylab.geometry import Ball, Box
from polylab.rng import RngStream
from polylab.sampling import DensitySpec

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 300
grid = [64 * 2 ** k for k in range(7)]

disk = DensitySpec.uniform(Ball.unit(2))
study = rate_study(disk, grid, reps, RngStream(7))

print(" n      V_n/|K|     E[R_n]")
for n in grid:
    cols = study[n]
    print(f"{n:5d}  {cols['V_n'].mean() / disk.support.volume():.6f}  {cols['R_n'].mean():8.2f}")

for quantity, label in (("V_n_normalized", "missing area"), ("R_n", "vertex count")):
    rep = check_rate(disk, quantity, 1, grid, reps, RngStream(7), study=study)
    s = rep.statistics
    print(f"disk {label}: exponent {s['exponent']:+.3f} +- {s['exponent_stderr']:.3f}"
          f" (theory {s['target']:+.3f})")

square = check_rate(DensitySpec.uniform(Box.unit(2)), "R_n", 1, grid, reps, RngStream(8))
print(f"square vertex count: exponent {square.statistics['exponent']:+.3f}"
      f" (only bounded above by 1/3)")
