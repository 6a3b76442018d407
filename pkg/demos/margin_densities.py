"""Densities that thin out towards the boundary.

A margin-power density is proportional to min(rho0, dist to boundary)^gamma.
Less mass near the edge means the hull misses more of the body, but the
missing volume is still controlled by the missing probability mass.
"""

from polylab.analysis import check_margin_transfer, check_rate
from polylab.geometry import Ball
from polylab.rng import RngStream
from polylab.sampling import DensitySpec

disk = Ball.unit(2)

for gamma in (1.0, 2.0):
    spec = DensitySpec.margin_power(disk, gamma, 1.0)
    mp = spec.margin_parameters()
    rep = check_margin_transfer(spec, 300, 100, RngStream(5), fresh_m=20_000)
    s = rep.statistics
    print(f"gamma={gamma:g}: alpha={mp.alpha:.2f} L={mp.L:.2f} t0={mp.t0:.2f}; "
          f"{s['violations']} violations of V_n <= (L+1) d_f^(alpha/(alpha+1)), "
          f"worst ratio {s['max_ratio_to_bound']:.3f}")

spec = DensitySpec.margin_power(disk, 1.0, 1.0)
rate = check_rate(spec, "V_n_normalized", 1, [64 * 2 ** k for k in range(6)], 200, RngStream(6))
print(f"gamma=1 missing volume exponent {rate.statistics['exponent']:+.3f}"
      f" (upper bound {rate.statistics['target']:+.3f})")
