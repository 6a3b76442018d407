"""A sheared triangle gives the same random polytope statistics.

Missing-mass fractions are unchanged by affine maps, so the KS test between
the triangle and a badly conditioned image of it should not reject.
"""

from polylab.analysis import check_affine_invariance
from polylab.geometry import Simplex, random_shear
from polylab.rng import RngStream

T = random_shear(2, RngStream(1).spawn(99), condition=50)
rep = check_affine_invariance(Simplex.standard(2), T, 100, 2000, RngStream(1))
s = rep.statistics
print(f"cond(T) = {s['condition']:.1f}")
print(f"mean missing mass: {s['mean_K']:.5f} (K) vs {s['mean_TK']:.5f} (TK)")
print(f"KS D = {s['ks_statistic']:.4f}, p = {s['p_value']:.3f}, pass = {rep.passed}")
