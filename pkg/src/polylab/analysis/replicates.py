"""Independent hull replicates keyed by stream id."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput
from ..geometry import Polytope, convex_hull
from ..geometry.hull import hull_summary
from ..rng import RngStream

MAX_REDRAWS = 100


@dataclass
class HullReplicate:
    """One random polytope and the quantities measured on it.

    ``missing_mass`` is V_n/|K| for uniform densities and otherwise the
    fraction of ``fresh_m`` fresh draws from the density falling outside the
    hull (NaN when ``fresh_m`` is 0). ``hull`` is None unless kept.
    """

    n: int
    R_n: int
    V_n: float
    missing_mass: float
    hull: Polytope = None
    fresh_outside: int = 0
    fresh_m: int = 0
    redraws: int = 0


def _one(spec, n, fresh_m, stream, keep_hull, hull_method, body_volume):
    redraws = 0
    while True:
        sub = stream.spawn(0 if redraws == 0 else 1 + redraws)
        X = spec.sample(n, sub)
        try:
            P = convex_hull(X, method=hull_method) if keep_hull else hull_summary(X, hull_method)
            break
        except DegenerateInput:
            redraws += 1
            if redraws > MAX_REDRAWS:
                raise
    V_n = max(body_volume - (P.volume() if keep_hull else P.volume), 0.0)
    outside = 0
    if fresh_m:
        F = spec.sample(fresh_m, stream.spawn(1))
        outside = int(fresh_m - np.count_nonzero(P.contains(F)))
    if spec.is_uniform:
        mm = V_n / body_volume
    else:
        mm = outside / fresh_m if fresh_m else float("nan")
    return HullReplicate(n, P.n_vertices, V_n, mm, P if keep_hull else None,
                         outside, fresh_m, redraws)


def run_replicates(spec, n, reps, fresh_m=0, rng_base=RngStream(0), *, threads=1,
                   keep_hull=True, hull_method="qhull"):
    """Hulls of ``n`` fresh samples from ``spec``, ``reps`` times.

    Replicate ``i`` draws everything from ``rng_base.spawn(i)``, so results do
    not depend on ``threads``; chunks are merged back in replicate order.
    Degenerate samples (a null event for continuous densities) are redrawn
    and counted in ``redraws``.
    """
    d = spec.dim
    if n < d + 1:
        raise ValueError(f"n must be >= d + 1 = {d + 1}")
    if reps < 1 or fresh_m < 0:
        raise ValueError("reps must be >= 1 and fresh_m >= 0")
    volume = spec.support.volume()

    def work(indices):
        return [_one(spec, n, fresh_m, rng_base.spawn(i), keep_hull, hull_method, volume)
                for i in indices]

    if threads <= 1:
        return work(range(reps))
    chunks = np.array_split(np.arange(reps), min(reps, threads * 4))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(work, chunks))
    return [r for part in parts for r in part]


def replicate_arrays(replicates):
    """Column arrays (R_n, V_n, missing_mass, fresh_outside, redraws) of a replicate list."""
    return {
        "R_n": np.fromiter((r.R_n for r in replicates), dtype=np.int64, count=len(replicates)),
        "V_n": np.fromiter((r.V_n for r in replicates), dtype=float, count=len(replicates)),
        "missing_mass": np.fromiter((r.missing_mass for r in replicates), dtype=float,
                                    count=len(replicates)),
        "fresh_outside": np.fromiter((r.fresh_outside for r in replicates), dtype=np.int64,
                                     count=len(replicates)),
        "redraws": np.fromiter((r.redraws for r in replicates), dtype=np.int64,
                               count=len(replicates)),
    }
