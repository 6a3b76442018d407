"""Convex hulls in R^d.

The default algorithm is incremental beneath-beyond insertion driven by
conflict lists (each unprocessed point is attached to one facet it sees; the
farthest such point is inserted next). Facets are simplices linked through a
ridge -> facets adjacency map, so the visible region of a new point is found
by a graph search from the facet that owns it.

``method="qhull"`` delegates the combinatorics to scipy's Qhull and rebuilds
the same Polytope value from its triangulated output; the Monte Carlo drivers
use it for throughput.
"""

from itertools import combinations

import math
import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..errors import DegenerateInput, DimensionMismatch
from .distance import _nearest_in_hull
from .polytope import assemble, pyramid_volume

METHODS = ("beneath-beyond", "qhull")


def as_points(points):
    """Coerce input to a float (n, d) array, rejecting ragged or non-finite input."""
    try:
        X = np.asarray(points, dtype=float)
    except ValueError as exc:
        raise DimensionMismatch(f"ragged point set: {exc}") from None
    if X.ndim != 2:
        raise DimensionMismatch(f"expected an (n, d) point array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")
    return X


def default_tolerance(X):
    """tau_geom = 1e-9 times the diameter scale of the point cloud."""
    scale = float(np.ptp(X, axis=0).max()) if len(X) else 1.0
    return 1e-9 * max(scale, 1e-300)


def convex_hull(points, tol=None, method="beneath-beyond"):
    """Convex hull of ``points`` as a Polytope.

    Raises DegenerateInput if the points do not affinely span R^d (including
    fewer than d + 1 points) and DimensionMismatch on ragged input.
    """
    X = as_points(points)
    n, d = X.shape
    if d < 2:
        raise DimensionMismatch("convex_hull needs dimension >= 2")
    if n < d + 1:
        raise DegenerateInput(f"need at least {d + 1} points in dimension {d}, got {n}")
    if tol is None:
        tol = default_tolerance(X)
    if method not in METHODS:
        raise ValueError(f"unknown hull method {method!r}; choose from {METHODS}")
    build = _qhull if method == "qhull" else _beneath_beyond
    P = build(X, tol)
    # a point can end up on the boundary without being extreme (e.g. inserted
    # before the face it lies on was completed); rebuild from extreme points only
    while True:
        keep = _extreme_mask(P)
        if keep.all():
            return P
        if keep.sum() < d + 1:
            raise DegenerateInput("extreme points do not span R^d")
        P = build(P.vertices[keep], tol)


def _extreme_mask(P):
    """A vertex is extreme iff it lies farther than tol from the hull of the others.

    Screen: the normals of the facets through an extreme vertex span R^d.
    Vertices failing the screen (rare: points on faces, or very sharp
    vertices) are settled by an exact projection onto the hull of the rest.
    """
    on = (P.offsets[None, :] - P.vertices @ P.normals.T) <= P.tol
    d = P.dim
    outer = (P.normals[:, :, None] * P.normals[:, None, :]).reshape(-1, d * d)
    M = (on.astype(float) @ outer).reshape(-1, d, d)
    keep = np.linalg.eigvalsh(M)[:, 0] > 1e-10
    V = P.vertices
    for i in np.flatnonzero(~keep):
        others = np.delete(V, i, axis=0)
        y, _, _ = _nearest_in_hull(others - V[i], 0.1 * P.tol, 10_000)
        keep[i] = np.linalg.norm(y) > P.tol
    return keep


def _qhull(X, tol):
    try:
        h = ConvexHull(X)
    except QhullError as exc:
        raise DegenerateInput(f"points do not span R^{X.shape[1]}: {exc.args[0].splitlines()[0]}") from None
    return assemble(X, h.simplices, tol, h.equations[:, :-1], -h.equations[:, -1])


def _initial_simplex(X, tol):
    """Greedy d + 1 affinely independent points, each farthest from the span so far."""
    n, d = X.shape
    first = int(np.argmax(np.linalg.norm(X - X.mean(axis=0), axis=1)))
    chosen = [first]
    basis = np.zeros((0, d))
    for _ in range(d):
        resid = X - X[first]
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            resid = resid - (resid @ basis.T) @ basis
        dist = np.linalg.norm(resid, axis=1)
        dist[chosen] = 0.0
        k = int(np.argmax(dist))
        if dist[k] <= tol:
            raise DegenerateInput(
                f"points lie in an affine subspace of dimension {len(chosen) - 1} < {d}"
            )
        chosen.append(k)
        basis = np.vstack([basis, resid[k] / dist[k]])
    return chosen


def _plane(X, verts, interior):
    V = X[list(verts)]
    _, _, vt = np.linalg.svd(V[1:] - V[0])
    normal = vt[-1]
    offset = float(normal @ V[0])
    if normal @ interior > offset:
        normal, offset = -normal, -offset
    return normal, offset


class _Facet:
    __slots__ = ("verts", "normal", "offset", "outside")

    def __init__(self, verts, normal, offset):
        self.verts = verts
        self.normal = normal
        self.offset = offset
        self.outside = np.empty(0, dtype=np.intp)


def _beneath_beyond(X, tol):
    n, d = X.shape
    init = _initial_simplex(X, tol)
    interior = X[init].mean(axis=0)

    facets = {}
    ridges = {}
    next_id = 0

    def add_facet(verts):
        nonlocal next_id
        normal, offset = _plane(X, verts, interior)
        fid = next_id
        next_id += 1
        facets[fid] = _Facet(tuple(sorted(verts)), normal, offset)
        for r in combinations(facets[fid].verts, d - 1):
            ridges.setdefault(r, []).append(fid)
        return fid

    def assign(candidates, fids):
        if len(candidates) == 0 or not fids:
            return
        N = np.array([facets[f].normal for f in fids])
        B = np.array([facets[f].offset for f in fids])
        D = X[candidates] @ N.T - B
        best = D.argmax(axis=1)
        out = D[np.arange(len(candidates)), best] > tol
        for j, f in enumerate(fids):
            facets[f].outside = candidates[out & (best == j)]

    first = [add_facet(init[:k] + init[k + 1:]) for k in range(d + 1)]
    rest = np.setdiff1d(np.arange(n), init)
    assign(rest, first)

    pending = [f for f in first if len(facets[f].outside)]
    while pending:
        fid = pending.pop()
        facet = facets.get(fid)
        if facet is None or len(facet.outside) == 0:
            continue
        dist = X[facet.outside] @ facet.normal - facet.offset
        p = int(facet.outside[np.argmax(dist)])
        xp = X[p]

        visible = {fid}
        stack = [fid]
        horizon = []
        while stack:
            f = stack.pop()
            for r in combinations(facets[f].verts, d - 1):
                g = ridges[r][0] if ridges[r][1] == f else ridges[r][1]
                if g in visible:
                    continue
                G = facets[g]
                if xp @ G.normal - G.offset > tol:
                    visible.add(g)
                    stack.append(g)
                else:
                    horizon.append((r, f))

        orphans = np.unique(np.concatenate([facets[f].outside for f in visible]))
        orphans = orphans[orphans != p]
        for f in visible:
            for r in combinations(facets[f].verts, d - 1):
                owners = ridges.get(r)
                if owners is None:
                    continue
                owners.remove(f)
                if not owners:
                    del ridges[r]
            del facets[f]

        new = [add_facet(r + (p,)) for r, _ in horizon]
        assign(orphans, new)
        pending.extend(f for f in new if len(facets[f].outside))

    simplices = np.array([f.verts for f in facets.values()], dtype=np.intp)
    normals = np.array([f.normal for f in facets.values()])
    offsets = np.array([f.offset for f in facets.values()])
    return assemble(X, simplices, tol, normals, offsets)



class HullSummary:
    """Vertex count, volume and facet half-spaces of a hull, without the full Polytope."""

    __slots__ = ("n_vertices", "volume", "normals", "offsets")

    def __init__(self, n_vertices, volume, normals, offsets):
        self.n_vertices = n_vertices
        self.volume = volume
        self.normals = normals
        self.offsets = offsets

    def contains(self, X, tol=0.0):
        return np.all(X @ self.normals.T <= self.offsets + tol, axis=1)


SMALL_PLANAR = 32


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _planar_summary(X):
    # monotone chain; Qhull's per-call overhead dominates for a handful of points
    pts = sorted(map(tuple, X.tolist()))
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    ring = lower[:-1] + upper[:-1]
    k = len(ring)
    area = 0.0
    rows = []
    for i in range(k):
        (x0, y0), (x1, y1) = ring[i], ring[(i + 1) % k]
        area += x0 * y1 - y0 * x1
        ex, ey = x1 - x0, y1 - y0
        norm = math.hypot(ex, ey)
        rows.append((ey / norm, -ex / norm, (ey * x0 - ex * y0) / norm))
    area *= 0.5
    scale = max(max(abs(a), abs(b)) for a, b in pts) or 1.0
    if k < 3 or area <= 1e-12 * scale * scale:
        raise DegenerateInput("points are collinear")
    H = np.array(rows)
    return HullSummary(k, area, H[:, :2], H[:, 2])


def hull_summary(points, method="qhull"):
    """Lean path for Monte Carlo loops: same vertex count and volume as
    ``convex_hull(points, method=method)`` with far less per-call overhead."""
    X = np.asarray(points, dtype=float)
    if method == "qhull" and X.ndim == 2 and X.shape[1] == 2 and len(X) <= SMALL_PLANAR:
        return _planar_summary(X)
    if method != "qhull":
        P = convex_hull(X, method=method)
        return HullSummary(P.n_vertices, P.volume(), P.normals, P.offsets)
    try:
        h = ConvexHull(X)
    except QhullError as exc:
        raise DegenerateInput(str(exc).splitlines()[0]) from None
    n = h.equations[:, :-1]
    b = -h.equations[:, -1]
    interior = X[h.vertices].mean(axis=0)
    return HullSummary(len(h.vertices), pyramid_volume(X[h.simplices], n, b, interior), n, b)
