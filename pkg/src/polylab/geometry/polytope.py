"""Polytope value type: vertices, merged facet half-spaces, boundary triangulation."""

import math

import numpy as np

from ..errors import DimensionMismatch, InvalidPolytope


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


class Polytope:
    """A full-dimensional convex polytope in R^d.

    Facets are half-spaces ``normals @ x <= offsets`` with unit normals and
    offsets in absolute coordinates. ``simplices`` is a triangulation of the
    boundary: each row holds ``d`` indices into ``vertices`` and
    ``simplex_facet`` names the facet that simplex lies on.

    Instances are immutable; arrays are read-only.
    """

    __slots__ = (
        "vertices", "normals", "offsets", "simplices", "simplex_facet",
        "interior_point", "tol", "_volume",
    )

    def __init__(self, vertices, normals, offsets, simplices, simplex_facet,
                 interior_point=None, tol=1e-9):
        vertices = _frozen(vertices)
        if vertices.ndim != 2:
            raise DimensionMismatch("vertices must be a 2-d array")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "normals", _frozen(normals).reshape(-1, vertices.shape[1]))
        object.__setattr__(self, "offsets", _frozen(offsets).reshape(-1))
        object.__setattr__(self, "simplices", _frozen(simplices, np.intp).reshape(-1, vertices.shape[1]))
        object.__setattr__(self, "simplex_facet", _frozen(simplex_facet, np.intp).reshape(-1))
        if interior_point is None:
            interior_point = vertices.mean(axis=0)
        object.__setattr__(self, "interior_point", _frozen(interior_point))
        object.__setattr__(self, "tol", float(tol))
        object.__setattr__(self, "_volume", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polytope is immutable")

    def __repr__(self):
        return (f"Polytope(dim={self.dim}, n_vertices={len(self.vertices)}, "
                f"n_facets={len(self.offsets)})")

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    def contains(self, x, tol=None):
        return contains(self, x, tol)

    def volume(self):
        if self._volume is None:
            object.__setattr__(self, "_volume", polytope_volume(self))
        return self._volume

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def support(self, u):
        """Support function h(u) = max_v <u, v>, vectorized over rows of ``u``."""
        return (np.atleast_2d(u) @ self.vertices.T).max(axis=1)

    def surface_area(self):
        V = self.vertices[self.simplices]
        n = self.normals[self.simplex_facet]
        return float(_frame_dets(V, n).sum() / math.factorial(self.dim - 1))

    def validate(self, tol=None):
        """Check the structural invariants; raise InvalidPolytope on failure."""
        tol = self.tol if tol is None else tol
        d = self.dim
        slack = self.offsets[None, :] - self.vertices @ self.normals.T
        if np.any(slack < -tol):
            raise InvalidPolytope("a vertex violates a facet inequality")
        on = slack <= tol
        for i, row in enumerate(on):
            if np.linalg.matrix_rank(self.normals[row], tol=1e-7) < d:
                raise InvalidPolytope(f"vertex {i} is not an extreme point")
        if np.any(self.offsets - self.normals @ self.interior_point <= tol):
            raise InvalidPolytope("interior point is not strictly inside")
        # closed boundary: every ridge of the triangulation is shared by exactly two simplices
        ridges = {}
        for s in self.simplices:
            for k in range(d):
                key = tuple(sorted(np.delete(s, k)))
                ridges[key] = ridges.get(key, 0) + 1
        if any(c != 2 for c in ridges.values()):
            raise InvalidPolytope("boundary triangulation is not closed")
        polytope_volume(self)
        return True


def contains(P, x, tol=None):
    """True where every facet inequality holds with slack >= -tol.

    ``x`` may be a single point (returns bool) or an (m, d) array (returns a
    boolean array). Boundary points count as inside.
    """
    tol = P.tol if tol is None else tol
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != P.dim:
        raise DimensionMismatch(f"point has dimension {x.shape[-1]}, polytope has {P.dim}")
    if x.ndim == 1:
        return bool(np.all(P.normals @ x <= P.offsets + tol))
    return np.all(x @ P.normals.T <= P.offsets + tol, axis=1)


def polytope_volume(P):
    """Volume as a sum of pyramids from the interior point over boundary simplices.

    Each pyramid contributes ``|det(edges, n)| * h / d!`` where ``h`` is the
    signed height of the interior point below the simplex's facet; a
    non-positive height or a simplex off its facet plane means the
    triangulation does not describe this polytope.
    """
    d = P.dim
    S = P.simplices
    if S.size == 0 or S.min() < 0 or S.max() >= P.n_vertices:
        raise InvalidPolytope("triangulation indices do not match the vertex set")
    if P.simplex_facet.min() < 0 or P.simplex_facet.max() >= len(P.offsets):
        raise InvalidPolytope("triangulation references a missing facet")
    V = P.vertices[S]
    n = P.normals[P.simplex_facet]
    b = P.offsets[P.simplex_facet]
    scale = max(1.0, float(np.abs(P.vertices).max()))
    off_plane = np.abs(np.einsum("tkd,td->tk", V, n) - b[:, None])
    if off_plane.max() > max(P.tol, 1e-9 * scale) * 10:
        raise InvalidPolytope("a boundary simplex does not lie on its facet hyperplane")
    return pyramid_volume(V, n, b, P.interior_point)


def pyramid_volume(V, n, b, interior):
    """Sum over boundary simplices ``V`` (t, d, d) with outward planes (n, b) of the
    pyramid volume |det(edges, n)| * h / d!, h = b - n . interior."""
    h = b - n @ interior
    if np.any(h <= 0):
        raise InvalidPolytope("interior point is not below every boundary simplex")
    return float(np.dot(_frame_dets(V, n), h) / math.factorial(V.shape[2]))


def _frame_dets(V, n):
    """|det(v_2 - v_1, ..., v_d - v_1, n)| for each boundary simplex; (d-1)! times its area."""
    d = V.shape[2]
    if d == 2:
        e = V[:, 1] - V[:, 0]
        return np.abs(e[:, 0] * n[:, 1] - e[:, 1] * n[:, 0])
    if d == 3:
        return np.abs(np.einsum("ti,ti->t", np.cross(V[:, 1] - V[:, 0], V[:, 2] - V[:, 0]), n))
    edges = V[:, 1:, :] - V[:, :1, :]
    return np.abs(np.linalg.det(np.concatenate([edges, n[:, None, :]], axis=1)))


def _simplex_planes(points, simplices, interior):
    """Unit outward normals and offsets of the hyperplanes through each simplex."""
    V = points[simplices]
    edges = V[:, 1:, :] - V[:, :1, :]
    _, _, vt = np.linalg.svd(edges)
    n = vt[:, -1, :]
    b = np.einsum("td,td->t", n, V[:, 0, :])
    flip = n @ interior > b
    n[flip] *= -1
    b[flip] *= -1
    return n, b


def _merge_facets(normals, offsets, tol, corners):
    """Group coplanar boundary simplices; returns (labels, unique normals, offsets).

    A simplex joins the first facet whose plane passes within ``tol`` of all
    its corners (``corners`` is the (t, d, d) array of simplex vertices).
    """
    f = len(offsets)
    labels = np.empty(f, dtype=np.intp)
    chunk = 2048
    for start in range(0, f, chunk):
        block = slice(start, start + chunk)
        close = (normals[block] @ normals.T > 1.0 - 1e-9) & (
            np.abs(offsets[block, None] - offsets[None, :]) <= tol
        )
        labels[block] = close.argmax(axis=1)
    moved = np.flatnonzero(labels != np.arange(f))
    if len(moved):
        rep = labels[moved]
        off = np.abs(np.einsum("tkd,td->tk", corners[moved], normals[rep]) - offsets[rep][:, None])
        labels[moved[off.max(axis=1) > tol]] = moved[off.max(axis=1) > tol]
    if np.array_equal(labels, np.arange(f)):
        return labels, normals, offsets
    reps, labels = np.unique(labels, return_inverse=True)
    return labels, normals[reps], offsets[reps]


def assemble(points, simplices, tol, normals=None, offsets=None, interior=None):
    """Build a Polytope from a triangulated hull boundary over ``points``.

    ``simplices`` index into ``points``; the vertex set is taken to be the
    points those simplices reference.
    """
    points = np.asarray(points, dtype=float)
    simplices = np.asarray(simplices, dtype=np.intp)
    used, local = np.unique(simplices, return_inverse=True)
    local = local.reshape(simplices.shape)
    verts = points[used]
    if interior is None:
        interior = verts.mean(axis=0)
    if normals is None:
        normals, offsets = _simplex_planes(points, simplices, interior)
    labels, fn, fb = _merge_facets(np.asarray(normals, float), np.asarray(offsets, float), tol,
                                   points[simplices])
    return Polytope(verts, fn, fb, local, labels, interior, tol)
