"""Parametric convex bodies: ball, box, simplex, ellipsoid and explicit polytope.

All bodies share one small interface (``contains``, ``volume``,
``boundary_distance``, ``bounding_box``, ``support``, ``inradius``,
``surface_area_bound``, ``john_ellipsoid``, ``affine_image``); membership and
distance methods are vectorized over the rows of an (m, d) array.
"""

import math

import numpy as np
from scipy.special import ellipe

from ..errors import DimensionMismatch, OutsideBody, SingularTransform, Unsupported
from .polytope import Polytope, contains as polytope_contains
from .steiner import ball_volume, sphere_area


def _vec(x, name="point"):
    a = np.array(x, dtype=float)
    if a.ndim != 1:
        raise DimensionMismatch(f"{name} must be a vector")
    a.flags.writeable = False
    return a


class ConvexBody:
    kind = None

    @property
    def dim(self):
        raise NotImplementedError

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"point has dimension {x.shape[-1]}, body has {self.dim}")
        return x

    def contains(self, x, tol=None):
        x = self._check(x)
        tol = self.tol if tol is None else tol
        single = x.ndim == 1
        out = self._contains(np.atleast_2d(x), tol)
        return bool(out[0]) if single else out

    @property
    def tol(self):
        lo, hi = self.bounding_box()
        return 1e-12 * max(1.0, float(np.abs(np.concatenate([lo, hi])).max()))

    def boundary_distance(self, x):
        """Distance from interior points to the boundary; OutsideBody if any point is outside."""
        x = self._check(x)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        if not np.all(self._contains(X, self.tol)):
            raise OutsideBody("boundary_distance needs points inside the body")
        out = np.maximum(self._boundary_distance(X), 0.0)
        return float(out[0]) if single else out

    def support(self, u):
        """Support function h(u) = max_{x in K} <u, x>, vectorized over rows of ``u``."""
        return self._support(np.atleast_2d(np.asarray(u, dtype=float)))

    def affine_image(self, matrix, shift):
        A = np.asarray(matrix, dtype=float)
        b = np.asarray(shift, dtype=float)
        if A.shape != (self.dim, self.dim) or b.shape != (self.dim,):
            raise DimensionMismatch("affine map does not match the body's dimension")
        if abs(np.linalg.det(A)) <= 1e-9:
            raise SingularTransform("affine map is not invertible")
        return self._affine_image(A, b)

    def john_ellipsoid(self):
        raise Unsupported(f"no closed-form John ellipsoid for kind {self.kind!r}")

    def surface_area_bound(self):
        """Surface area where it has a closed form, else an upper bound for it."""
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and all(
            np.array_equal(a, b) for a, b in zip(self._params(), other._params())
        )

    def __hash__(self):
        return hash((self.kind,) + tuple(np.asarray(p).tobytes() for p in self._params()))


class Ball(ConvexBody):
    kind = "ball"

    def __init__(self, center, radius=1.0):
        self.center = _vec(center, "center")
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @classmethod
    def unit(cls, d):
        return cls(np.zeros(d), 1.0)

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"

    def _params(self):
        return (self.center, self.radius)

    @property
    def dim(self):
        return len(self.center)

    def volume(self):
        return ball_volume(self.dim, self.radius)

    def _contains(self, X, tol):
        return np.linalg.norm(X - self.center, axis=1) <= self.radius + tol

    def _boundary_distance(self, X):
        return self.radius - np.linalg.norm(X - self.center, axis=1)

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def _support(self, U):
        return U @ self.center + self.radius * np.linalg.norm(U, axis=1)

    def inradius(self):
        return self.radius

    def surface_area_bound(self):
        return sphere_area(self.dim, self.radius)

    def john_ellipsoid(self):
        return self.center.copy(), self.radius * np.eye(self.dim)

    def _affine_image(self, A, b):
        return Ellipsoid(A @ self.center + b, self.radius * A)


class Box(ConvexBody):
    kind = "box"

    def __init__(self, lower, upper):
        self.lower = _vec(lower, "lower")
        self.upper = _vec(upper, "upper")
        if self.lower.shape != self.upper.shape or np.any(self.upper <= self.lower):
            raise ValueError("box needs lower < upper componentwise")

    @classmethod
    def unit(cls, d):
        return cls(np.zeros(d), np.ones(d))

    def __repr__(self):
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"

    def _params(self):
        return (self.lower, self.upper)

    @property
    def dim(self):
        return len(self.lower)

    def volume(self):
        return float(np.prod(self.upper - self.lower))

    def _contains(self, X, tol):
        return np.all((X >= self.lower - tol) & (X <= self.upper + tol), axis=1)

    def _boundary_distance(self, X):
        return np.minimum(X - self.lower, self.upper - X).min(axis=1)

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def _support(self, U):
        return np.where(U > 0, U * self.upper, U * self.lower).sum(axis=1)

    def inradius(self):
        return float((self.upper - self.lower).min() / 2)

    def surface_area_bound(self):
        w = self.upper - self.lower
        return float(sum(2 * np.prod(np.delete(w, i)) for i in range(self.dim)))

    def john_ellipsoid(self):
        return (self.lower + self.upper) / 2, np.diag((self.upper - self.lower) / 2)

    def polytope(self):
        d = self.dim
        corners = np.array(np.meshgrid(*[[0, 1]] * d, indexing="ij")).reshape(d, -1).T
        from .hull import convex_hull
        return convex_hull(self.lower + corners * (self.upper - self.lower))

    def _affine_image(self, A, b):
        return PolytopeBody(affine_polytope(self.polytope(), A, b))


class Simplex(ConvexBody):
    kind = "simplex"

    def __init__(self, vertices):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1] + 1:
            raise DimensionMismatch("a d-simplex needs d + 1 vertices in R^d")
        V.flags.writeable = False
        self.vertices = V
        E = V[1:] - V[0]
        self._vol = abs(np.linalg.det(E)) / math.factorial(self.dim)
        if self._vol <= 0:
            raise ValueError("simplex is degenerate")
        self._Einv = np.linalg.inv(E)
        from .hull import convex_hull
        self._poly = convex_hull(V)

    @classmethod
    def standard(cls, d):
        """conv{0, e_1, ..., e_d}."""
        return cls(np.vstack([np.zeros(d), np.eye(d)]))

    @classmethod
    def regular(cls, d):
        """Regular simplex inscribed in the unit sphere, centered at the origin."""
        E = np.eye(d + 1) - 1.0 / (d + 1)
        _, _, vt = np.linalg.svd(E)
        V = E @ vt[:d].T
        return cls(V / np.linalg.norm(V[0]))

    def __repr__(self):
        return f"Simplex(vertices={self.vertices.tolist()})"

    def _params(self):
        return (self.vertices,)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def volume(self):
        return self._vol

    def barycentric(self, X):
        lam = (np.atleast_2d(X) - self.vertices[0]) @ self._Einv
        return np.column_stack([1 - lam.sum(axis=1), lam])

    def _contains(self, X, tol):
        return polytope_contains(self._poly, X, tol)

    def _boundary_distance(self, X):
        return (self._poly.offsets[None, :] - X @ self._poly.normals.T).min(axis=1)

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def _support(self, U):
        return (U @ self.vertices.T).max(axis=1)

    def surface_area_bound(self):
        return self._poly.surface_area()

    def inradius(self):
        return self.dim * self._vol / self._poly.surface_area()

    def polytope(self):
        return self._poly

    def john_ellipsoid(self):
        # affine image of the regular simplex's insphere (radius 1/d of its circumsphere)
        d = self.dim
        c = self.vertices.mean(axis=0)
        D = self.vertices - c
        w, Q = np.linalg.eigh(D.T @ D / (d * (d + 1)))
        return c, Q @ np.diag(np.sqrt(w)) @ Q.T

    def _affine_image(self, A, b):
        return Simplex(self.vertices @ A.T + b)


class Ellipsoid(ConvexBody):
    """{center + shape @ u : |u| <= 1}."""

    kind = "ellipsoid"

    def __init__(self, center, shape):
        self.center = _vec(center, "center")
        A = np.array(shape, dtype=float)
        if A.shape != (len(self.center),) * 2:
            raise DimensionMismatch("shape must be a d x d matrix")
        if abs(np.linalg.det(A)) <= 0:
            raise ValueError("ellipsoid shape matrix is singular")
        A.flags.writeable = False
        self.shape = A
        U, s, _ = np.linalg.svd(A)
        self._axes = U          # principal directions (columns)
        self._semi = s          # semi-axis lengths
        self._Ainv = np.linalg.inv(A)

    def __repr__(self):
        return f"Ellipsoid(center={self.center.tolist()}, shape={self.shape.tolist()})"

    def _params(self):
        return (self.center, self.shape)

    @property
    def dim(self):
        return len(self.center)

    @property
    def semi_axes(self):
        return self._semi.copy()

    def volume(self):
        return ball_volume(self.dim) * float(np.prod(self._semi))

    def _contains(self, X, tol):
        r = np.linalg.norm((X - self.center) @ self._Ainv.T, axis=1)
        return r <= 1 + tol / self._semi.min()

    def _boundary_distance(self, X):
        Y = (X - self.center) @ self._axes
        return _ellipsoid_gap(Y, self._semi)

    def bounding_box(self):
        half = np.linalg.norm(self.shape, axis=1)
        return self.center - half, self.center + half

    def _support(self, U):
        return U @ self.center + np.linalg.norm(U @ self.shape, axis=1)

    def inradius(self):
        return float(self._semi.min())

    def surface_area_bound(self):
        if self.dim == 2:
            a, b = self._semi
            return float(4 * a * ellipe(1 - (b / a) ** 2))
        return sphere_area(self.dim, float(self._semi.max()))

    def john_ellipsoid(self):
        return self.center.copy(), self.shape.copy()

    def _affine_image(self, A, b):
        return Ellipsoid(A @ self.center + b, A @ self.shape)


def _ratio(num, den):
    # zero numerators stay zero even where the denominator vanishes
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(num == 0, 0.0, num / den)


def _ellipsoid_gap(Y, e, iters=120):
    """Distance to the boundary of the axis-aligned ellipsoid sum (y_i/e_i)^2 <= 1.

    Interior points only. The nearest boundary point is x_i = e_i^2 y_i / (t + e_i^2)
    with the multiplier t in [-e_min^2, 0] solving sum (e_i y_i / (t + e_i^2))^2 = 1;
    when y has no component along the shortest axis the multiplier may pin at
    -e_min^2, and the remaining slack is taken up along that axis.
    """
    Y = np.abs(Y)
    e2 = e ** 2
    emin2 = e2.min()
    short = np.isclose(e2, emin2, rtol=1e-12, atol=0)
    m = len(Y)

    with np.errstate(divide="ignore", invalid="ignore"):
        long_terms = np.where(short, 0.0, (e * Y / (e2 - emin2)) ** 2)
    pinned_level = long_terms.sum(axis=1)
    pinned = np.all(Y[:, short] == 0, axis=1) & (pinned_level <= 1)

    lo = np.full(m, -emin2)
    hi = np.zeros(m)
    for _ in range(iters):
        t = 0.5 * (lo + hi)
        F = (_ratio(e * Y, t[:, None] + e2) ** 2).sum(axis=1) - 1
        up = F > 0
        lo = np.where(up, t, lo)
        hi = np.where(up, hi, t)
    t = 0.5 * (lo + hi)
    Xb = _ratio(e2 * Y, t[:, None] + e2)
    dist = np.linalg.norm(Xb - Y, axis=1)

    if np.any(pinned):
        Yp = Y[pinned]
        with np.errstate(divide="ignore", invalid="ignore"):
            Xp = np.where(short, 0.0, e2 * Yp / (e2 - emin2))
        rest = np.clip(1 - pinned_level[pinned], 0, None)
        along = np.sqrt(emin2 * rest)
        dist_p = np.sqrt(((Xp - Yp) ** 2).sum(axis=1) + along ** 2)
        dist[pinned] = dist_p
    return dist


class PolytopeBody(ConvexBody):
    """A convex body given explicitly as a Polytope."""

    kind = "poly"

    def __init__(self, polytope):
        if not isinstance(polytope, Polytope):
            raise TypeError("PolytopeBody wraps a Polytope")
        self.polytope = polytope

    @classmethod
    def from_points(cls, points, **kw):
        from .hull import convex_hull
        return cls(convex_hull(points, **kw))

    def __repr__(self):
        return f"PolytopeBody({self.polytope!r})"

    def _params(self):
        return (self.polytope.vertices,)

    @property
    def dim(self):
        return self.polytope.dim

    def volume(self):
        return self.polytope.volume()

    def _contains(self, X, tol):
        return polytope_contains(self.polytope, X, tol)

    def _boundary_distance(self, X):
        P = self.polytope
        return (P.offsets[None, :] - X @ P.normals.T).min(axis=1)

    def bounding_box(self):
        return self.polytope.bounding_box()

    def _support(self, U):
        return self.polytope.support(U)

    def surface_area_bound(self):
        return self.polytope.surface_area()

    def inradius(self):
        from scipy.optimize import linprog
        P = self.polytope
        d = P.dim
        # Chebyshev center: maximize r subject to n_i . x + r <= b_i
        c = np.zeros(d + 1)
        c[-1] = -1
        A = np.column_stack([P.normals, np.ones(len(P.offsets))])
        res = linprog(c, A_ub=A, b_ub=P.offsets, bounds=[(None, None)] * d + [(0, None)],
                      method="highs")
        return float(res.x[-1])

    def _affine_image(self, A, b):
        return PolytopeBody(affine_polytope(self.polytope, A, b))


def affine_polytope(P, A, b):
    """Image of a Polytope under x -> A x + b (A invertible)."""
    Ainv_t = np.linalg.inv(A).T
    n = P.normals @ Ainv_t.T
    norm = np.linalg.norm(n, axis=1)
    offsets = (P.offsets + n @ b) / norm
    return Polytope(P.vertices @ A.T + b, n / norm[:, None], offsets, P.simplices,
                    P.simplex_facet, A @ P.interior_point + b, P.tol * max(1.0, np.linalg.norm(A, 2)))
