"""Random points from the density classes used in the experiments.

Every sampler takes an ``RngStream`` (or a ``numpy.random.Generator``) and is
a pure function of it: the same stream and parameters give the same points.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import LowAcceptanceWarning, OutsideSupport, Unsupported
from .geometry import Ball, Box, ConvexBody, Ellipsoid, PolytopeBody, Simplex, convex_hull
from .geometry.steiner import ball_volume
from .rng import RngStream, as_generator

LOW_ACCEPTANCE = 1e-3
NORMALIZATION_POINTS = 10**6
# fixed stream for normalizing constants, so Z depends only on the density
_NORMALIZATION_STREAM = RngStream(0x5EED_2A11, 0)


def _direct_uniform(K, n, g):
    d = K.dim
    if isinstance(K, Ball):
        z = g.standard_normal((n, d))
        r = g.random(n) ** (1.0 / d)
        z *= (r / np.linalg.norm(z, axis=1))[:, None]
        return K.center + K.radius * z
    if isinstance(K, Ellipsoid):
        z = g.standard_normal((n, d))
        r = g.random(n) ** (1.0 / d)
        z *= (r / np.linalg.norm(z, axis=1))[:, None]
        return K.center + z @ K.shape.T
    if isinstance(K, Box):
        return K.lower + (K.upper - K.lower) * g.random((n, d))
    if isinstance(K, Simplex):
        # normalized exponential spacings are uniform barycentric weights
        w = g.standard_exponential((n, d + 1))
        w /= w.sum(axis=1, keepdims=True)
        return w @ K.vertices
    return None


def _rejection_uniform(K, n, g):
    """Uniform points in K by rejection from a principal-axis bounding box."""
    d = K.dim
    if isinstance(K, PolytopeBody):
        V = K.polytope.vertices
        c = V.mean(axis=0)
        _, _, R = np.linalg.svd(V - c)
        Y = (V - c) @ R.T
        lo, hi = Y.min(axis=0), Y.max(axis=0)
    else:
        c, R = np.zeros(d), np.eye(d)
        lo, hi = K.bounding_box()
    acc_est = min(1.0, K.volume() / float(np.prod(hi - lo)))
    out = []
    have = proposed = 0
    while have < n:
        batch = int(min(max(1024, 1.2 * (n - have) / max(acc_est, 1e-6)), 2**22))
        Y = lo + (hi - lo) * g.random((batch, d))
        X = c + Y @ R
        X = X[K.contains(X, 0.0)]
        proposed += batch
        out.append(X)
        have += len(X)
        acc_est = max(have / proposed, 1e-6)
    if have / proposed < LOW_ACCEPTANCE:
        warnings.warn(
            f"rejection acceptance {have / proposed:.2e} < {LOW_ACCEPTANCE:g}; "
            "precondition the body with john_ellipsoid_analytic + affine_map",
            LowAcceptanceWarning, stacklevel=3,
        )
    return np.concatenate(out)[:n]


def sample_uniform(K, n, rng):
    """``n`` i.i.d. uniform points in the body ``K`` as an (n, d) array."""
    if n < 0:
        raise ValueError("n must be >= 0")
    g = as_generator(rng)
    if n == 0:
        return np.empty((0, K.dim))
    X = _direct_uniform(K, n, g)
    return X if X is not None else _rejection_uniform(K, n, g)


@dataclass(frozen=True)
class MarginParameters:
    """Slow-decay constants (f >= c min(rho0, dist to boundary)^gamma) and the
    margin condition they imply: |{f <= t}| <= L t^alpha for 0 < t <= t0."""

    gamma: float
    rho0: float
    c: float
    alpha: float
    L: float
    t0: float
    kappa: float


@dataclass
class SampleInfo:
    proposals: int
    accepted: int
    margin: MarginParameters = None
    extra: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposals if self.proposals else float("nan")


def _margin_weight(K, X, gamma, rho0, top):
    if gamma == 0:
        return np.ones(len(X))
    return (np.minimum(rho0, K.boundary_distance(X)) / top) ** gamma


def _margin_power_points(K, gamma, rho0, n, g):
    top = min(rho0, K.inradius())
    out = []
    have = proposed = 0
    acc_est = 0.5
    while have < n:
        batch = int(min(max(1024, 1.2 * (n - have) / acc_est), 2**22))
        X = sample_uniform(K, batch, g)
        keep = g.random(batch) < _margin_weight(K, X, gamma, rho0, top)
        proposed += batch
        out.append(X[keep])
        have += int(keep.sum())
        acc_est = max(have / proposed, 1e-6)
    X = np.concatenate(out)
    return X[:n], proposed, have


def sample_margin_power(K, gamma, rho0, n, rng, return_info=False):
    """Points with density proportional to min(rho0, dist(x, boundary of K))^gamma.

    Rejection from the uniform law on K with acceptance weight
    (min(rho0, dist) / min(rho0, inradius))^gamma. With ``return_info`` the
    proposal counts and the margin constants of the realized density are
    returned alongside the points.
    """
    if gamma < 0 or not math.isfinite(gamma):
        raise ValueError("gamma must be finite and >= 0 (use the uniform sampler for gamma = inf)")
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    g = as_generator(rng)
    if n == 0:
        X, proposed, have = np.empty((0, K.dim)), 0, 0
    else:
        X, proposed, have = _margin_power_points(K, gamma, rho0, n, g)
    if not return_info:
        return X
    spec = DensitySpec.margin_power(K, gamma, rho0)
    return X, SampleInfo(proposed, have, spec.margin_parameters())


def sample_projection(K0, d, n, rng, return_info=False):
    """First ``d`` coordinates of uniform points in the body ``K0`` of R^D."""
    D = K0.dim
    if not 2 <= d < D:
        raise ValueError(f"need 2 <= d < D, got d={d}, D={D}")
    Y = sample_uniform(K0, n, rng)
    X = np.ascontiguousarray(Y[:, :d])
    if not return_info:
        return X
    spec = DensitySpec.projection(K0, d)
    info = SampleInfo(n, n, spec.margin_parameters(),
                      {"gamma": (D - d) / 2, "rolling_radius": _rolling_radius(K0)})
    return X, info


def _rolling_radius(K0):
    return K0.radius if isinstance(K0, Ball) else None


def project_body(K0, d):
    """Orthogonal projection of K0 onto its first d coordinates."""
    if isinstance(K0, Ball):
        return Ball(K0.center[:d], K0.radius)
    if isinstance(K0, Box):
        return Box(K0.lower[:d], K0.upper[:d])
    if isinstance(K0, Ellipsoid):
        S = (K0.shape @ K0.shape.T)[:d, :d]
        return Ellipsoid(K0.center[:d], np.linalg.cholesky(S))
    verts = K0.vertices if isinstance(K0, Simplex) else K0.polytope.vertices
    return PolytopeBody(convex_hull(verts[:, :d]))


KINDS = ("uniform", "margin_power", "projection")


@dataclass(frozen=True)
class DensitySpec:
    """A bounded density on a convex body.

    kind ``uniform``: 1/|K|. kind ``margin_power``: min(rho0, dist to
    boundary)^gamma / Z. kind ``projection``: law of the first d coordinates of
    a uniform point in ``K0`` (a body in R^D), supported on the projection.
    """

    support: ConvexBody
    kind: str = "uniform"
    gamma: float = 0.0
    rho0: float = 1.0
    K0: ConvexBody = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "margin_power" and (self.gamma < 0 or self.rho0 <= 0):
            raise ValueError("margin_power needs gamma >= 0 and rho0 > 0")
        if self.kind == "projection" and (self.K0 is None or self.K0.dim <= self.support.dim):
            raise ValueError("projection needs a body K0 of higher dimension than the support")

    @classmethod
    def uniform(cls, K):
        return cls(K, "uniform")

    @classmethod
    def margin_power(cls, K, gamma, rho0):
        return cls(K, "margin_power", float(gamma), float(rho0))

    @classmethod
    def projection(cls, K0, d):
        return cls(project_body(K0, d), "projection", (K0.dim - d) / 2, 1.0, K0)

    @property
    def dim(self):
        return self.support.dim

    @property
    def is_uniform(self):
        return self.kind == "uniform" or (self.kind == "margin_power" and self.gamma == 0)

    def sample(self, n, rng):
        if self.kind == "uniform":
            return sample_uniform(self.support, n, rng)
        if self.kind == "margin_power":
            return sample_margin_power(self.support, self.gamma, self.rho0, n, rng)
        return sample_projection(self.K0, self.dim, n, rng)

    @cached_property
    def normalization(self):
        """(Z, stderr) for margin_power: Monte Carlo over 10^6 uniform points."""
        if self.kind != "margin_power":
            raise Unsupported("normalization is only estimated for margin_power densities")
        K = self.support
        if self.gamma == 0:
            return K.volume(), 0.0
        U = sample_uniform(K, NORMALIZATION_POINTS, _NORMALIZATION_STREAM)
        w = np.minimum(self.rho0, K.boundary_distance(U)) ** self.gamma
        vol = K.volume()
        return vol * float(w.mean()), vol * float(w.std(ddof=1)) / math.sqrt(len(w))

    @cached_property
    def bound_M(self):
        K = self.support
        if self.kind == "uniform":
            return 1.0 / K.volume()
        if self.kind == "margin_power":
            return min(self.rho0, K.inradius()) ** self.gamma / self.normalization[0]
        K0, d = self.K0, self.dim
        fiber = K0.dim - d
        if isinstance(K0, Ball):
            return ball_volume(fiber, K0.radius) / K0.volume()
        lo, hi = K0.bounding_box()
        return float(np.prod(hi[d:] - lo[d:])) / K0.volume()

    def margin_parameters(self):
        """Slow-decay / margin constants; None where they do not apply."""
        K = self.support
        kappa = K.surface_area_bound()
        if self.kind == "margin_power":
            if self.gamma == 0:
                return None
            c = 1.0 / self.normalization[0]
            gamma, rho0 = self.gamma, self.rho0
        elif self.kind == "projection":
            r = _rolling_radius(self.K0)
            if r is None:
                return None
            gamma, rho0 = self.gamma, r
            c = r ** gamma * ball_volume(self.K0.dim - self.dim) / self.K0.volume()
        else:
            return None
        return MarginParameters(gamma, rho0, c, 1.0 / gamma, kappa / c ** (1.0 / gamma),
                                c * rho0 ** gamma, kappa)


def density_eval(spec, x):
    """Value of the density at ``x`` (a point or rows of an array)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    K = spec.support
    if not np.all(K.contains(X)):
        raise OutsideSupport("density_eval needs points in the support")
    if spec.kind == "uniform":
        out = np.full(len(X), 1.0 / K.volume())
    elif spec.kind == "margin_power":
        Z = spec.normalization[0]
        out = np.minimum(spec.rho0, K.boundary_distance(X)) ** spec.gamma / Z
    else:
        K0 = spec.K0
        if not isinstance(K0, Ball):
            raise Unsupported("projection density is analytic only for a ball K0")
        fiber = K0.dim - spec.dim
        h2 = np.clip(K0.radius ** 2 - ((X - K0.center[: spec.dim]) ** 2).sum(axis=1), 0, None)
        out = ball_volume(fiber) * h2 ** (fiber / 2) / K0.volume()
    return float(out[0]) if single else out
