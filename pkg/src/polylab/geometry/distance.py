"""Point-to-polytope distance, Hausdorff distance and Monte Carlo Nykodim distance."""

import numpy as np

from ..errors import DimensionMismatch, NoBoundingBox, NonConvergence
from ..rng import as_generator
from .polytope import contains as polytope_contains


def _nearest_in_hull(P, tol, max_iter):
    """Min-norm point of conv(rows of P) by Wolfe's algorithm.

    Major steps add the vertex minimizing <p, y> (a Frank-Wolfe step); minor
    steps solve the affine min-norm problem on the active set and back off to
    the simplex boundary when a weight would turn negative. The distance D
    satisfies |y| >= D >= max(sqrt(|y|^2 - 2 gap), min_p <p, y> / |y|) with
    the Frank-Wolfe gap ``gap = |y|^2 - min_p <p, y>``; iteration stops when
    the difference of the bounds is within tol plus rounding slack, or when
    the Frank-Wolfe vertex is already active (converged to working precision).

    Returns (y, error_bound, converged).
    """
    k = len(P)
    sq = np.einsum("ij,ij->i", P, P)
    active = [int(np.argmin(sq))]
    lam = np.array([1.0])
    y = P[active[0]].copy()
    err = np.inf
    slack = 64 * np.finfo(float).eps * np.sqrt(sq.max())
    for _ in range(max_iter):
        yy = y @ y
        dots = P @ y
        j = int(np.argmin(dots))
        gap = yy - dots[j]
        norm = np.sqrt(yy)
        lower = np.sqrt(max(yy - 2 * max(gap, 0.0), 0.0))
        if norm > 0:
            lower = max(lower, dots[j] / norm)
        err = max(norm - lower, 0.0)
        if err <= tol + slack or gap <= 1e-15 * max(1.0, sq.max()) or j in active:
            return y, err, True
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            S = P[active]
            m = len(active)
            kkt = np.zeros((m + 1, m + 1))
            kkt[:m, :m] = S @ S.T
            kkt[:m, m] = 1
            kkt[m, :m] = 1
            rhs = np.zeros(m + 1)
            rhs[m] = 1
            mu = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:m]
            if np.all(mu > 1e-14):
                lam = mu
                break
            neg = mu <= 1e-14
            theta = np.min(lam[neg] / (lam[neg] - mu[neg]))
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-14
            keep[np.argmax(lam)] = True
            active = [a for a, kp in zip(active, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        y = lam @ P[active]
    return y, err, False


def distance_to_convex(x, P, tol=1e-8, max_iter=1000):
    """Euclidean distance from ``x`` to the polytope ``P``, within ``tol``.

    Zero when ``P`` contains ``x``; otherwise the projection onto the convex
    hull of P's vertices. Raises NonConvergence (carrying the achieved error
    bound) if the certificate does not reach ``tol`` within ``max_iter``
    major steps.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (P.dim,):
        raise DimensionMismatch(f"point has shape {x.shape}, polytope has dimension {P.dim}")
    if polytope_contains(P, x):
        return 0.0
    y, err, converged = _nearest_in_hull(P.vertices - x, tol, max_iter)
    if not converged:
        raise NonConvergence(f"projection error bound {err:.3g} > tol {tol:.3g}", gap=err)
    return float(np.linalg.norm(y))


def hausdorff_distance(P, Q, tol=1e-8):
    """Hausdorff distance between convex polytopes.

    For convex sets the distance to the other set is a convex function, so
    each one-sided excess is attained at a vertex.
    """
    if P.dim != Q.dim:
        raise DimensionMismatch("polytopes live in different dimensions")

    def excess(A, B):
        inside = polytope_contains(B, A.vertices)
        return max([0.0] + [distance_to_convex(v, B, tol) for v in A.vertices[~inside]])

    return max(excess(P, Q), excess(Q, P))


def _box(obj):
    bb = getattr(obj, "bounding_box", None)
    return bb() if callable(bb) else None


def symmetric_difference_volume(G, H, m, rng):
    """Monte Carlo estimate of |G sym-diff H| from ``m`` uniform points in a common box.

    Returns a MomentEstimate (q = 1) whose mean is the volume estimate and
    whose stderr is the binomial standard error scaled by the box volume.
    """
    from ..analysis.estimators import MomentEstimate

    if m < 1:
        raise ValueError("m must be >= 1")
    boxes = [b for b in (_box(G), _box(H)) if b is not None]
    if not boxes:
        raise NoBoundingBox("neither operand exposes a bounding box")
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    gen = as_generator(rng)
    U = lo + (hi - lo) * gen.random((m, len(lo)))
    xor = G.contains(U) != H.contains(U)
    box_vol = float(np.prod(hi - lo))
    p = xor.mean()
    se = np.sqrt(p * (1 - p) / m) if m > 1 else 0.0
    return MomentEstimate(1.0, box_vol * p, box_vol * se, m)
