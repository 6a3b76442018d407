"""Invertible affine maps x -> A x + b acting on points, polytopes and bodies."""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, SingularTransform
from .bodies import ConvexBody, affine_polytope
from .polytope import Polytope

SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class AffineMap:
    matrix: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float)
        b = np.array(self.shift, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
            raise DimensionMismatch("affine map needs a square matrix and a matching shift")
        if abs(np.linalg.det(A)) <= SINGULAR_TOL:
            raise SingularTransform(f"|det T| = {abs(np.linalg.det(A)):.3g} is too small")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "shift", b)

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d), np.zeros(d))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def det(self):
        return float(np.linalg.det(self.matrix))

    def __call__(self, obj):
        return affine_map(self, obj)

    def inverse(self):
        Ainv = np.linalg.inv(self.matrix)
        return AffineMap(Ainv, -Ainv @ self.shift)


def random_affine(d, rng, condition=10.0):
    """Random invertible map with prescribed 2-norm condition number and a random shift."""
    g = rng if isinstance(rng, np.random.Generator) else rng.generator()
    Q1, _ = np.linalg.qr(g.standard_normal((d, d)))
    Q2, _ = np.linalg.qr(g.standard_normal((d, d)))
    s = np.geomspace(1.0, condition, d) if d > 1 else np.ones(1)
    s = s / np.prod(s) ** (1 / d) * g.uniform(0.5, 2.0)
    return AffineMap(Q1 @ np.diag(s) @ Q2, g.standard_normal(d))


def random_shear(d, rng, condition=50.0):
    """Unit-determinant shear I + s E_{0,d-1} with 2-norm condition number ``condition``."""
    g = rng if isinstance(rng, np.random.Generator) else rng.generator()
    # cond(I + s e_0 e_{d-1}^T) = (s^2 + 2 + s sqrt(s^2 + 4)) / 2; solve for s
    s = np.sqrt(condition) - 1 / np.sqrt(condition)
    A = np.eye(d)
    A[0, d - 1] = s if g.random() < 0.5 else -s
    return AffineMap(A, g.standard_normal(d))


def affine_map(T, obj):
    """Apply ``T`` (an AffineMap or a (matrix, shift) pair) to points, a Polytope or a body."""
    if not isinstance(T, AffineMap):
        T = AffineMap(*T)
    if isinstance(obj, Polytope):
        if obj.dim != T.dim:
            raise DimensionMismatch("polytope and map dimensions differ")
        return affine_polytope(obj, T.matrix, T.shift)
    if isinstance(obj, ConvexBody):
        return obj.affine_image(T.matrix, T.shift)
    X = np.asarray(obj, dtype=float)
    if X.shape[-1] != T.dim:
        raise DimensionMismatch("points and map dimensions differ")
    return X @ T.matrix.T + T.shift
