"""Volumes of unit balls and the Steiner expansion of a ball's parallel body."""

import math
from dataclasses import dataclass

from ..errors import DimensionMismatch


def ball_volume(d, radius=1.0):
    """beta_d * radius**d, with beta_d = pi^(d/2) / Gamma(d/2 + 1). beta_0 = 1."""
    if d < 0:
        raise DimensionMismatch("dimension must be nonnegative")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius ** d


def sphere_area(d, radius=1.0):
    """(d-1)-dimensional area of the sphere bounding a d-ball."""
    return d * ball_volume(d) * radius ** (d - 1)


@dataclass(frozen=True)
class SteinerConstants:
    """Steiner coefficients L_1..L_d of the unit ball and the derived constants.

    ``coefficients[j - 1]`` is L_j(B_d) = C(d, j) * beta_d, so that
    ``|B^lam \\ B| = sum_j L_j lam^j = beta_d ((1 + lam)^d - 1)``.
    ``alpha1 = sum_j L_j 2^j`` bounds |G sym-diff G'| / d_H(G, G') for convex
    G, G' inside the unit ball; ``alpha2 = sum_j L_j`` bounds |G^delta \\ G| / delta
    for delta <= 1.
    """

    dim: int
    coefficients: tuple
    alpha1: float
    alpha2: float

    def excess_volume(self, lam):
        return sum(L * lam ** j for j, L in enumerate(self.coefficients, start=1))


def steiner_ball_constants(d):
    if d < 2:
        raise DimensionMismatch("steiner_ball_constants needs d >= 2")
    beta = ball_volume(d)
    L = tuple(math.comb(d, j) * beta for j in range(1, d + 1))
    alpha1 = sum(Lj * 2 ** j for j, Lj in enumerate(L, start=1))
    return SteinerConstants(d, L, alpha1, sum(L))
