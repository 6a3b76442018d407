"""Monte Carlo moment estimates, falling-factorial moments and power-law fits."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, EmptyInput, InvalidQ, NonPositiveMoment


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo mean with its standard error over ``reps`` i.i.d. replicates."""

    q: float
    mean: float
    stderr: float
    reps: int

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyInput("no samples")
    if values.size == 1 or np.all(values == values.flat[0]):
        return float(values.flat[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def estimate_moment(samples, q):
    """Plug-in estimate of E[X^q] with the replicate standard error."""
    if q <= 0:
        raise InvalidQ("q must be positive")
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptyInput("estimate_moment needs at least one sample")
    mean, se = _mean_se(x ** q)
    return MomentEstimate(float(q), mean, se, int(x.size))


def falling_factorial_ratio(R, n, q):
    """prod_{j<q} (R - j) / (n + q - j), elementwise over vertex counts R."""
    R = np.asarray(R, dtype=float)
    out = np.ones_like(R)
    for j in range(q):
        out *= (R - j) / (n + q - j)
    return out


def falling_factorial_mean(R_samples, n, q):
    """Mean of prod_{j<q} (R - j)/(n + q - j) over vertex counts of hulls of n + q points."""
    if int(q) != q or q < 1:
        raise InvalidQ(f"q must be a positive integer, got {q!r}")
    q = int(q)
    R = np.asarray(R_samples)
    if R.size == 0:
        raise EmptyInput("no vertex counts")
    if np.any(R > n + q):
        raise InvalidQ(f"vertex count exceeds the number of points n + q = {n + q}")
    mean, se = _mean_se(falling_factorial_ratio(R, n, q))
    return MomentEstimate(float(q), mean, se, int(R.size))


def combined_stderr(*errors):
    return float(math.sqrt(sum(e * e for e in errors)))


@dataclass
class RateFit:
    """Weighted least-squares fit of log(estimate) = intercept + exponent * log(n)."""

    exponent: float
    intercept: float
    exponent_stderr: float
    r_squared: float
    n_grid: list
    estimates: list = field(default_factory=list)
    stderrs: list = field(default_factory=list)

    def predict(self, n):
        return math.exp(self.intercept) * np.asarray(n, dtype=float) ** self.exponent


def fit_power_law(n_grid, estimates, stderrs=None):
    """Fit estimate ~ C n^exponent on a log-log scale.

    Points are weighted by the inverse delta-method variance of log(estimate),
    (stderr / estimate)^-2; equal weights when no (or all-zero) stderrs are
    given. The exponent's standard error is inflated by the reduced chi^2 when
    that exceeds one.
    """
    n = np.asarray(n_grid, dtype=float)
    y = np.asarray(estimates, dtype=float)
    if n.shape != y.shape:
        raise DimensionMismatch("n_grid and estimates differ in length")
    if len(n) < 4:
        raise ValueError("a rate fit needs at least 4 grid points")
    if np.any(y <= 0):
        raise NonPositiveMoment("an estimate is <= 0; increase reps")
    se = np.zeros_like(y) if stderrs is None else np.asarray(stderrs, dtype=float)
    rel = se / y
    w = np.ones_like(y) if np.all(rel <= 0) else 1.0 / np.maximum(rel, rel[rel > 0].min()) ** 2
    x = np.log(n)
    ly = np.log(y)
    sw = np.sqrt(w)
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A * sw[:, None], ly * sw, rcond=None)
    resid = ly - A @ coef
    ybar = np.average(ly, weights=w)
    ss_tot = float(np.sum(w * (ly - ybar) ** 2))
    ss_res = float(np.sum(w * resid ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    cov = np.linalg.inv(A.T @ (A * w[:, None]))
    if stderrs is None or np.all(rel <= 0):
        scale = ss_res / (len(n) - 2)
    else:
        scale = max(1.0, ss_res / (len(n) - 2))
    return RateFit(
        exponent=float(coef[1]),
        intercept=float(coef[0]),
        exponent_stderr=float(math.sqrt(max(cov[1, 1] * scale, 0.0))),
        r_squared=float(min(max(r2, 0.0), 1.0)),
        n_grid=[int(v) if float(v).is_integer() else float(v) for v in n],
        estimates=[float(v) for v in y],
        stderrs=[float(v) for v in se],
    )


@dataclass(frozen=True)
class TailFit:
    """Straight-line fit of log empirical survival against x."""

    slope: float
    intercept: float
    r_squared: float
    x_grid: tuple
    survival: tuple
    min_exceedances: int


def exponential_tail_fit(z, x_grid):
    z = np.asarray(z, dtype=float)
    x = np.asarray(x_grid, dtype=float)
    zs = np.sort(z)
    counts = len(zs) - np.searchsorted(zs, x, side="right")
    if np.any(counts == 0):
        raise ValueError("empirical survival is zero on part of the grid")
    logS = np.log(counts / len(zs))
    slope, intercept = np.polyfit(x, logS, 1)
    resid = logS - (intercept + slope * x)
    ss_tot = float(np.sum((logS - logS.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return TailFit(float(slope), float(intercept), r2, tuple(x.tolist()),
                   tuple(np.exp(logS).tolist()), int(counts.min()))
