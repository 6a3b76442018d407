"""Verification checks: each confronts one identity, inequality or growth rate
about random polytopes with simulation and returns a CheckReport."""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

from ..errors import InsufficientTailMass
from ..geometry import (AffineMap, Ball, Ellipsoid, affine_map, convex_hull,
                        hausdorff_distance, steiner_ball_constants,
                        symmetric_difference_volume)
from ..geometry.steiner import ball_volume
from ..rng import RngStream
from ..sampling import DensitySpec, sample_projection, sample_uniform
from .estimators import (combined_stderr, estimate_moment, exponential_tail_fit,
                         falling_factorial_mean, falling_factorial_ratio, fit_power_law)
from .replicates import replicate_arrays, run_replicates

TOL_EXP = 0.08
TOL_EXP_HIGHER = 0.12
SIGMAS = 3.0
DEFAULT_FRESH_M = 10_000
PREMISE_FRESH_M = 100_000
MIN_EXCEEDANCES = 50


@dataclass
class CheckReport:
    """Outcome of one check.

    ``statistics`` maps names to numbers; every estimate ``x`` is accompanied
    by ``x_stderr`` or by the tolerance it was judged against. ``rows`` are
    the table lines written to CSV and ``fits`` the rate fits behind them.
    """

    check_name: str
    passed: bool
    statistics: dict
    seed: int
    runtime: float
    rows: list = field(default_factory=list)
    fits: list = field(default_factory=list)

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "pass": bool(self.passed),
            "statistics": {k: _plain(v) for k, v in self.statistics.items()},
            "seed": self.seed,
            "runtime": self.runtime,
            "rows": [{k: _plain(v) for k, v in r.items()} for r in self.rows],
            "fits": [{"label": label, **_plain(vars(fit))} for label, fit in self.fits],
        }


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _row(check, n, q, estimate, stderr, bound_or_target, passed):
    return {"check": check, "n": n, "q": q, "estimate": float(estimate),
            "stderr": float(stderr), "bound_or_target": bound_or_target, "pass": bool(passed)}


def _stream(rng):
    return rng if isinstance(rng, RngStream) else RngStream(int(rng))


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _missing_mass_samples(spec, n, reps, rng, fresh_m, threads):
    """Per-replicate unbiased estimates of 1 - mu(hull of n points)."""
    m = 0 if spec.is_uniform else (fresh_m or DEFAULT_FRESH_M)
    reps_list = run_replicates(spec, n, reps, m, rng, threads=threads, keep_hull=False)
    return replicate_arrays(reps_list)


# ---------------------------------------------------------------- Efron

def check_efron(spec, n, reps, rng, fresh_m=None, threads=1):
    """E[1 - mu(K_n)] = E[R_{n+1}] / (n + 1), both sides from independent pools."""
    rng = _stream(rng)
    with _Timer() as t:
        left = _missing_mass_samples(spec, n, reps, rng.spawn(0), fresh_m, threads)
        right = replicate_arrays(run_replicates(spec, n + 1, reps, 0, rng.spawn(1),
                                                threads=threads, keep_hull=False))
        lhs = estimate_moment(left["missing_mass"], 1)
        rhs = estimate_moment(right["R_n"] / (n + 1), 1)
        se = combined_stderr(lhs.stderr, rhs.stderr)
        diff = lhs.mean - rhs.mean
        ok = abs(diff) <= SIGMAS * se
    stats_ = {
        "n": n, "reps": reps,
        "missing_mass": lhs.mean, "missing_mass_stderr": lhs.stderr,
        "vertex_ratio": rhs.mean, "vertex_ratio_stderr": rhs.stderr,
        "mean_R_next": float(right["R_n"].mean()),
        "difference": diff, "difference_stderr": se, "tolerance_sigmas": SIGMAS,
        "redraws": int(left["redraws"].sum() + right["redraws"].sum()),
    }
    rows = [_row("efron", n, 1, lhs.mean, lhs.stderr, rhs.mean, ok),
            _row("efron", n + 1, 1, rhs.mean, rhs.stderr, lhs.mean, ok)]
    return CheckReport("efron", ok, stats_, rng.seed, t.elapsed, rows)


def check_extended_efron(spec, n, q, reps, rng, fresh_m=None, threads=1):
    """E[prod_j (R_{n+q} - j)/(n + q - j)] <= E[(1 - mu(K_n))^q].

    Right side by two routes: (a) plug-in (V_n/|K|)^q, uniform densities only;
    (b) the indicator that q fresh draws all miss the hull. For q = 1 the two
    sides must also agree (Efron's identity).
    """
    rng = _stream(rng)
    q = int(q)
    with _Timer() as t:
        big = replicate_arrays(run_replicates(spec, n + q, reps, 0, rng.spawn(0),
                                              threads=threads, keep_hull=False))
        lhs = falling_factorial_mean(big["R_n"], n, q)
        small = replicate_arrays(run_replicates(spec, n, reps, q, rng.spawn(1),
                                                threads=threads, keep_hull=False))
        routes = {"fresh": estimate_moment((small["fresh_outside"] == q).astype(float), 1)}
        if spec.is_uniform:
            routes["plugin"] = estimate_moment(small["missing_mass"], q)
        stats_ = {"n": n, "q": q, "reps": reps, "lhs": lhs.mean, "lhs_stderr": lhs.stderr,
                  "tolerance_sigmas": SIGMAS}
        rows = []
        ok = True
        for name, est in routes.items():
            se = combined_stderr(lhs.stderr, est.stderr)
            route_ok = lhs.mean <= est.mean + SIGMAS * se
            if q == 1:
                route_ok = route_ok and abs(lhs.mean - est.mean) <= SIGMAS * se
            ok = ok and route_ok
            stats_[f"rhs_{name}"] = est.mean
            stats_[f"rhs_{name}_stderr"] = est.stderr
            stats_[f"pass_{name}"] = route_ok
            rows.append(_row(f"extended_efron[{name}]", n, q, lhs.mean, lhs.stderr,
                             est.mean, route_ok))
    return CheckReport("extended_efron", ok, stats_, rng.seed, t.elapsed, rows)


# ---------------------------------------------------------------- margin

def margin_transfer_bound(d_f, params, d_f_stderr=0.0):
    """(L + 1) * d_f^(alpha/(alpha+1)), evaluated at d_f + 3 stderr."""
    a = params.alpha / (params.alpha + 1)
    return (params.L + 1) * (np.asarray(d_f) + SIGMAS * np.asarray(d_f_stderr)) ** a


def check_margin_transfer(spec, n, reps, rng, fresh_m=PREMISE_FRESH_M, threads=1):
    """Per-replicate |K \\ K_n| <= (L + 1) d_f^(alpha/(alpha+1)) when d_f <= t0^(alpha+1).

    d_f is estimated from ``fresh_m`` fresh draws per replicate; the 3-sigma
    statistical slack enters by evaluating the bound at d_f + 3 stderr.
    """
    rng = _stream(rng)
    params = spec.margin_parameters()
    if params is None:
        raise ValueError("check_margin_transfer needs a density with margin parameters")
    with _Timer() as t:
        cols = replicate_arrays(run_replicates(spec, n, reps, fresh_m, rng,
                                               threads=threads, keep_hull=False))
        d_f = cols["fresh_outside"] / fresh_m
        se = np.sqrt(np.maximum(d_f * (1 - d_f), 1.0 / fresh_m) / fresh_m)
        premise = d_f <= params.t0 ** (params.alpha + 1)
        bound = margin_transfer_bound(d_f, params, se)
        violations = premise & (cols["V_n"] > bound)
        n_ok = int(premise.sum())
        ok = n_ok > 0 and not violations.any()
    ratio = cols["V_n"][premise] / bound[premise] if n_ok else np.array([np.nan])
    stats_ = {
        "n": n, "reps": reps, "fresh_m": fresh_m,
        "alpha": params.alpha, "L": params.L, "t0": params.t0, "c": params.c,
        "qualifying_fraction": n_ok / reps, "violations": int(violations.sum()),
        "max_ratio_to_bound": float(np.max(ratio)),
        "mean_d_f": float(d_f.mean()), "mean_d_f_stderr": float(d_f.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0,
        "mean_V_n": float(cols["V_n"].mean()),
        "mean_V_n_stderr": float(cols["V_n"].std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0,
        "tolerance_sigmas": SIGMAS,
    }
    rows = [_row("margin_transfer", n, 1, float(cols["V_n"].mean()), stats_["mean_V_n_stderr"],
                 float(np.mean(bound)), ok)]
    return CheckReport("margin_transfer", ok, stats_, rng.seed, t.elapsed, rows)


# ---------------------------------------------------------------- rates

QUANTITIES = ("missing_mass", "V_n_normalized", "R_n")


def rate_target(spec, quantity, q):
    """Target exponent of the q-th moment of ``quantity`` in n."""
    d = spec.dim
    if quantity == "R_n":
        return q * (d - 1) / (d + 1)
    if quantity == "V_n_normalized" and not spec.is_uniform:
        params = spec.margin_parameters()
        if params is not None:
            a = params.alpha
            return -2 * a * q / ((a + 1) * (d + 1))
    return -2 * q / (d + 1)


def rate_mode(spec, quantity):
    smooth = isinstance(spec.support, (Ball, Ellipsoid))
    return "tight" if smooth and spec.is_uniform else "bound"


def rate_study(spec, n_grid, reps, rng, fresh_m=0, threads=1):
    """Replicate columns at every n of the grid; stream ``rng.spawn(i)`` for grid point i."""
    rng = _stream(rng)
    return {int(n): replicate_arrays(run_replicates(spec, int(n), reps, fresh_m, rng.spawn(i),
                                                    threads=threads, keep_hull=False))
            for i, n in enumerate(n_grid)}


def _quantity(spec, cols, quantity):
    if quantity == "R_n":
        return cols["R_n"].astype(float)
    if quantity == "V_n_normalized":
        return cols["V_n"] / spec.support.volume()
    return cols["missing_mass"]


def check_rate(spec, quantity, q, n_grid, reps, rng, mode=None, tol=None, fresh_m=None,
               threads=1, study=None, name=None):
    """Fit the growth exponent of E[quantity^q] over ``n_grid``.

    ``tight`` mode (smooth body, uniform density) requires |exponent - target|
    <= tol; ``bound`` mode requires exponent <= target + tol. The RateFit is in
    ``report.fits``.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}")
    rng = _stream(rng)
    n_grid = [int(n) for n in n_grid]
    if len(n_grid) < 4:
        raise ValueError("n_grid needs at least 4 points")
    mode = mode or rate_mode(spec, quantity)
    tol = tol if tol is not None else (TOL_EXP if q <= 1 else TOL_EXP_HIGHER)
    target = rate_target(spec, quantity, q)
    name = name or f"rate_{quantity}"
    with _Timer() as t:
        if study is None:
            m = 0 if (quantity != "missing_mass" or spec.is_uniform) else (fresh_m or DEFAULT_FRESH_M)
            study = rate_study(spec, n_grid, reps, rng, m, threads)
        ests = [estimate_moment(_quantity(spec, study[n], quantity), q) for n in n_grid]
        fit = fit_power_law(n_grid, [e.mean for e in ests], [e.stderr for e in ests])
        if mode == "tight":
            ok = abs(fit.exponent - target) <= tol
        else:
            ok = fit.exponent <= target + tol
    stats_ = {"quantity": quantity, "q": q, "mode": mode, "exponent": fit.exponent,
              "exponent_stderr": fit.exponent_stderr, "target": target, "tolerance": tol,
              "r_squared": fit.r_squared, "intercept": fit.intercept,
              "reps": len(next(iter(study.values()))["R_n"])}
    rows = [_row(name, n, q, e.mean, e.stderr, target, ok) for n, e in zip(n_grid, ests)]
    rows.append(_row(name, "fit", q, fit.exponent, fit.exponent_stderr, target, ok))
    return CheckReport(name, ok, stats_, rng.seed, t.elapsed, rows, [(name, fit)])


# ---------------------------------------------------------------- tails

def check_deviation_tail(spec, n, reps, rng, x_grid=None, shift_coef=None, grid_points=20,
                         fresh_m=None, threads=1, min_r_squared=0.9):
    """Exponential right tail of Z = n (missing mass - c n^(-2/(d+1))).

    ``shift_coef`` (c) defaults to mean(missing mass) * n^(2/(d+1)); the
    default grid spans the 60th to 99.5th percentile of Z (lower when
    fewer than 50 samples would exceed the top). Passes iff log
    survival vs x fits a line with negative slope and r^2 >= ``min_r_squared``.
    """
    rng = _stream(rng)
    d = spec.dim
    with _Timer() as t:
        cols = _missing_mass_samples(spec, n, reps, rng, fresh_m, threads)
        v = cols["missing_mass"]
        scale = n ** (-2.0 / (d + 1))
        c = float(v.mean() / scale) if shift_coef is None else float(shift_coef)
        z = n * (v - c * scale)
        if x_grid is None:
            top = min(0.995, 1 - MIN_EXCEEDANCES / len(z))
            lo, hi = np.quantile(z, [0.60, max(top, 0.61)])
            x_grid = np.linspace(lo, hi, grid_points)
        x_grid = np.asarray(x_grid, dtype=float)
        tail_count = int(np.count_nonzero(z > x_grid.max()))
        if tail_count < MIN_EXCEEDANCES:
            raise InsufficientTailMass(
                f"only {tail_count} exceedances at x = {x_grid.max():.4g}; shrink the grid")
        fit = exponential_tail_fit(z, x_grid)
        ok = fit.slope < 0 and fit.r_squared >= min_r_squared
    stats_ = {"n": n, "reps": reps, "shift_coef": c, "decay_rate": -fit.slope,
              "log_prefactor": fit.intercept, "r_squared": fit.r_squared,
              "r_squared_threshold": min_r_squared, "min_exceedances": fit.min_exceedances,
              "mean_missing_mass": float(v.mean()),
              "mean_missing_mass_stderr": float(v.std(ddof=1) / math.sqrt(len(v)))}
    rows = [_row("deviation_tail", n, 1, -fit.slope, 0.0, min_r_squared, ok)]
    return CheckReport("deviation_tail", ok, stats_, rng.seed, t.elapsed, rows)


# ---------------------------------------------------------------- affine invariance

def check_affine_invariance(K, T, n, reps, rng, threads=1, same_streams=False, p_min=1e-3):
    """Two-sample KS test between V_n/|K| on K and V_n/|TK| on TK.

    The arms use independent streams unless ``same_streams``.
    """
    rng = _stream(rng)
    if not isinstance(T, AffineMap):
        T = AffineMap(*T)
    TK = affine_map(T, K)
    with _Timer() as t:
        a = replicate_arrays(run_replicates(DensitySpec.uniform(K), n, reps, 0, rng.spawn(0),
                                            threads=threads, keep_hull=False))["missing_mass"]
        b_stream = rng.spawn(0) if same_streams else rng.spawn(1)
        b = replicate_arrays(run_replicates(DensitySpec.uniform(TK), n, reps, 0, b_stream,
                                            threads=threads, keep_hull=False))["missing_mass"]
        ks = stats.ks_2samp(a, b)
        ok = ks.pvalue > p_min
    stats_ = {"n": n, "reps": reps, "ks_statistic": float(ks.statistic),
              "p_value": float(ks.pvalue), "p_threshold": p_min,
              "det": T.det, "condition": float(np.linalg.cond(T.matrix)),
              "mean_K": float(a.mean()), "mean_K_stderr": float(a.std(ddof=1) / math.sqrt(reps)),
              "mean_TK": float(b.mean()), "mean_TK_stderr": float(b.std(ddof=1) / math.sqrt(reps))}
    rows = [_row("affine_invariance", n, 1, float(ks.statistic), 0.0, p_min, ok)]
    return CheckReport("affine_invariance", ok, stats_, rng.seed, t.elapsed, rows)


# ---------------------------------------------------------------- worst case

def default_roster(K):
    rho0 = K.inradius()
    roster = {"uniform": DensitySpec.uniform(K),
              "margin_power_gamma1": DensitySpec.margin_power(K, 1.0, rho0),
              "margin_power_gamma2": DensitySpec.margin_power(K, 2.0, rho0)}
    if isinstance(K, Ball) and K.radius == 1.0 and not np.any(K.center):
        roster["projection"] = DensitySpec.projection(Ball.unit(K.dim + 1), K.dim)
    return roster


def check_worst_case_uniform(K, n_grid, reps, rng, roster=None, M=None, q=1, tol=None,
                             threads=1):
    """Growth exponent of E[R_n^q] for a roster of bounded densities on K never
    exceeds q(d-1)/(d+1) + tol; the uniform case is reported alongside."""
    rng = _stream(rng)
    roster = roster or default_roster(K)
    bounds = {name: spec.bound_M for name, spec in roster.items()}
    if M is not None and any(b > M * (1 + 1e-12) for b in bounds.values()):
        raise ValueError(f"roster density exceeds the bound M = {M}: {bounds}")
    tol = tol if tol is not None else (TOL_EXP if q <= 1 else TOL_EXP_HIGHER)
    target = q * (K.dim - 1) / (K.dim + 1)
    with _Timer() as t:
        stats_ = {"target": target, "tolerance": tol, "q": q}
        rows, fits = [], []
        ok = True
        for i, (name, spec) in enumerate(roster.items()):
            sub = check_rate(spec, "R_n", q, n_grid, reps, rng.spawn(i), mode="bound",
                             tol=tol, threads=threads, name=f"worst_case[{name}]")
            ok = ok and sub.passed
            stats_[f"{name}_exponent"] = sub.statistics["exponent"]
            stats_[f"{name}_exponent_stderr"] = sub.statistics["exponent_stderr"]
            stats_[f"{name}_bound_M"] = bounds[name]
            rows.extend(sub.rows)
            fits.extend(sub.fits)
    return CheckReport("worst_case_uniform", ok, stats_, rng.seed, t.elapsed, rows, fits)


# ---------------------------------------------------------------- Nykodim vs Hausdorff

def check_nykodim_domination(d, pairs, rng, max_points=30, m=20_000):
    """|G sym-diff G'| <= alpha1 * d_H(G, G') + 3 stderr for random hull pairs in B_d."""
    rng = _stream(rng)
    alpha1 = steiner_ball_constants(d).alpha1
    ball = Ball.unit(d)
    with _Timer() as t:
        worst = 0.0
        fails = 0
        for i in range(pairs):
            s = rng.spawn(i)
            g = s.spawn(0).generator()
            k1, k2 = g.integers(d + 1, max_points + 1, size=2)
            G = convex_hull(sample_uniform(ball, k1, s.spawn(1)), method="qhull")
            H = convex_hull(sample_uniform(ball, k2, s.spawn(2)), method="qhull")
            dH = hausdorff_distance(G, H)
            est = symmetric_difference_volume(G, H, m, s.spawn(3))
            slack = alpha1 * dH + SIGMAS * est.stderr - est.mean
            fails += slack < 0
            worst = max(worst, est.mean / (alpha1 * dH) if dH > 0 else 0.0)
        ok = fails == 0
    stats_ = {"d": d, "pairs": pairs, "alpha1": alpha1, "failures": int(fails),
              "pass_fraction": float(1 - fails / pairs), "max_ratio_to_bound": float(worst), "mc_points": m,
              "tolerance_sigmas": SIGMAS}
    rows = [_row("nykodim", max_points, 1, worst, 0.0, 1.0, ok)]
    return CheckReport("nykodim", ok, stats_, rng.seed, t.elapsed, rows)


# ---------------------------------------------------------------- projection density

def projection_constant(D, d, r=1.0, volume=None):
    """c in f >= c min(r, t)^((D-d)/2): r^((D-d)/2) beta_{D-d} / Vol_D(K0)."""
    volume = ball_volume(D, r) if volume is None else volume
    return r ** ((D - d) / 2) * ball_volume(D - d) / volume


def check_projection_density(n, rng, D=3, d=2, t_max=0.2, bins=20, radial_bins=50, p_min=1e-3):
    """Projection of the uniform law on B_D to R^d.

    (i) near the boundary, the annulus-averaged density is at least the
    annulus average of c t^((D-d)/2), within 3 stderr per bin; (ii) the radial
    law matches P(|X| <= r) = I_{r^2}(d/2, (D-d)/2 + 1) by a chi^2 test.
    """
    rng = _stream(rng)
    gamma = (D - d) / 2
    c = projection_constant(D, d)
    beta = ball_volume(d)
    with _Timer() as t:
        X = sample_projection(Ball.unit(D), d, n, rng)
        r = np.linalg.norm(X, axis=1)
        tdist = 1 - r
        edges = np.linspace(0, t_max, bins + 1)
        counts = np.histogram(tdist, edges)[0]
        area = beta * ((1 - edges[:-1]) ** d - (1 - edges[1:]) ** d)
        p = counts / n
        dens = p / area
        se = np.sqrt(p * (1 - p) / n) / area
        bound = np.array([
            integrate.quad(lambda s: c * s ** gamma * d * beta * (1 - s) ** (d - 1), a, b)[0] / ar
            for a, b, ar in zip(edges[:-1], edges[1:], area)])
        bin_ok = dens >= bound - SIGMAS * se

        redges = np.sqrt(special.betaincinv(d / 2, gamma + 1, np.linspace(0, 1, radial_bins + 1)))
        redges[-1] = np.inf
        observed = np.histogram(r, redges)[0]
        chi = stats.chisquare(observed, np.full(radial_bins, n / radial_bins))
        ok = bool(bin_ok.all()) and chi.pvalue > p_min
    stats_ = {"n": n, "D": D, "d": d, "c": c, "gamma": gamma,
              "bins_passing": int(bin_ok.sum()), "bins": bins,
              "min_margin_sigmas": float(np.min((dens - bound) / se)),
              "chi2": float(chi.statistic), "chi2_p_value": float(chi.pvalue),
              "p_threshold": p_min, "tolerance_sigmas": SIGMAS}
    rows = [_row("projection_density", n, 1, float(de), float(s), float(b), bool(o))
            for de, s, b, o in zip(dens, se, bound, bin_ok)]
    rows.append(_row("projection_density[chi2]", n, 1, float(chi.pvalue), 0.0, p_min,
                     chi.pvalue > p_min))
    return CheckReport("projection_density", ok, stats_, rng.seed, t.elapsed, rows)
