import math

import numpy as np
import pytest

from polylab.analysis import (estimate_moment, exponential_tail_fit, falling_factorial_mean,
                              fit_power_law, replicate_arrays, run_replicates)
from polylab.analysis.estimators import combined_stderr, falling_factorial_ratio
from polylab.errors import EmptyInput, InvalidQ, NonPositiveMoment
from polylab.geometry import Ball, Box, Simplex
from polylab.rng import RngStream
from polylab.sampling import DensitySpec

from oracles import TRIANGLE_IN_TRIANGLE


# ---------------------------------------------------------------- moments

def test_constant_samples():
    e = estimate_moment(np.full(50, 0.3), 2)
    assert e.mean == pytest.approx(0.09) and e.stderr == 0.0 and e.reps == 50


def test_first_moment_is_the_mean():
    x = np.random.default_rng(0).random(100)
    e = estimate_moment(x, 1)
    assert e.mean == pytest.approx(x.mean())
    assert e.stderr == pytest.approx(x.std(ddof=1) / 10)


def test_second_moment_of_uniform():
    e = estimate_moment(np.random.default_rng(1).random(100_000), 2)
    assert abs(e.mean - 1 / 3) <= 3 * e.stderr


def test_moment_errors():
    with pytest.raises(EmptyInput):
        estimate_moment([], 1)
    with pytest.raises(InvalidQ):
        estimate_moment([1.0], 0)


def test_falling_factorial():
    R = np.array([4, 5, 6])
    assert falling_factorial_mean(R, 10, 1).mean == pytest.approx(R.mean() / 11)
    assert falling_factorial_ratio(np.array([5]), 10, 2)[0] == pytest.approx(5 * 4 / (12 * 11))
    full = falling_factorial_mean(np.full(20, 13), 10, 3)
    assert full.mean == 1.0 and full.stderr == 0.0
    with pytest.raises(InvalidQ):
        falling_factorial_mean(R, 10, 1.5)
    with pytest.raises(InvalidQ):
        falling_factorial_mean(R, 10, 0)


def test_combined_stderr():
    assert combined_stderr(3.0, 4.0) == pytest.approx(5.0)


# ---------------------------------------------------------------- fits

def test_exact_power_law():
    n = 64 * 2 ** np.arange(8)
    fit = fit_power_law(n, n ** (-2 / 3))
    assert fit.exponent == pytest.approx(-2 / 3, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.predict(100) == pytest.approx(100 ** (-2 / 3))


def test_noisy_power_law_recovers_exponent():
    g = np.random.default_rng(2)
    n = 64 * 2 ** np.arange(8)
    truth = 3 * n ** 0.4
    se = 0.01 * truth
    fit = fit_power_law(n, truth + se * g.standard_normal(8), se)
    assert abs(fit.exponent - 0.4) <= 4 * fit.exponent_stderr


def test_power_law_errors():
    with pytest.raises(NonPositiveMoment):
        fit_power_law([1, 2, 3, 4], [1, 0, 1, 1])
    with pytest.raises(ValueError):
        fit_power_law([1, 2, 3], [1, 1, 1])


def test_exponential_tail_recovers_rate():
    z = np.random.default_rng(3).exponential(1 / 2.5, 50_000)
    fit = exponential_tail_fit(z, np.linspace(0.2, 2.0, 20))
    assert -fit.slope == pytest.approx(2.5, rel=0.1)
    assert fit.r_squared > 0.99


# ---------------------------------------------------------------- replicates

def test_simplex_sized_samples_are_all_vertices():
    for K in (Ball.unit(2), Simplex.standard(3)):
        cols = replicate_arrays(run_replicates(DensitySpec.uniform(K), K.dim + 1, 200, 0,
                                               RngStream(1), keep_hull=False))
        assert np.all(cols["R_n"] == K.dim + 1)


def test_missing_mass_equals_normalized_missing_volume():
    K = Box([0, 0], [2, 1.5])
    reps = run_replicates(DensitySpec.uniform(K), 20, 50, 0, RngStream(2))
    for r in reps:
        assert r.missing_mass * K.volume() == pytest.approx(r.V_n, rel=1e-12, abs=1e-15)
        assert r.V_n == pytest.approx(K.volume() - r.hull.volume(), abs=1e-12)


def test_triangle_missing_mass_matches_random_triangle_area():
    cols = replicate_arrays(run_replicates(DensitySpec.uniform(Simplex.standard(2)), 3, 40_000,
                                           0, RngStream(3), keep_hull=False))
    est = estimate_moment(cols["missing_mass"], 1)
    assert abs(est.mean - (1 - TRIANGLE_IN_TRIANGLE)) <= 3 * est.stderr


def test_fresh_point_estimator_is_unbiased_for_uniform():
    cols = replicate_arrays(run_replicates(DensitySpec.margin_power(Ball.unit(2), 0.0, 1.0), 10,
                                           2000, 200, RngStream(4), keep_hull=False))
    plug = estimate_moment(cols["V_n"] / math.pi, 1)
    fresh = estimate_moment(cols["missing_mass"], 1)
    assert abs(plug.mean - fresh.mean) <= 3 * combined_stderr(plug.stderr, fresh.stderr)


def test_replicates_do_not_depend_on_threads_or_hull_path():
    spec = DensitySpec.uniform(Ball.unit(3))
    a = replicate_arrays(run_replicates(spec, 30, 40, 10, RngStream(5), threads=1))
    b = replicate_arrays(run_replicates(spec, 30, 40, 10, RngStream(5), threads=4, keep_hull=False))
    for key in ("R_n", "V_n", "missing_mass", "fresh_outside"):
        assert np.array_equal(a[key], b[key])


def test_run_replicates_preconditions():
    with pytest.raises(ValueError):
        run_replicates(DensitySpec.uniform(Ball.unit(2)), 2, 5)
    with pytest.raises(ValueError):
        run_replicates(DensitySpec.uniform(Ball.unit(2)), 5, 0)
