import json
import math

import numpy as np
import pytest

from polylab.analysis import (check_affine_invariance, check_deviation_tail, check_efron,
                              check_extended_efron, check_margin_transfer,
                              check_nykodim_domination, check_projection_density, check_rate,
                              check_worst_case_uniform, margin_transfer_bound, rate_target)
from polylab.analysis.checks import rate_mode
from polylab.errors import InsufficientTailMass, NonPositiveMoment
from polylab.geometry import AffineMap, Ball, Box, Simplex
from polylab.rng import RngStream
from polylab.sampling import DensitySpec

from oracles import TRIANGLE_IN_SQUARE, TRIANGLE_IN_TRIANGLE

DISK = DensitySpec.uniform(Ball.unit(2))
TRIANGLE = DensitySpec.uniform(Simplex.standard(2))
SQUARE = DensitySpec.uniform(Box.unit(2))
MARGIN1 = DensitySpec.margin_power(Ball.unit(2), 1.0, 1.0)


def _close(report, a, b, target):
    s = report.statistics
    return all(abs(s[k] - target) <= 3 * s[f"{k}_stderr"] + 1e-12 for k in (a, b))


# ---------------------------------------------------------------- Efron

def test_efron_triangle():
    rep = check_efron(TRIANGLE, 3, 20_000, RngStream(1))
    assert rep.passed
    assert _close(rep, "missing_mass", "vertex_ratio", 1 - TRIANGLE_IN_TRIANGLE)


def test_efron_square():
    rep = check_efron(SQUARE, 3, 20_000, RngStream(2))
    assert rep.passed
    assert _close(rep, "missing_mass", "vertex_ratio", 1 - TRIANGLE_IN_SQUARE)


def test_efron_is_distribution_free():
    assert check_efron(MARGIN1, 20, 2000, RngStream(3), fresh_m=2000).passed


@pytest.mark.parametrize("spec,n,q", [(DISK, 30, 2), (TRIANGLE, 10, 3)])
def test_extended_efron(spec, n, q):
    rep = check_extended_efron(spec, n, q, 4000, RngStream(4))
    assert rep.passed
    assert rep.statistics["pass_fresh"] and rep.statistics["pass_plugin"]


def test_extended_efron_q1_is_an_identity():
    rep = check_extended_efron(TRIANGLE, 3, 1, 20_000, RngStream(5))
    s = rep.statistics
    assert rep.passed
    assert abs(s["lhs"] - s["rhs_plugin"]) <= 3 * math.hypot(s["lhs_stderr"], s["rhs_plugin_stderr"])


def test_extended_efron_nonuniform_uses_fresh_route_only():
    rep = check_extended_efron(MARGIN1, 15, 2, 2000, RngStream(6))
    assert rep.passed and "rhs_plugin" not in rep.statistics


# ---------------------------------------------------------------- margin transfer

def test_margin_transfer_when_hull_fills_body():
    params = MARGIN1.margin_parameters()
    assert margin_transfer_bound(0.0, params) == 0.0
    assert 0.0 <= margin_transfer_bound(0.0, params)


@pytest.mark.parametrize("gamma,n", [(1.0, 200), (2.0, 500)])
def test_margin_transfer_has_no_violations(gamma, n):
    spec = DensitySpec.margin_power(Ball.unit(2), gamma, 1.0)
    rep = check_margin_transfer(spec, n, 30, RngStream(7), fresh_m=20_000)
    assert rep.passed and rep.statistics["violations"] == 0
    assert rep.statistics["qualifying_fraction"] > 0.5


def test_margin_transfer_needs_margin_parameters():
    with pytest.raises(ValueError):
        check_margin_transfer(DensitySpec.uniform(Box.unit(2)), 50, 5, RngStream(1))


# ---------------------------------------------------------------- rates

GRID = [64, 128, 256, 512, 1024, 2048]


def _study(values):
    return {n: {"R_n": np.full(3, v), "V_n": np.full(3, v), "missing_mass": np.full(3, v)}
            for n, v in values.items()}


def test_rate_of_exact_power_law():
    study = _study({n: n ** (-2 / 3) for n in GRID})
    rep = check_rate(DISK, "missing_mass", 1, GRID, 3, RngStream(0), study=study)
    assert rep.passed
    assert rep.statistics["exponent"] == pytest.approx(-2 / 3)
    assert rep.statistics["r_squared"] == pytest.approx(1.0)


def test_rate_failure_is_reported():
    study = _study({n: n ** -0.5 for n in GRID})
    rep = check_rate(DISK, "missing_mass", 1, GRID, 3, RngStream(0), study=study)
    assert not rep.passed
    assert rep.rows[-1]["pass"] is False


def test_rate_rejects_zero_moment():
    study = _study({n: 0.0 if n == 64 else 1.0 for n in GRID})
    with pytest.raises(NonPositiveMoment):
        check_rate(DISK, "R_n", 1, GRID, 3, RngStream(0), study=study)


def test_rate_targets_and_modes():
    assert rate_target(DISK, "missing_mass", 1) == pytest.approx(-2 / 3)
    assert rate_target(DensitySpec.uniform(Ball.unit(3)), "V_n_normalized", 2) == pytest.approx(-1)
    assert rate_target(DISK, "R_n", 2) == pytest.approx(2 / 3)
    assert rate_target(MARGIN1, "V_n_normalized", 1) == pytest.approx(-1 / 3)
    assert rate_mode(DISK, "R_n") == "tight"
    assert rate_mode(SQUARE, "R_n") == "bound"
    assert rate_mode(MARGIN1, "V_n_normalized") == "bound"


def test_disk_rates_small_scale():
    for quantity, q in (("V_n_normalized", 1), ("R_n", 1), ("R_n", 2)):
        rep = check_rate(DISK, quantity, q, GRID, 300, RngStream(8))
        assert rep.passed, rep.statistics


def test_square_vertex_count_grows_slower_than_smooth_bound():
    rep = check_rate(SQUARE, "R_n", 1, GRID, 300, RngStream(9))
    assert rep.passed and rep.statistics["mode"] == "bound"
    assert rep.statistics["exponent"] < 1 / 3


# ---------------------------------------------------------------- tail, invariance, worst case

def test_deviation_tail_small_scale():
    rep = check_deviation_tail(DISK, 256, 5000, RngStream(10))
    assert rep.passed and rep.statistics["decay_rate"] > 0


def test_deviation_tail_needs_exceedances():
    with pytest.raises(InsufficientTailMass):
        check_deviation_tail(DISK, 64, 200, RngStream(11), x_grid=np.linspace(0, 50, 10))


def test_affine_invariance_identity_reuses_samples():
    rep = check_affine_invariance(Simplex.standard(2), AffineMap.identity(2), 20, 300,
                                  RngStream(12), same_streams=True)
    assert rep.statistics["ks_statistic"] == 0.0 and rep.passed


def test_affine_invariance_rotation_and_shear():
    c, s = math.cos(0.7), math.sin(0.7)
    rot = AffineMap([[c, -s], [s, c]], [1.0, -2.0])
    assert check_affine_invariance(Ball.unit(2), rot, 50, 2000, RngStream(13)).passed
    shear = AffineMap([[1.0, 7.0], [0.0, 1.0]], [0.0, 0.0])
    assert check_affine_invariance(Simplex.standard(2), shear, 100, 2000, RngStream(14)).passed


def test_worst_case_roster_small_scale():
    rep = check_worst_case_uniform(Ball.unit(2), GRID[:5], 200, RngStream(15))
    assert rep.passed
    assert {"uniform_exponent", "margin_power_gamma1_exponent",
            "projection_exponent"} <= set(rep.statistics)
    with pytest.raises(ValueError):
        check_worst_case_uniform(Ball.unit(2), GRID[:5], 10, RngStream(15), M=0.5)


# ---------------------------------------------------------------- domination, projection

@pytest.mark.parametrize("d", [2, 3])
def test_nykodim_domination_small_scale(d):
    rep = check_nykodim_domination(d, 40, RngStream(16))
    assert rep.passed and rep.statistics["max_ratio_to_bound"] < 1


def test_projection_density_small_scale():
    rep = check_projection_density(200_000, RngStream(17))
    assert rep.passed
    assert rep.statistics["c"] == pytest.approx(3 / (2 * math.pi))


def test_report_is_json_serializable():
    rep = check_efron(TRIANGLE, 3, 50, RngStream(18))
    data = json.loads(json.dumps(rep.to_dict()))
    assert data["check_name"] == "efron" and isinstance(data["pass"], bool)
    assert set(data["rows"][0]) == {"check", "n", "q", "estimate", "stderr", "bound_or_target", "pass"}
