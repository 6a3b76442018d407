import math

import numpy as np
import pytest

from polylab.errors import (DegenerateInput, DimensionMismatch, InvalidPolytope, OutsideBody,
                            SingularTransform, Unsupported)
from polylab.geometry import (AffineMap, Ball, Box, Ellipsoid, PolytopeBody, Simplex,
                              affine_map, ball_volume, boundary_distance, contains,
                              convex_hull, distance_to_convex, hausdorff_distance,
                              john_ellipsoid_analytic, polytope_volume, random_affine,
                              random_shear, sphere_area, steiner_ball_constants,
                              symmetric_difference_volume)
from polylab.rng import RngStream

from oracles import (ellipse_boundary, halfspace_inside, lp_vertex_mask, mc_volume,
                     nearest_boundary, polygon_boundary, qp_distance)

METHODS = ["beneath-beyond", "qhull"]
SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
DIAMOND = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], float)


def _set(rows):
    return {tuple(np.round(r, 12)) for r in rows}


# ---------------------------------------------------------------- hulls

@pytest.mark.parametrize("method", METHODS)
def test_hull_of_triangle_is_itself(method):
    P = convex_hull([[0, 0], [2, 0], [0, 1]], method=method)
    assert P.n_vertices == 3
    assert P.volume() == pytest.approx(1.0)


@pytest.mark.parametrize("method", METHODS)
def test_square_center_is_not_a_vertex(method):
    P = convex_hull(np.vstack([SQUARE, [[0.5, 0.5]]]), method=method)
    assert _set(P.vertices) == _set(SQUARE)


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("d,n", [(2, 100), (3, 60), (4, 40)])
def test_vertices_match_lp_oracle(method, d, n):
    X = np.random.default_rng(d * 100 + n).random((n, d))
    P = convex_hull(X, method=method)
    assert _set(P.vertices) == _set(X[lp_vertex_mask(X)])
    P.validate()


def test_backends_agree_on_volume_and_facets():
    X = np.random.default_rng(3).standard_normal((200, 3))
    a = convex_hull(X, method="beneath-beyond")
    b = convex_hull(X, method="qhull")
    assert a.volume() == pytest.approx(b.volume(), rel=1e-12)
    assert len(a.offsets) == len(b.offsets)


def test_hull_merges_coplanar_facets_of_cube():
    corners = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], float)
    extra = np.random.default_rng(0).random((50, 3))
    P = convex_hull(np.vstack([corners, extra]))
    assert P.n_vertices == 8
    assert len(P.offsets) == 6
    assert P.volume() == pytest.approx(1.0)


@pytest.mark.parametrize("method", METHODS)
def test_collinear_points_are_degenerate(method):
    with pytest.raises(DegenerateInput):
        convex_hull([[0, 0], [1, 1], [2, 2], [3, 3]], method=method)


def test_hull_input_errors():
    with pytest.raises(DimensionMismatch):
        convex_hull([[0, 0], [1, 0, 0], [0, 1]])
    with pytest.raises(DegenerateInput):
        convex_hull([[0, 0], [1, 0]])
    with pytest.raises(ValueError):
        convex_hull(SQUARE, method="gift-wrap")


# ---------------------------------------------------------------- volume, containment

def test_unit_cube_volume():
    assert polytope_volume(Box.unit(3).polytope()) == pytest.approx(1.0)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_standard_simplex_volume(d):
    P = convex_hull(np.vstack([np.zeros(d), np.eye(d)]))
    assert polytope_volume(P) == pytest.approx(1 / math.factorial(d))


def test_hexagon_area_against_closed_form_and_monte_carlo():
    s = np.linspace(0, 2 * math.pi, 6, endpoint=False)
    V = np.column_stack([np.cos(s), np.sin(s)])
    P = convex_hull(V)
    assert polytope_volume(P) == pytest.approx(3 * math.sqrt(3) / 2, rel=1e-12)
    est, se = mc_volume(halfspace_inside(V), [-1, -1], [1, 1], 4000, seed=11)
    assert abs(est - polytope_volume(P)) <= 4 * se


def test_random_polytope_volume_against_monte_carlo():
    X = np.random.default_rng(5).standard_normal((15, 3))
    P = convex_hull(X)
    est, se = mc_volume(halfspace_inside(X), X.min(0), X.max(0), 3000, seed=12)
    assert abs(est - P.volume()) <= 4 * se


def test_volume_rejects_inconsistent_polytope():
    P = convex_hull(SQUARE)
    from polylab.geometry.polytope import pyramid_volume
    with pytest.raises(InvalidPolytope):
        pyramid_volume(P.vertices[P.simplices], P.normals[P.simplex_facet],
                       P.offsets[P.simplex_facet], np.array([5.0, 5.0]))


def test_contains_examples():
    P = convex_hull(SQUARE)
    assert contains(P, [0.5, 0.5])
    assert all(contains(P, v) for v in SQUARE)
    assert not contains(P, [2.0, 0.5])
    assert contains(P, np.array([[0.1, 0.1], [3, 3]])).tolist() == [True, False]
    with pytest.raises(DimensionMismatch):
        contains(P, [0.5, 0.5, 0.5])


# ---------------------------------------------------------------- distances

def test_distance_examples():
    assert distance_to_convex([2, 0], convex_hull(DIAMOND)) == pytest.approx(1.0, abs=1e-7)
    assert distance_to_convex([2, 2], convex_hull(SQUARE)) == pytest.approx(math.sqrt(2), abs=1e-7)
    assert distance_to_convex([0.3, 0.3], convex_hull(SQUARE)) == 0.0


@pytest.mark.parametrize("d", [2, 3, 5])
def test_distance_matches_qp_oracle(d):
    g = np.random.default_rng(d)
    X = g.standard_normal((25, d))
    P = convex_hull(X)
    for _ in range(5):
        x = 3 * g.standard_normal(d)
        assert distance_to_convex(x, P, tol=1e-10) == pytest.approx(qp_distance(x, P.vertices), abs=1e-6)


def test_hausdorff_examples():
    sq = convex_hull(SQUARE)
    assert hausdorff_distance(sq, sq) == 0.0
    assert hausdorff_distance(sq, convex_hull(SQUARE + [0.3, 0])) == pytest.approx(0.3, abs=1e-7)
    big = convex_hull(2 * SQUARE - 1)
    d = hausdorff_distance(big, convex_hull(DIAMOND))
    assert d == pytest.approx(math.sqrt(2) / 2, abs=1e-7)
    bnd = polygon_boundary([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    dense = max(distance_to_convex(p, convex_hull(DIAMOND)) for p in bnd[::50])
    assert d == pytest.approx(dense, abs=1e-6)


def test_symmetric_difference_examples():
    d = Ball.unit(2)
    same = symmetric_difference_volume(d, d, 10_000, RngStream(1))
    assert same.mean == 0.0 and same.stderr == 0.0
    est = symmetric_difference_volume(d, Ball([0, 0], 0.9), 200_000, RngStream(2))
    assert abs(est.mean - math.pi * (1 - 0.81)) <= 3 * est.stderr


# ---------------------------------------------------------------- bodies

def test_boundary_distance_examples():
    assert boundary_distance(Ball.unit(3), np.zeros(3)) == pytest.approx(1.0)
    assert boundary_distance(Box.unit(2), [0.2, 0.5]) == pytest.approx(0.2)
    tri = Simplex.standard(2)
    c = np.array([1 / 3, 1 / 3])
    assert boundary_distance(tri, c) == pytest.approx(math.sqrt(2) / 6)
    assert boundary_distance(tri, c) == pytest.approx(
        nearest_boundary(c, polygon_boundary(tri.vertices, 20_000)), abs=1e-4)
    with pytest.raises(OutsideBody):
        boundary_distance(Ball.unit(2), [2.0, 0.0])


def test_ellipse_boundary_distance_against_dense_sampling():
    E = Ellipsoid([0, 0], np.diag([2.0, 0.5]))
    bnd = ellipse_boundary(2.0, 0.5)
    g = np.random.default_rng(4)
    pts = np.array([[0, 0], [1.5, 0.1], [-0.3, 0.4], [1.99, 0.0]])
    pts = np.vstack([pts, (g.random((20, 2)) * 2 - 1) * [1.4, 0.35]])
    got = E.boundary_distance(pts)
    want = [nearest_boundary(p, bnd) for p in pts]
    assert np.allclose(got, want, atol=2e-4)


@pytest.mark.parametrize("K,vol", [
    (Ball.unit(2), math.pi), (Ball([1, 2, 3], 2.0), 32 * math.pi / 3),
    (Box([0, 0], [2, 3]), 6.0), (Simplex.standard(3), 1 / 6),
    (Ellipsoid([0, 0], [[2, 0], [0, 0.5]]), math.pi),
    (PolytopeBody.from_points(SQUARE), 1.0),
])
def test_body_volumes(K, vol):
    assert K.volume() == pytest.approx(vol)
    lo, hi = K.bounding_box()
    est, se = mc_volume(K.contains, lo, hi, 100_000, seed=1)
    assert abs(est - vol) <= 4 * se


def test_support_function():
    assert Ball.unit(3).support([[1, 0, 0]])[0] == pytest.approx(1.0)
    assert Box.unit(2).support([[1, 1]])[0] == pytest.approx(2.0)
    assert Simplex.standard(2).support([[-1, -1]])[0] == pytest.approx(0.0)


def test_surface_area_bounds():
    assert Ball.unit(2).surface_area_bound() == pytest.approx(2 * math.pi)
    assert Box.unit(3).surface_area_bound() == pytest.approx(6.0)
    E = Ellipsoid(np.zeros(2), np.diag([2.0, 1.0]))
    pts = ellipse_boundary(2.0, 1.0, 100_000)
    perimeter = np.sum(np.linalg.norm(np.roll(pts, -1, 0) - pts, axis=1))
    assert E.surface_area_bound() == pytest.approx(perimeter, rel=1e-6)


def test_john_ellipsoid_examples():
    c, A = john_ellipsoid_analytic(Ball.unit(3))
    assert np.allclose(c, 0) and np.allclose(A, np.eye(3))
    c, A = john_ellipsoid_analytic(Box([-2, -1], [2, 1]))
    assert np.allclose(c, 0) and np.allclose(A, np.diag([2.0, 1.0]))
    for d in (2, 3, 4):
        S = Simplex.regular(d)
        c, A = john_ellipsoid_analytic(S)
        assert np.allclose(c, 0, atol=1e-12)
        assert np.allclose(np.linalg.svd(A)[1], S.inradius())
        assert S.inradius() == pytest.approx(1.0 / d)
        assert np.all(np.linalg.norm(S.vertices, axis=1) <= d * S.inradius() + 1e-12)
    with pytest.raises(Unsupported):
        john_ellipsoid_analytic(PolytopeBody.from_points(SQUARE))


# ---------------------------------------------------------------- affine maps

def test_affine_identity_and_scaling():
    P = convex_hull(SQUARE)
    I = AffineMap.identity(2)
    assert np.array_equal(affine_map(I, SQUARE), SQUARE)
    assert affine_map(I, P).volume() == pytest.approx(P.volume())
    S = AffineMap(2 * np.eye(2), np.zeros(2))
    assert affine_map(S, P).volume() == pytest.approx(4.0)
    assert affine_map(S, Ball.unit(2)).volume() == pytest.approx(4 * math.pi)


def test_affine_images_of_bodies_scale_volume():
    T = random_affine(3, RngStream(3), condition=10)
    for K in (Ball.unit(3), Box.unit(3), Simplex.standard(3)):
        TK = affine_map(T, K)
        assert TK.volume() == pytest.approx(abs(T.det) * K.volume(), rel=1e-10)
        pts = np.random.default_rng(0).random((500, 3)) * 2 - 0.5
        inside = K.contains(pts)
        margin = np.abs(TK.contains(affine_map(T, pts), tol=1e-9).astype(int) - inside)
        assert margin.sum() == 0


def test_random_shear_condition_and_singular_maps():
    T = random_shear(2, RngStream(1), condition=50)
    assert np.linalg.cond(T.matrix) == pytest.approx(50, rel=1e-9)
    assert T.det == pytest.approx(1.0)
    with pytest.raises(SingularTransform):
        AffineMap([[1, 2], [2, 4]], [0, 0])
    with pytest.raises(SingularTransform):
        Ball.unit(2).affine_image([[1, 0], [0, 0]], [0, 0])


# ---------------------------------------------------------------- Steiner constants

def test_steiner_constants_in_the_plane():
    s = steiner_ball_constants(2)
    assert s.coefficients[0] == pytest.approx(2 * math.pi)
    assert s.coefficients[1] == pytest.approx(math.pi)
    assert s.alpha1 == pytest.approx(8 * math.pi)
    assert s.excess_volume(1.0) == pytest.approx(3 * math.pi)


def test_steiner_constants_in_space():
    s = steiner_ball_constants(3)
    assert s.alpha1 == pytest.approx(26 * 4 * math.pi / 3)
    assert s.alpha2 == pytest.approx(7 * 4 * math.pi / 3)
    lam = 0.37
    assert s.excess_volume(lam) == pytest.approx(ball_volume(3) * ((1 + lam) ** 3 - 1))
    with pytest.raises(ValueError):
        steiner_ball_constants(1)


def test_ball_volume_and_sphere_area():
    assert ball_volume(1) == pytest.approx(2.0)
    assert ball_volume(4) == pytest.approx(math.pi ** 2 / 2)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(2, 3.0) == pytest.approx(6 * math.pi)


@pytest.mark.parametrize("n", [3, 4, 7, 32, 33, 200])
def test_hull_summary_matches_full_hull_in_the_plane(n):
    from polylab.geometry.hull import hull_summary
    g = np.random.default_rng(n)
    for k in range(50):
        X = g.random((n, 2))
        if k % 2:
            X = np.round(X * 4) / 4  # collinear and repeated points
        try:
            P = convex_hull(X, method="beneath-beyond")
        except DegenerateInput:
            with pytest.raises(DegenerateInput):
                hull_summary(X)
            continue
        S = hull_summary(X)
        assert S.n_vertices == P.n_vertices
        assert S.volume == pytest.approx(P.volume(), abs=1e-12)
        F = g.random((100, 2)) * 1.2 - 0.1
        assert np.array_equal(S.contains(F, 1e-9), P.contains(F))


def test_hull_summary_rejects_collinear_points():
    from polylab.geometry.hull import hull_summary
    with pytest.raises(DegenerateInput):
        hull_summary(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.5, 0.5]]))
