import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from polylab.errors import DegenerateInput
from polylab.geometry import (AffineMap, Ball, affine_map, contains, convex_hull,
                              distance_to_convex, hausdorff_distance)
from polylab.rng import RngStream
from polylab.sampling import sample_uniform

coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False, width=64)


lattice = st.integers(-80, 80).map(lambda k: k / 8)


def cloud(d, lo=4, hi=25, elements=coords):
    return st.integers(lo, hi).flatmap(lambda n: arrays(np.float64, (n, d), elements=elements))


def hull_or_skip(X):
    try:
        return convex_hull(X)
    except DegenerateInput:
        assume(False)


SETTINGS = settings(max_examples=40, deadline=None)


@SETTINGS
@given(cloud(2), cloud(2), cloud(2))
def test_hausdorff_is_a_metric(A, B, C):
    P, Q, R = hull_or_skip(A), hull_or_skip(B), hull_or_skip(C)
    pq = hausdorff_distance(P, Q)
    assert pq >= 0
    assert pq == pytest.approx(hausdorff_distance(Q, P), abs=1e-6)
    assert hausdorff_distance(P, P) == 0.0
    assert pq <= hausdorff_distance(P, R) + hausdorff_distance(R, Q) + 1e-6


@SETTINGS
@given(cloud(3, 5, 30), st.integers(0, 2 ** 32))
def test_hull_contains_its_points_and_grows_with_them(X, seed):
    P = hull_or_skip(X)
    assert np.all(contains(P, X, tol=1e-7 * (1 + np.abs(X).max())))
    sub = X[np.random.default_rng(seed).permutation(len(X))[: max(4, len(X) // 2)]]
    try:
        S = convex_hull(sub)
    except DegenerateInput:
        return
    assert S.volume() <= P.volume() * (1 + 1e-9) + 1e-9
    assert hausdorff_distance(S, P) >= 0


@SETTINGS
@given(st.integers(0, 2 ** 32), st.integers(2, 4))
def test_nested_prefixes_shrink_the_missing_volume(seed, d):
    X = sample_uniform(Ball.unit(d), 200, RngStream(seed))
    prev = np.inf
    for n in (d + 1, 10, 25, 60, 120, 200):
        P = convex_hull(X[:n])
        missing = Ball.unit(d).volume() - P.volume()
        assert missing <= prev + 1e-12
        assert P.n_vertices <= n
        prev = missing


# lattice points are either on a face or clearly off it, so tolerance-level
# decisions cannot flip under a well-conditioned map
@SETTINGS
@given(cloud(2, 4, 15, lattice), arrays(np.float64, (2, 2), elements=st.floats(-3, 3)),
       arrays(np.float64, 2, elements=st.floats(-5, 5)))
def test_hulls_are_affine_equivariant(X, A, b):
    assume(abs(np.linalg.det(A)) > 0.05)
    P = hull_or_skip(X)
    TP = affine_map(AffineMap(A, b), P)
    direct = convex_hull(affine_map(AffineMap(A, b), X))
    assert TP.volume() == pytest.approx(abs(np.linalg.det(A)) * P.volume(), rel=1e-8, abs=1e-9)
    assert direct.volume() == pytest.approx(TP.volume(), rel=1e-8, abs=1e-9)
    assert direct.n_vertices == P.n_vertices


@SETTINGS
@given(cloud(3, 5, 20), arrays(np.float64, 3, elements=coords))
def test_distance_is_zero_exactly_inside(X, x):
    P = hull_or_skip(X)
    dist = distance_to_convex(x, P)
    assert dist >= 0
    assert (dist == 0) == bool(contains(P, x))
    # moving towards the nearest vertex never increases the distance by more than the step
    v = P.vertices[np.argmin(np.linalg.norm(P.vertices - x, axis=1))]
    assert distance_to_convex(x + 0.5 * (v - x), P) <= dist + 1e-6


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 63 - 1), st.integers(0, 2 ** 20), st.integers(0, 50))
def test_sampling_is_a_function_of_the_stream(seed, stream, n):
    a = sample_uniform(Ball.unit(3), n, RngStream(seed, stream))
    b = sample_uniform(Ball.unit(3), n, RngStream(seed, stream))
    assert np.array_equal(a, b)
