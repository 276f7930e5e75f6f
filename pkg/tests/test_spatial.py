import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracharm import PointCloud, build_index, estimate_epsilon, radius_query
from fracharm.errors import DegenerateSamplingError
from fracharm.spatial import knn_query

from conftest import sphere_points

LINE = np.column_stack((np.arange(5.0), np.zeros(5), np.zeros(5)))


def brute_ball(pts, c, r):
    d = pts - c
    return np.flatnonzero((d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]) <= r * r)


def test_singleton():
    idx = build_index(PointCloud([[1.0, 2.0, 3.0]]))
    assert radius_query(idx, [1, 2, 3], 0.5).tolist() == [0]


def test_far_query_is_empty():
    idx = build_index(PointCloud(np.random.default_rng(0).random((50, 3))))
    assert radius_query(idx, [100.0, 100.0, 100.0], 1.0).size == 0


def test_line_closed_ball_boundaries():
    idx = build_index(PointCloud(LINE))
    assert radius_query(idx, LINE[2], 1.0).tolist() == [1, 2, 3]
    assert radius_query(idx, LINE[2], 0.999).tolist() == [2]


def test_random_queries_match_exhaustive_scan():
    rng = np.random.default_rng(4)
    pts = rng.random((100, 3))
    idx = build_index(PointCloud(pts))
    for _ in range(20):
        c, r = rng.random(3), rng.uniform(0.05, 0.5)
        np.testing.assert_array_equal(radius_query(idx, c, r), brute_ball(pts, c, r))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 500), st.integers(0, 2**32 - 1), st.floats(0.01, 1.0))
def test_neighborhoods_match_scan_property(n, seed, r):
    rng = np.random.default_rng(seed)
    # a coarse lattice puts many pairs exactly on the ball boundary
    pts = np.round(rng.random((n, 3)) * 8) / 8
    cloud = PointCloud(pts)
    idx = build_index(cloud)
    flat, off = idx.radius_neighborhoods(r)
    for i in range(0, n, max(1, n // 25)):
        np.testing.assert_array_equal(flat[off[i]:off[i + 1]], brute_ball(pts, pts[i], r))
        np.testing.assert_array_equal(radius_query(idx, pts[i], r), brute_ball(pts, pts[i], r))
    assert cloud.points.tobytes() == pts.tobytes()


def test_knn():
    idx = build_index(PointCloud(LINE))
    d, i = knn_query(idx, [0.1, 0, 0], 2)
    assert i.tolist() == [0, 1]
    np.testing.assert_allclose(d, [0.1, 0.9])


def test_epsilon_line_and_pair():
    assert estimate_epsilon(build_index(PointCloud(LINE))).epsilon == 1.0
    pair = PointCloud([[0, 0, 0], [3, 0, 0]])
    est = estimate_epsilon(build_index(pair), pair)
    assert est.epsilon == 3.0
    assert est.per_point_nn.tolist() == [3.0, 3.0]


def test_epsilon_skips_duplicates():
    pts = np.vstack((LINE, LINE[:1]))
    assert estimate_epsilon(build_index(PointCloud(pts))).epsilon == 1.0


def test_epsilon_degenerate():
    with pytest.raises(DegenerateSamplingError):
        estimate_epsilon(build_index(PointCloud(np.zeros((4, 3)))))
    with pytest.raises(DegenerateSamplingError):
        estimate_epsilon(build_index(PointCloud(np.zeros((1, 3)))))


def test_epsilon_sphere_matches_exhaustive_and_heuristic():
    pts = sphere_points(500, seed=11)
    est = estimate_epsilon(build_index(PointCloud(pts)))
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    np.fill_diagonal(d, np.inf)
    oracle = d.min(axis=1)
    np.testing.assert_allclose(est.per_point_nn, oracle, rtol=1e-12)
    assert est.epsilon == pytest.approx(oracle.mean(), rel=1e-12)
    heuristic = np.sqrt(4 * np.pi / 500) * 0.5
    assert abs(est.epsilon - heuristic) <= 0.2 * heuristic
