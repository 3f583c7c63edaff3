import numpy as np
import pytest

from centerstone import oracle
from centerstone.scenarios import tight_triangle
from conftest import uniform


def test_depth_odd_median_1d():
    ps = [[float(v)] for v in range(1, 10)]  # 2k+1 with k = 4
    assert oracle.oracle_depth([5.0], ps) == 5


def test_depth_triangle_vertex():
    assert oracle.oracle_depth([0, 0], [[0, 0], [3, 0], [0, 3]]) == 1


def test_depth_outside():
    assert oracle.oracle_depth([5, 5], [[0, 0], [3, 0], [0, 3]]) == 0


@pytest.mark.parametrize("d,n", [(2, 201), (3, 81), (4, 61), (5, 41)])
def test_depth_refuses_large_inputs(d, n):
    with pytest.raises(oracle.OracleLimitExceeded):
        oracle.oracle_depth(np.zeros(d), uniform(0, n, d))


def test_depth_at_limits_runs():
    assert oracle.oracle_depth(np.zeros(2), uniform(0, 200, 2)) > 0


def test_safe_point_tight_triangle_six():
    ps = tight_triangle(6)
    assert not oracle.oracle_safe_point_exists(ps, 2)
    assert oracle.oracle_safe_point_exists(ps, 1)


@pytest.mark.parametrize("seed", range(5))
def test_safe_point_exists_at_centerpoint_bound(seed):
    for n in (6, 9, 12):
        ps = uniform([seed, n], n, 2)
        assert oracle.oracle_safe_point_exists(ps, -(-n // 3) - 1)


def test_safe_point_refuses_large():
    with pytest.raises(oracle.OracleLimitExceeded):
        oracle.oracle_safe_point_exists(uniform(0, 16, 2), 1)


def test_safe_point_too_many_faulty():
    assert not oracle.oracle_safe_point_exists(uniform(0, 6, 2), 4)


def test_in_hull_square_and_segment():
    sq = [[0, 0], [1, 0], [0, 1], [1, 1]]
    assert oracle.oracle_in_hull([0.5, 0.5], sq)
    assert oracle.oracle_in_hull([1, 1], sq)
    assert not oracle.oracle_in_hull([1.01, 0.5], sq)
    assert oracle.oracle_in_hull([0.25, 0.25], [[0, 0], [1, 1]])
    assert not oracle.oracle_in_hull([0.25, 0.3], [[0, 0], [1, 1]])


def test_oracle_hull_reusable():
    ps = uniform(1, 25, 3)
    hull = oracle.OracleHull(ps)
    pts = uniform(2, 50, 3, -1.2, 1.2)
    assert [hull.contains(p) for p in pts] == [oracle.oracle_in_hull(p, ps) for p in pts]


def test_facets_of_square():
    a, b = oracle.facets([[0, 0], [1, 0], [0, 1], [1, 1]])
    assert len(a) == 4
    assert np.all(a @ np.array([0.5, 0.5]) < b)


def test_subset_count():
    assert oracle.subset_count(6, 2) == 15
