from fractions import Fraction as Fr
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ifslab.errors import DimensionError, DomainError
from ifslab.geometry import (PointCloud, Polytope, block_diag, check_orthogonal, convex_hull,
                             hausdorff_distance, interval, operator_norm, opnorm_2x2,
                             point_polytope_distance, polygon_hausdorff_batch, polytope_hausdorff,
                             polytopes_disjoint, rotation)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@given(arrays(float, (2, 2), elements=finite))
def test_opnorm_2x2_matches_svd(M):
    assert opnorm_2x2(M[None])[0] == pytest.approx(np.linalg.svd(M, compute_uv=False)[0],
                                                   rel=1e-12, abs=1e-12)


def test_opnorm_2x2_near_equal_singular_values():
    # rotations differ by a tiny angle: both singular values equal 2 sin(t/2)
    t = 1e-7
    D = rotation(0.3) - rotation(0.3 + t)
    assert operator_norm(D) == pytest.approx(2 * math.sin(t / 2), rel=1e-9)


@given(st.integers(1, 4), st.integers(0, 2**31))
def test_block_diag_norm_is_max_of_blocks(m, seed):
    rng = np.random.default_rng(seed)
    A, B = rng.normal(size=(m, m)), rng.normal(size=(m + 1, m + 1))
    assert operator_norm(block_diag(A, B)) == pytest.approx(
        max(operator_norm(A), operator_norm(B)), rel=1e-12)


def test_block_diag_keeps_exact_entries():
    M = block_diag(np.array([[Fr(1, 3)]], dtype=object), np.array([[1, 0], [0, -1]], dtype=object))
    assert M.dtype == object and M[0, 0] == Fr(1, 3) and M[0, 1] == 0


def test_operator_norm_rejects_bad_shapes():
    with pytest.raises(DimensionError):
        operator_norm(np.ones((2, 3)))
    with pytest.raises(DomainError):
        operator_norm(np.array([[np.nan]]))


def test_check_orthogonal():
    check_orthogonal(rotation(1.0))
    with pytest.raises(DomainError):
        check_orthogonal(np.array([[1.0, 0.1], [0, 1]]))


def test_hausdorff_simple():
    assert hausdorff_distance([[0.0], [1.0]], [[0.0]]) == 1.0
    assert hausdorff_distance([[0, 0], [3, 4]], [[0, 0], [3, 4]]) == 0.0
    with pytest.raises(DimensionError):
        hausdorff_distance([[0.0]], [[0.0, 1.0]])


clouds = st.integers(1, 30).flatmap(lambda n: arrays(float, (n, 2), elements=finite))


@settings(max_examples=50)
@given(clouds, clouds, clouds)
def test_hausdorff_is_a_metric(A, B, C):
    ab, bc, ac = hausdorff_distance(A, B), hausdorff_distance(B, C), hausdorff_distance(A, C)
    assert ab == hausdorff_distance(B, A)
    assert ac <= ab + bc + 1e-9


def test_hausdorff_kdtree_path_matches_dense():
    rng = np.random.default_rng(0)
    A, B = rng.normal(size=(2500, 2)), rng.normal(size=(1000, 2))
    from ifslab.geometry import _directed_hausdorff
    dense = np.sqrt(np.max(np.min(((A[:, None] - B[None]) ** 2).sum(2), axis=1)))
    assert _directed_hausdorff(A, B) == pytest.approx(dense, rel=1e-12)


def test_point_cloud_validation():
    with pytest.raises(DomainError):
        PointCloud(np.empty((0, 2)))
    with pytest.raises(DomainError):
        PointCloud(np.array([[np.inf]]))


@settings(max_examples=50)
@given(st.integers(3, 40).flatmap(lambda n: arrays(float, (n, 2), elements=finite)))
def test_convex_hull_contains_points(P):
    H = convex_hull(PointCloud(P))
    for p in P:
        assert point_polytope_distance(p, H) <= 1e-9


def test_convex_hull_exact_1d():
    H = convex_hull([Fr(1, 3), Fr(-2, 7), Fr(5)])
    assert H.vertices == ((Fr(-2, 7),), (Fr(5),))
    assert H.diameter() == Fr(37, 7)


def test_interval_polytope_hausdorff():
    assert polytope_hausdorff(interval(0, 1), interval(Fr(1, 2), 2)) == 1


def test_polygon_hausdorff_batch_against_sampling():
    # Hausdorff distance of convex bodies equals the sup of support differences;
    # compare with a dense directional sampling oracle
    rng = np.random.default_rng(1)
    for _ in range(20):
        P = convex_hull(PointCloud(rng.normal(size=(12, 2))))
        Q = convex_hull(PointCloud(rng.normal(size=(12, 2)) + 0.5))
        if len(P.vertices) != len(Q.vertices):
            continue
        got = polygon_hausdorff_batch(P.array()[None].astype(float), Q.array()[None].astype(float))[0]
        ang = np.linspace(0, 2 * np.pi, 20001)
        U = np.stack([np.cos(ang), np.sin(ang)])
        support = np.max(np.abs((P.array().astype(float) @ U).max(0) - (Q.array().astype(float) @ U).max(0)))
        # sampled support differences underestimate the sup by at most R * step
        R = max(np.abs(P.array().astype(float)).max(), np.abs(Q.array().astype(float)).max()) * 2
        assert support - 1e-12 <= got <= support + R * (ang[1] - ang[0])
        assert got == pytest.approx(polytope_hausdorff(P, Q), rel=1e-12, abs=1e-12)


def test_polytopes_disjoint():
    sq = Polytope(((0, 0), (1, 0), (1, 1), (0, 1)))
    far = Polytope(((2, 0), (3, 0), (3, 1), (2, 1)))
    touching = Polytope(((1, 0), (2, 0), (2, 1), (1, 1)))
    assert polytopes_disjoint(sq, far)
    assert not polytopes_disjoint(sq, touching)
    assert polytopes_disjoint(interval(0, Fr(1, 3)), interval(Fr(2, 3), 1))
    assert not polytopes_disjoint(interval(0, Fr(1, 2)), interval(Fr(1, 2), 1))
