import numpy as np
import pytest

from faultiso.errors import DimensionMismatch, InvalidMatrix, OrderAmbiguous
from faultiso.numlin import (
    SubspaceBasis,
    as_matrix,
    gap_rank,
    left_nullspace,
    lq_decompose,
    nullspace,
    numerical_rank,
    orthogonal_projection,
    principal_angles,
    range_basis,
    subspace_intersection,
    subspace_intersection_dim,
)


def _low_rank(rng, rows, cols, rank):
    return rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))


def test_numerical_rank_of_product(rng):
    decision = numerical_rank(_low_rank(rng, 8, 6, 3))
    assert decision.numerical_rank == 3
    assert len(decision.singular_values) == 6
    assert decision.is_clear()


def test_numerical_rank_edge_cases():
    assert numerical_rank(np.zeros((4, 3))).numerical_rank == 0
    assert numerical_rank(np.zeros((0, 3))).numerical_rank == 0
    with pytest.raises(ValueError):
        numerical_rank(np.eye(2), rel_tol=0.0)


def test_rank_decision_flags_values_near_threshold():
    m = np.diag([1.0, 1e-9 * 1.5])
    decision = numerical_rank(m, rel_tol=1e-9)
    assert decision.numerical_rank == 2
    assert not decision.is_clear(margin=100.0)


def test_as_matrix_rejects_non_finite():
    assert as_matrix([1.0, 2.0]).shape == (2, 1)
    with pytest.raises(InvalidMatrix):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(InvalidMatrix):
        as_matrix(np.zeros((2, 2, 2)))


def test_gap_rank_picks_largest_ratio():
    assert gap_rank([10.0, 9.0, 1e-3, 1e-4]) == 2
    assert gap_rank([5.0, 4.0, 3.0, 0.0]) == 3
    with pytest.raises(OrderAmbiguous):
        gap_rank([1.0, 0.9, 0.8, 0.7])


def test_lq_decompose_reconstructs(rng):
    m = rng.standard_normal((4, 9))
    L, Q = lq_decompose(m)
    assert L.shape == (4, 4)
    assert np.allclose(L @ Q, m, atol=1e-12)
    assert np.allclose(np.triu(L, 1), 0.0)
    assert np.all(np.diag(L) >= 0.0)
    assert np.allclose(Q @ Q.T, np.eye(4), atol=1e-12)


@pytest.mark.slow
def test_lq_decompose_large_matrix(rng):
    m = rng.standard_normal((200, 2000))
    L, Q = lq_decompose(m)
    assert L.shape == (200, 200) and Q.shape == (200, 2000)
    assert np.linalg.norm(L @ Q - m) <= 1e-10 * np.linalg.norm(m)


def test_left_nullspace_annihilates(rng):
    m = _low_rank(rng, 7, 5, 2)
    basis = left_nullspace(m)
    assert basis.dim == 5
    assert np.max(np.abs(basis.basis.T @ m)) < 1e-10
    assert basis.orthogonality_residual() < 1e-12


def test_left_nullspace_of_zero_is_identity():
    basis = left_nullspace(np.zeros((3, 2)))
    assert basis.dim == 3


def test_nullspace_and_range_dimensions(rng):
    m = _low_rank(rng, 6, 8, 4)
    assert nullspace(m).dim == 4
    assert range_basis(m).dim == 4


def test_principal_angles_identical_and_orthogonal():
    e = np.eye(4)
    a = SubspaceBasis(4, e[:, :2])
    assert np.allclose(principal_angles(a, a), 0.0, atol=1e-15)
    b = SubspaceBasis(4, e[:, 2:])
    assert np.allclose(principal_angles(a, b), np.pi / 2)


def test_principal_angles_resolve_tiny_angles():
    delta = 1e-10
    v = np.array([[1.0], [delta], [0.0]])
    a = SubspaceBasis(3, np.array([[1.0], [0.0], [0.0]]))
    b = range_basis(v)
    angle = principal_angles(a, b)
    assert angle.shape == (1,)
    assert abs(angle[0] - delta) < 1e-16


def test_principal_angles_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        principal_angles(SubspaceBasis(3, np.eye(3)[:, :1]), SubspaceBasis(4, np.eye(4)[:, :1]))


def test_orthogonal_projection():
    basis = SubspaceBasis(3, np.eye(3)[:, :2])
    assert np.allclose(orthogonal_projection(basis, np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 0.0])
    with pytest.raises(DimensionMismatch):
        orthogonal_projection(basis, np.ones(4))


def test_intersection_of_two_planes():
    p1 = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    p2 = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    assert subspace_intersection_dim(p1, p2) == 1
    shared = subspace_intersection(p1, p2)
    assert shared.dim == 1
    assert np.allclose(np.abs(shared.basis[:, 0]), [1.0, 0.0, 0.0])


def test_intersection_of_random_subspaces(rng):
    common = rng.standard_normal((10, 2))
    p1 = np.hstack([common, rng.standard_normal((10, 3))])
    p2 = np.hstack([rng.standard_normal((10, 2)), common])
    assert subspace_intersection_dim(p1, p2) == 2
    assert subspace_intersection(p1, p2).dim == 2


@pytest.mark.slow
def test_intersection_forms_agree_on_random_pairs(rng):
    for _ in range(1000):
        ambient = int(rng.integers(8, 14))
        c = int(rng.integers(0, 3))
        a = int(rng.integers(1, 3))
        b = int(rng.integers(1, ambient - 2 * c - a + 1))
        common = rng.standard_normal((ambient, c))
        p1 = np.hstack([common, rng.standard_normal((ambient, a))])
        p2 = np.hstack([rng.standard_normal((ambient, b)), common])
        # a repeated column leaves the span unchanged but adds nullity
        p1 = np.hstack([p1, 2.0 * p1[:, -1:]])
        assert subspace_intersection_dim(p1, p2) == c
        assert subspace_intersection(p1, p2).dim == c


def test_intersection_row_mismatch():
    with pytest.raises(DimensionMismatch):
        subspace_intersection_dim(np.eye(3), np.eye(4))
