"""
Subspace Geometry
=================

Orthonormal bases for ranges and nullspaces, projections, principal angles
and intersection dimensions.
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import scipy.linalg

from ..errors import DimensionMismatch, InconsistentRankForms
from .decompositions import DEFAULT_REL_TOL, Matrix, as_matrix, numerical_rank, svd_split


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Subspace of R^ambient_dim spanned by the orthonormal columns of basis"""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis has {self.basis.shape[0]} rows, ambient dimension is {self.ambient_dim}"
            )

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def orthogonality_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.basis.T @ self.basis - np.eye(self.dim))))

    def to_dict(self) -> Dict[str, Any]:
        return {"ambient_dim": self.ambient_dim, "basis": self.basis.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SubspaceBasis":
        ambient = int(data["ambient_dim"])
        basis = np.array(data["basis"], dtype=float).reshape(ambient, -1)
        return cls(ambient, basis)

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))


def range_basis(m, rel_tol: float = DEFAULT_REL_TOL) -> SubspaceBasis:
    """Orthonormal basis of the column space"""
    u, _, _, rank = svd_split(m, rel_tol)
    return SubspaceBasis(u.shape[0], u[:, :rank].copy())


def left_nullspace(m, rel_tol: float = DEFAULT_REL_TOL) -> SubspaceBasis:
    """
    Orthonormal basis N with N^T m = 0

    The dimension is always rows(m) - rank(m); the zero matrix yields the
    full identity basis.
    """
    u, _, _, rank = svd_split(m, rel_tol)
    return SubspaceBasis(u.shape[0], u[:, rank:].copy())


def nullspace(m, rel_tol: float = DEFAULT_REL_TOL) -> SubspaceBasis:
    """Orthonormal basis of the (right) nullspace"""
    _, _, vt, rank = svd_split(m, rel_tol)
    return SubspaceBasis(vt.shape[1], vt[rank:].T.copy())


def orthogonal_projection(basis: SubspaceBasis, v) -> np.ndarray:
    """
    Project v (a vector or a matrix of column vectors) onto span(basis)
    """
    vec = np.asarray(v, dtype=float)
    if vec.shape[0] != basis.ambient_dim:
        raise DimensionMismatch(
            f"vector length {vec.shape[0]} does not match ambient dimension {basis.ambient_dim}"
        )
    return basis.basis @ (basis.basis.T @ vec)


def principal_angles(a: SubspaceBasis, b: SubspaceBasis) -> np.ndarray:
    """
    Principal angles in ascending order

    Cosines are the singular values of a^T b clamped to [0, 1]. Angles whose
    cosine exceeds 1/sqrt(2) are recovered from the sines instead, which
    keeps small angles accurate to roundoff.
    """
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )
    if a.dim == 0 or b.dim == 0:
        return np.zeros(0)

    qa, qb = (a.basis, b.basis) if a.dim >= b.dim else (b.basis, a.basis)
    cross = qa.T @ qb
    cosines = np.clip(scipy.linalg.svd(cross, compute_uv=False), 0.0, 1.0)
    sines = np.clip(scipy.linalg.svd(qb - qa @ cross, compute_uv=False), 0.0, 1.0)

    from_cos = np.arccos(cosines)
    from_sin = np.arcsin(sines[::-1])
    return np.where(cosines ** 2 < 0.5, from_cos, from_sin)


def subspace_intersection_dim(p1, p2, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """
    dim(R(p1) ∩ R(p2)) from the rank form, cross-checked by the nullity form

    Raises:
        DimensionMismatch: when the row counts differ
        InconsistentRankForms: when rank p1 + rank p2 - rank [p1 p2] differs
            from dim N([p1 p2]) - dim N(p1) - dim N(p2)
    """
    a = as_matrix(p1, "p1")
    b = as_matrix(p2, "p2")
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"row counts differ: {a.shape[0]} vs {b.shape[0]}")

    stacked = np.hstack([a, b])
    rank_form = (
        numerical_rank(a, rel_tol).numerical_rank
        + numerical_rank(b, rel_tol).numerical_rank
        - numerical_rank(stacked, rel_tol).numerical_rank
    )
    nullity_form = (
        nullspace(stacked, rel_tol).dim - nullspace(a, rel_tol).dim - nullspace(b, rel_tol).dim
    )
    if rank_form != nullity_form:
        raise InconsistentRankForms(
            f"rank form gives {rank_form}, nullity form gives {nullity_form}; "
            f"rel_tol={rel_tol} sits inside a singular-value cluster"
        )
    return rank_form


def subspace_intersection(p1, p2, rel_tol: float = DEFAULT_REL_TOL) -> SubspaceBasis:
    """Orthonormal basis of R(p1) ∩ R(p2)"""
    q1 = range_basis(p1, rel_tol)
    q2 = range_basis(p2, rel_tol)
    if q1.ambient_dim != q2.ambient_dim:
        raise DimensionMismatch(f"row counts differ: {q1.ambient_dim} vs {q2.ambient_dim}")
    if q1.dim == 0 or q2.dim == 0:
        return SubspaceBasis.empty(q1.ambient_dim)

    coupling = nullspace(np.hstack([q1.basis, -q2.basis]), rel_tol)
    if coupling.dim == 0:
        return SubspaceBasis.empty(q1.ambient_dim)

    shared = q1.basis @ coupling.basis[: q1.dim]
    return range_basis(shared, rel_tol)
