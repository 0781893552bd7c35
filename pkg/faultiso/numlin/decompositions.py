"""
Rank-Revealing Decompositions
=============================

Dense SVD/QR kernels underpinning every rank and nullity computation in
faultiso. All functions are pure and operate on float64 copies.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from ..errors import InvalidMatrix, OrderAmbiguous

Matrix = np.ndarray

# Relative singular-value threshold for noise-free data
DEFAULT_REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RankDecision:
    """Outcome of a numerical rank test"""

    numerical_rank: int
    singular_values: np.ndarray
    tolerance_used: float

    @property
    def nullity_gap(self) -> float:
        """Ratio between the last kept and first dropped singular value"""
        s = self.singular_values
        if self.numerical_rank == 0 or self.numerical_rank >= len(s):
            return float("inf")
        dropped = s[self.numerical_rank]
        return float("inf") if dropped == 0 else float(s[self.numerical_rank - 1] / dropped)

    def is_clear(self, margin: float = 100.0) -> bool:
        """True when no singular value lies within a factor margin of the threshold"""
        s = self.singular_values
        if len(s) == 0 or self.tolerance_used == 0.0:
            return True
        kept = s[: self.numerical_rank]
        dropped = s[self.numerical_rank:]
        if len(kept) and kept[-1] < self.tolerance_used * margin:
            return False
        if len(dropped) and dropped[0] > self.tolerance_used / margin:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "numerical_rank": self.numerical_rank,
            "singular_values": self.singular_values.tolist(),
            "tolerance_used": self.tolerance_used,
        }


def as_matrix(m, name: str = "matrix") -> Matrix:
    """
    Coerce to a finite 2-D float array

    Vectors become single columns.

    Raises:
        InvalidMatrix: on non-finite entries or more than two dimensions
    """
    arr = np.array(m, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} contains NaN or Inf entries")
    return arr


def numerical_rank(m, rel_tol: float = DEFAULT_REL_TOL) -> RankDecision:
    """
    Numerical rank as the count of singular values above rel_tol * sigma_1

    Args:
        m: matrix to test
        rel_tol: relative threshold, must be positive

    Returns:
        RankDecision with the singular values and the absolute threshold used
    """
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")

    arr = as_matrix(m)
    if arr.size == 0:
        return RankDecision(0, np.zeros(0), 0.0)

    s = scipy.linalg.svd(arr, compute_uv=False)
    if s[0] == 0.0:
        return RankDecision(0, s, 0.0)

    tol = rel_tol * s[0]
    return RankDecision(int(np.sum(s > tol)), s, float(tol))


def gap_rank(singular_values, gap_factor: float = 10.0) -> int:
    """
    Rank at the largest ratio sigma_i / sigma_{i+1}

    Raises:
        OrderAmbiguous: when no ratio reaches gap_factor
    """
    s = np.asarray(singular_values, dtype=float)
    if len(s) == 0 or s[0] == 0.0:
        return 0
    if len(s) == 1:
        raise OrderAmbiguous("a single singular value carries no gap information")

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = s[:-1] / s[1:]
    ratios = np.where(s[1:] == 0.0, np.where(s[:-1] > 0.0, np.inf, 1.0), ratios)

    best = int(np.argmax(ratios))
    if not ratios[best] >= gap_factor:
        raise OrderAmbiguous(
            f"largest singular-value ratio {ratios[best]:.3g} is below the gap factor {gap_factor}"
        )
    return best + 1


def lq_decompose(m) -> Tuple[Matrix, Matrix]:
    """
    LQ factorization m = L @ Q with orthonormal rows in Q

    Computed as the economic QR factorization of m^T. The diagonal of L is
    made non-negative so the factors are unique for full-rank inputs.

    Returns:
        (L, Q): L is rows x k lower triangular, Q is k x cols, k = min(rows, cols)
    """
    arr = as_matrix(m)
    q, r = scipy.linalg.qr(arr.T, mode="economic")
    lower = r.T
    q_rows = q.T

    signs = np.sign(np.diag(lower))
    signs[signs == 0] = 1.0
    return lower * signs, q_rows * signs[:, None]


def svd_split(m, rel_tol: float = DEFAULT_REL_TOL) -> Tuple[Matrix, np.ndarray, Matrix, int]:
    """Full SVD together with the numerical rank at rel_tol"""
    arr = as_matrix(m)
    rows, cols = arr.shape
    if arr.size == 0:
        return np.eye(rows), np.zeros(0), np.eye(cols), 0

    u, s, vt = scipy.linalg.svd(arr, full_matrices=True)
    rank = numerical_rank(arr, rel_tol).numerical_rank
    return u, s, vt, rank
