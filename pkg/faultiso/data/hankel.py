"""
Hankel Matrices and Windows
===========================
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, WindowOutOfRange, WindowTooLong
from ..numlin import as_matrix, numerical_rank


@dataclass(frozen=True, eq=False)
class HankelStack:
    """Block Hankel matrix whose column j stacks samples j .. j+L-1"""

    source_signal_dim: int
    window: int
    matrix: np.ndarray

    @property
    def depth(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class WindowVector:
    signal_dim: int
    window: int
    entries: np.ndarray


def hankel(signal, L: int) -> HankelStack:
    """
    (L*d) x (T-L+1) block Hankel matrix of a T x d signal

    Raises:
        WindowTooLong: if L exceeds the number of samples
    """
    arr = as_matrix(signal, "signal")
    T, d = arr.shape
    if L < 1:
        raise ValueError(f"window length must be >= 1, got {L}")
    if L > T:
        raise WindowTooLong(f"window length {L} exceeds the {T} available samples")

    depth = T - L + 1
    # row block i holds samples i .. i+depth-1
    matrix = np.vstack([arr[i:i + depth].T for i in range(L)])
    return HankelStack(d, L, matrix)


def window(signal, k: int, L: int) -> WindowVector:
    arr = as_matrix(signal, "signal")
    T, d = arr.shape
    if k < 0 or L < 1 or k + L > T:
        raise WindowOutOfRange(f"window [{k}, {k + L}) is outside 0..{T}")
    return WindowVector(d, L, arr[k:k + L].reshape(-1))


def check_rank_condition(states, u_hankel: HankelStack, rel_tol: float = 1e-9) -> dict:
    """
    Check rank [X; U] = n + L*n_u for the state sequence aligned with the
    input Hankel columns

    Args:
        states: n x depth matrix of states x_k at each window start
        u_hankel: input Hankel matrix with the same depth
    """
    X = np.asarray(states, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != u_hankel.depth:
        raise DimensionMismatch(f"state depth {X.shape[1]} differs from Hankel depth {u_hankel.depth}")

    required = X.shape[0] + u_hankel.matrix.shape[0]
    rank = numerical_rank(np.vstack([X, u_hankel.matrix]), rel_tol).numerical_rank
    return {"satisfied": rank == required, "rank": rank, "required": required}
