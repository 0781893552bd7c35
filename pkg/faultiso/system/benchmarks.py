"""
Benchmark and Random Systems
============================

The four-state, single-input, three-output benchmark plant and a seeded
generator of random minimal systems for property suites.
"""

import logging
from typing import Optional

import numpy as np
import scipy.linalg

from ..numlin import numerical_rank
from .models import StateSpaceModel

logger = logging.getLogger(__name__)

BENCHMARK_ZERO = 0.95

_A = [
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [-0.136, 0.956, -2.406, 2.580],
]
_B_U = [[2.520], [3.147], [2.945], [2.458]]
_C = [
    [1.0, 0.0, 0.0, 0.0],
    [-0.027, 0.083, -0.038, -0.030],
    [0.194, -0.868, 1.234, -0.566],
]
_D_U = [[1.0], [1.0], [1.0]]
_K = [
    [0.1760, 0.6259, 0.0686],
    [-0.0815, 0.4654, -0.2711],
    [-0.288, 0.2886, -0.1961],
    [-0.3268, 0.1314, 0.3146],
]
_SIGMA_E = [
    [5.25, 4.73, 3.96],
    [4.73, 4.87, 3.68],
    [3.96, 3.68, 3.59],
]

# Outputs (1-based) whose transfer from the input vanishes at BENCHMARK_ZERO
_ZERO_OUTPUTS = (1, 3)


def benchmark_model(exact_zero: bool = True) -> StateSpaceModel:
    """
    Benchmark plant with one actuator and three sensors

    The tabulated coefficients are rounded to three decimals, which moves
    the common zero of outputs 1 and 3 slightly off 0.95. With exact_zero
    the rows of C for those outputs receive the smallest change that puts
    the zero back at exactly 0.95.
    """
    A = np.array(_A)
    B_u = np.array(_B_U)
    C = np.array(_C)
    D_u = np.array(_D_U)

    if exact_zero:
        v = scipy.linalg.solve(BENCHMARK_ZERO * np.eye(4) - A, B_u).ravel()
        for output in _ZERO_OUTPUTS:
            row = output - 1
            gain = C[row] @ v + D_u[row, 0]
            C[row] = C[row] - (gain / (v @ v)) * v
        logger.debug(f"Benchmark C corrected for an exact zero at {BENCHMARK_ZERO}")

    return StateSpaceModel(
        A=A,
        B_u=B_u,
        C=C,
        D_u=D_u,
        K=np.array(_K),
        Sigma_e=np.array(_SIGMA_E),
        name="benchmark" if exact_zero else "benchmark-tabulated",
    )


def _controllable(A: np.ndarray, B: np.ndarray) -> bool:
    n = A.shape[0]
    blocks, block = [], B
    for _ in range(n):
        blocks.append(block)
        block = A @ block
    return numerical_rank(np.hstack(blocks), 1e-8).numerical_rank == n


def _observable(A: np.ndarray, C: np.ndarray) -> bool:
    return _controllable(A.T, C.T)


def random_state_space(
    n: int,
    n_u: int,
    n_y: int,
    seed: int = 0,
    spectral_radius: float = 0.9,
    zero_feedthrough: bool = False,
    noise_std: float = 0.1,
    max_attempts: int = 100,
    rng: Optional[np.random.Generator] = None,
) -> StateSpaceModel:
    """
    Random minimal stable system

    A is a Gaussian matrix rescaled to the requested spectral radius; draws
    that are not both controllable and observable are rejected.
    """
    rng = rng or np.random.default_rng(seed)
    for _ in range(max_attempts):
        A = rng.standard_normal((n, n))
        radius = np.max(np.abs(np.linalg.eigvals(A))) if n else 1.0
        A = A * (spectral_radius / radius) if radius > 0 else A
        B = rng.standard_normal((n, n_u))
        C = rng.standard_normal((n_y, n))
        D = np.zeros((n_y, n_u)) if zero_feedthrough else rng.standard_normal((n_y, n_u))
        if n and not (_controllable(A, B) and _observable(A, C)):
            continue
        K = noise_std * rng.standard_normal((n, n_y))
        S = rng.standard_normal((n_y, n_y))
        sigma = noise_std ** 2 * (S @ S.T + n_y * np.eye(n_y)) / n_y
        return StateSpaceModel(A=A, B_u=B, C=C, D_u=D, K=K, Sigma_e=sigma, name=f"random-{seed}")
    raise RuntimeError(f"no minimal system found after {max_attempts} attempts")
