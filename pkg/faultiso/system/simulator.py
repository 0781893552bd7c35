"""
Innovation-Form Simulator
=========================
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from ..errors import DimensionMismatch, ModelValidationError
from .models import StateSpaceModel, TrajectoryData
from .scenarios import FaultScenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseSpec:
    """Innovation noise switch; scale multiplies Sigma_e"""

    enabled: bool = False
    seed: Optional[int] = None
    scale: float = 1.0

    @classmethod
    def off(cls) -> "NoiseSpec":
        return cls(False)

    @classmethod
    def on(cls, seed: int, scale: float = 1.0) -> "NoiseSpec":
        return cls(True, int(seed), float(scale))


def noise_factor(sigma: np.ndarray) -> np.ndarray:
    """
    F with F F^T = sigma

    Cholesky when sigma is positive definite, otherwise a symmetric
    eigenvalue square root for the semidefinite case.
    """
    if sigma.size == 0:
        return sigma.copy()
    try:
        return scipy.linalg.cholesky(sigma, lower=True)
    except np.linalg.LinAlgError:
        w, v = scipy.linalg.eigh(sigma)
        if np.min(w) < -1e-12 * max(1.0, np.max(np.abs(w))):
            raise ModelValidationError("innovation covariance is not positive semidefinite")
        return v * np.sqrt(np.clip(w, 0.0, None))


def draw_innovations(model: StateSpaceModel, length: int, seed: int, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((length, model.n_y))
    return z @ noise_factor(model.Sigma_e * scale).T


def simulate(
    model: StateSpaceModel,
    u: np.ndarray,
    scenario: Optional[FaultScenario] = None,
    noise: Optional[NoiseSpec] = None,
    x0: Optional[np.ndarray] = None,
) -> TrajectoryData:
    """
    Run x_{k+1} = A x_k + B_u u_k + B_f f_k + K e_k,
        y_k     = C x_k + D_u u_k + D_f f_k + e_k

    Every channel of the model is a potential fault entry; the scenario
    decides which ones carry a nonzero signal at each sample.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u.reshape(-1, 1)
    T = u.shape[0]
    if T < 1:
        raise ValueError("input must have at least one sample")
    if u.shape[1] != model.n_u:
        raise DimensionMismatch(f"input has {u.shape[1]} channels, model has n_u = {model.n_u}")

    scenario = scenario or FaultScenario.healthy()
    noise = noise or NoiseSpec.off()
    f, active = scenario.materialize(T, model.n_u, model.n_y)
    b_f, d_f = model.fault_matrices(model.channels())

    if noise.enabled:
        e = draw_innovations(model, T, noise.seed if noise.seed is not None else 0, noise.scale)
    else:
        e = np.zeros((T, model.n_y))

    x = np.zeros(model.n) if x0 is None else np.asarray(x0, dtype=float).reshape(model.n)
    start = x.copy()

    w = np.hstack([u, f, e])
    B = np.hstack([model.B_u, b_f, model.K])
    D = np.hstack([model.D_u, d_f, np.eye(model.n_y)])

    states = np.zeros((T, model.n))
    y = np.zeros((T, model.n_y))
    for k in range(T):
        states[k] = x
        y[k] = model.C @ x + D @ w[k]
        x = model.A @ x + B @ w[k]

    logger.debug(f"Simulated {T} samples of {model.name} (noise={'on' if noise.enabled else 'off'})")
    return TrajectoryData(u=u, y=y, f=f, active=active, e=e, x=states, x0=start)
