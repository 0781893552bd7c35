"""
SNR Scaling
===========

Convention: SNR = 10 log10(P_signal / P_noise), where P_signal is the mean
squared output of a noise-free healthy simulation (averaged over samples and
outputs) and P_noise is the stationary output power contributed by the
innovation path, trace(C P C^T + Sigma_e) / n_y with P solving the discrete
Lyapunov equation P = A P A^T + K Sigma_e K^T. Scaling Sigma_e by alpha
scales P_noise by alpha.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import scipy.linalg

from ..errors import ModelValidationError, ZeroSignalPower
from ..system.models import StateSpaceModel
from ..system.simulator import simulate

logger = logging.getLogger(__name__)

SNR_CONVENTION = (
    "10*log10(mean(y_clean^2) / (trace(C P C^T + Sigma_e)/n_y)), "
    "P = A P A^T + K Sigma_e K^T"
)


@dataclass(frozen=True)
class NoiseScale:
    alpha: float
    target_snr_db: float
    signal_power: float
    unit_noise_power: float

    @property
    def noise_power(self) -> float:
        return self.alpha * self.unit_noise_power

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "target_snr_db": self.target_snr_db,
            "signal_power": self.signal_power,
            "unit_noise_power": self.unit_noise_power,
            "noise_power": self.noise_power,
            "convention": SNR_CONVENTION,
        }


def output_noise_power(model: StateSpaceModel) -> float:
    """Stationary per-output noise power for the unscaled Sigma_e"""
    if model.spectral_radius >= 1.0:
        raise ModelValidationError(
            f"stationary noise power needs a stable A (spectral radius {model.spectral_radius:.4f})"
        )
    Q = model.K @ model.Sigma_e @ model.K.T
    P = scipy.linalg.solve_discrete_lyapunov(model.A, Q) if model.n else np.zeros((0, 0))
    covariance = model.C @ P @ model.C.T + model.Sigma_e
    return float(np.trace(covariance)) / model.n_y


def innovation_std(model: StateSpaceModel) -> float:
    """RMS innovation standard deviation, sqrt(trace(Sigma_e) / n_y)"""
    return math.sqrt(float(np.trace(model.Sigma_e)) / model.n_y)


def snr_db(signal_power: float, noise_power: float) -> float:
    if noise_power == 0.0:
        return math.inf
    return 10.0 * math.log10(signal_power / noise_power)


def snr_to_noise_scale(model: StateSpaceModel, u, target_snr_db: float) -> NoiseScale:
    """
    alpha such that the scaled innovation reaches target_snr_db on input u

    Raises:
        ZeroSignalPower: when the noise-free response to u is identically zero
    """
    clean = simulate(model, u)
    signal_power = float(np.mean(clean.y ** 2))
    if signal_power == 0.0:
        raise ZeroSignalPower("noise-free output has zero power; SNR is undefined")

    unit = output_noise_power(model)
    if math.isinf(target_snr_db) and target_snr_db > 0:
        alpha = 0.0
    elif unit == 0.0:
        raise ModelValidationError("innovation path carries no noise power; cannot reach a finite SNR")
    else:
        alpha = signal_power / (unit * 10.0 ** (target_snr_db / 10.0))

    logger.info(
        f"SNR scaling: P_signal={signal_power:.4g}, P_noise(unit)={unit:.4g}, "
        f"target={target_snr_db} dB -> alpha={alpha:.4g}"
    )
    return NoiseScale(alpha, float(target_snr_db), signal_power, unit)
