"""
Input Signal Generators
=======================
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.signal import max_len_seq


class InputKind(Enum):
    PRBS = "prbs"
    MULTI_STEP = "multi_step"
    IMPULSE = "impulse"
    ZERO = "zero"


@dataclass(frozen=True)
class InputSpec:
    """
    Input generator parameters

    prbs        +/- level from a maximal-length shift register of nbits,
                each bit held for `hold` samples, register seeded per channel
    multi_step  cycles through `values`, each held for `dwell` samples
    impulse     unit sample at k = 0 on `channel` (all channels if None)
    zero        all zeros
    """

    kind: InputKind = InputKind.PRBS
    level: float = 1.0
    seed: int = 0
    nbits: int = 10
    hold: int = 1
    values: Tuple[float, ...] = (1.0, 2.0, 1.5)
    dwell: int = 20
    channel: Optional[int] = None

    def with_seed(self, seed: int) -> "InputSpec":
        return InputSpec(
            kind=self.kind,
            level=self.level,
            seed=int(seed),
            nbits=self.nbits,
            hold=self.hold,
            values=self.values,
            dwell=self.dwell,
            channel=self.channel,
        )


def generate_input(spec: InputSpec, length: int, n_u: int) -> np.ndarray:
    """
    Deterministic length x n_u input signal

    Args:
        spec: generator description
        length: number of samples T >= 1
        n_u: number of input channels
    """
    if length < 1:
        raise ValueError(f"input length must be >= 1, got {length}")

    if spec.kind == InputKind.ZERO:
        return np.zeros((length, n_u))

    if spec.kind == InputKind.IMPULSE:
        u = np.zeros((length, n_u))
        if spec.channel is None:
            u[0, :] = 1.0
        else:
            u[0, spec.channel - 1] = 1.0
        return u

    if spec.kind == InputKind.MULTI_STEP:
        if not spec.values or spec.dwell < 1:
            raise ValueError("multi_step input needs values and a positive dwell")
        k = np.arange(length)
        column = np.asarray(spec.values, dtype=float)[(k // spec.dwell) % len(spec.values)]
        return np.tile(column[:, None], (1, n_u))

    return _prbs(spec, length, n_u)


def _prbs(spec: InputSpec, length: int, n_u: int) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)
    hold = max(int(spec.hold), 1)
    bits_needed = -(-length // hold)
    u = np.empty((length, n_u))

    for j in range(n_u):
        state = rng.integers(0, 2, size=spec.nbits)
        if not state.any():
            state[0] = 1
        seq, _ = max_len_seq(spec.nbits, state=state, length=bits_needed)
        levels = spec.level * (2.0 * seq.astype(float) - 1.0)
        u[:, j] = np.repeat(levels, hold)[:length]
    return u
