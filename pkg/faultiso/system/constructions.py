"""
Model-Based Constructions
=========================

Markov parameters, extended observability matrices and lower block-Toeplitz
matrices. These are the oracles the data-driven path is checked against.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .models import FaultChannel, FaultSubsystem, StateSpaceModel, normalize_output_subset


class ChannelSetKind(Enum):
    INPUT = "input"
    FAULT = "fault"
    INNOVATION = "innovation"


@dataclass(frozen=True)
class ChannelSet:
    """Which columns the Markov parameters map from"""

    kind: ChannelSetKind
    channels: Tuple[FaultChannel, ...] = ()

    @classmethod
    def inputs(cls) -> "ChannelSet":
        return cls(ChannelSetKind.INPUT)

    @classmethod
    def faults(cls, *channels: FaultChannel) -> "ChannelSet":
        return cls(ChannelSetKind.FAULT, tuple(channels))

    @classmethod
    def innovation(cls) -> "ChannelSet":
        return cls(ChannelSetKind.INNOVATION)


def _select(model: StateSpaceModel, channel_set: ChannelSet) -> Tuple[np.ndarray, np.ndarray]:
    if channel_set.kind == ChannelSetKind.INPUT:
        return model.B_u, model.D_u
    if channel_set.kind == ChannelSetKind.INNOVATION:
        return model.K, np.eye(model.n_y)
    return model.fault_matrices(channel_set.channels)


def _rows(output_subset: Optional[Tuple[int, ...]]) -> Optional[List[int]]:
    return None if output_subset is None else [i - 1 for i in output_subset]


def markov_sequence(A: np.ndarray, B: np.ndarray, C: np.ndarray, D: np.ndarray, horizon: int) -> List[np.ndarray]:
    """[D, CB, CAB, ..., C A^{horizon-2} B]"""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    params = [D.copy()]
    state_map = B
    for _ in range(1, horizon):
        params.append(C @ state_map)
        state_map = A @ state_map
    return params


def observability_matrix(A: np.ndarray, C: np.ndarray, horizon: int) -> np.ndarray:
    """[C; CA; ...; C A^{horizon-1}]"""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    blocks, row = [], C
    for _ in range(horizon):
        blocks.append(row)
        row = row @ A
    return np.vstack(blocks).reshape(horizon * C.shape[0], A.shape[0])


def block_toeplitz(markov: Sequence[np.ndarray]) -> np.ndarray:
    """Lower block-triangular Toeplitz matrix from Markov parameters"""
    horizon = len(markov)
    rows, cols = markov[0].shape
    out = np.zeros((horizon * rows, horizon * cols))
    for i in range(horizon):
        for j in range(i + 1):
            out[i * rows:(i + 1) * rows, j * cols:(j + 1) * cols] = markov[i - j]
    return out


def markov_parameters(
    model: StateSpaceModel,
    channel_set: ChannelSet,
    L: int,
    output_subset: Optional[Sequence[int]] = None,
) -> List[np.ndarray]:
    """
    M_0 ... M_{L-1} for inputs, fault channels or innovations

    M_0 is D_u, D_f or I respectively; M_i = C A^{i-1} B for i > 0.
    """
    B, D = _select(model, channel_set)
    params = markov_sequence(model.A, B, model.C, D, L)
    rows = _rows(normalize_output_subset(output_subset, model.n_y))
    if rows is not None:
        params = [m[rows] for m in params]
    return params


def extended_observability(model: StateSpaceModel, L: int, output_subset: Optional[Sequence[int]] = None) -> np.ndarray:
    rows = _rows(normalize_output_subset(output_subset, model.n_y))
    C = model.C if rows is None else model.C[rows]
    return observability_matrix(model.A, C, L)


def toeplitz(
    model: StateSpaceModel,
    channel_set: ChannelSet,
    L: int,
    output_subset: Optional[Sequence[int]] = None,
) -> np.ndarray:
    return block_toeplitz(markov_parameters(model, channel_set, L, output_subset))


def fault_subsystem(
    model: StateSpaceModel,
    channels: Sequence[FaultChannel],
    output_subset: Optional[Sequence[int]] = None,
) -> FaultSubsystem:
    return FaultSubsystem.from_model(model, channels, output_subset)


def subsystem_observability(subsystem: FaultSubsystem, L: int) -> np.ndarray:
    return observability_matrix(subsystem.A, subsystem.C, L)


def subsystem_toeplitz(subsystem: FaultSubsystem, L: int) -> np.ndarray:
    if L == 0:
        return np.zeros((0, 0))
    return block_toeplitz(markov_sequence(subsystem.A, subsystem.B_f, subsystem.C, subsystem.D_f, L))


def stacked_fault_map(source: Union[StateSpaceModel, FaultSubsystem], L: int, channels=None) -> np.ndarray:
    """[O_L T^f_L] for a subsystem, or for a model and channel list"""
    subsystem = source if isinstance(source, FaultSubsystem) else fault_subsystem(source, channels)
    return np.hstack([subsystem_observability(subsystem, L), subsystem_toeplitz(subsystem, L)])
