"""
Subspace-Angle Classifier
=========================

Projects each residual onto every fault dictionary, scores channels by
cos(theta) = ||P r|| / ||r|| and attributes the fault to the best-aligned
channel. Simultaneous faults are searched through direct sums of
dictionaries.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..dictionary.fault_dictionary import FaultDictionarySet
from ..errors import CombinationNotFound, DimensionMismatch
from ..kernel.kernel_filter import ResidualTrace
from ..numlin import range_basis
from ..system.models import FaultChannel

logger = logging.getLogger(__name__)

DEFAULT_TIE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class AngleTrace:
    """cos(theta) per time step (rows) and channel (columns)"""

    times: np.ndarray
    channels: Tuple[FaultChannel, ...]
    cos: np.ndarray
    norms: np.ndarray

    @property
    def angles(self) -> np.ndarray:
        return np.arccos(np.clip(self.cos, 0.0, 1.0))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"k": self.times, "residual_norm": self.norms})
        for j, channel in enumerate(self.channels):
            frame[f"cos_{channel.label}"] = self.cos[:, j]
        return frame


class DecisionStatus(Enum):
    HEALTHY = "healthy"
    FAULT = "fault"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class Decision:
    time: int
    status: DecisionStatus
    channels: Tuple[FaultChannel, ...] = ()
    cos_max: float = 0.0
    margin: float = 0.0

    @property
    def label(self) -> str:
        if self.status == DecisionStatus.HEALTHY:
            return "healthy"
        if self.status == DecisionStatus.FAULT:
            return self.channels[0].label
        return "ambiguous(" + "|".join(c.label for c in self.channels) + ")"

    @property
    def channel(self) -> Optional[FaultChannel]:
        return self.channels[0] if self.status == DecisionStatus.FAULT else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.time,
            "decision": self.label,
            "cos_max": self.cos_max,
            "margin": self.margin,
        }


def _cosines(values: np.ndarray, bases: List[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(values, axis=1)
    cos = np.zeros((values.shape[0], len(bases)))
    nonzero = norms > 0.0
    for j, basis in enumerate(bases):
        if basis.shape[1] == 0:
            continue
        projected = np.linalg.norm(values @ basis, axis=1)
        cos[nonzero, j] = projected[nonzero] / norms[nonzero]
    return np.clip(cos, 0.0, 1.0), norms


def angles(trace: ResidualTrace, dictionaries: FaultDictionarySet) -> AngleTrace:
    """
    cos(theta) of every residual against every dictionary subspace

    A zero residual or a zero projection gives cos = 0.
    """
    if trace.dim != dictionaries.residual_dim:
        raise DimensionMismatch(
            f"residual dimension {trace.dim} does not match dictionaries ({dictionaries.residual_dim})"
        )
    cos, norms = _cosines(trace.values, [d.basis.basis for d in dictionaries])
    return AngleTrace(trace.times, tuple(dictionaries.channels), cos, norms)


def decide(
    trace: AngleTrace,
    residual_norm_threshold: float,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> List[Decision]:
    """
    Healthy when ||r_k|| <= threshold, otherwise the argmax channel; channels
    within tie_tol of the best are reported together as Ambiguous
    """
    if residual_norm_threshold < 0 or tie_tol < 0:
        raise ValueError("thresholds must be non-negative")

    decisions = []
    for row, k in enumerate(trace.times):
        if trace.norms[row] <= residual_norm_threshold or len(trace.channels) == 0:
            decisions.append(Decision(int(k), DecisionStatus.HEALTHY))
            continue

        cos = trace.cos[row]
        best = float(np.max(cos))
        tied = [j for j in range(len(cos)) if cos[j] >= best - tie_tol]
        others = [cos[j] for j in range(len(cos)) if j not in tied]
        margin = best - max(others) if others else 0.0
        channels = tuple(trace.channels[j] for j in tied)
        status = DecisionStatus.FAULT if len(tied) == 1 else DecisionStatus.AMBIGUOUS
        decisions.append(Decision(int(k), status, channels, best, float(margin)))
    return decisions


def decisions_frame(trace: AngleTrace, decisions: List[Decision]) -> pd.DataFrame:
    """One row per time step: k, ||r_k||, cos per channel, decision label"""
    frame = trace.to_frame()
    frame["decision"] = [d.label for d in decisions]
    frame["margin"] = [d.margin for d in decisions]
    return frame


class CombinationSearch:
    """
    Direct-sum search over channel subsets by increasing size, then in
    channel order. Bases are cached per subset.
    """

    def __init__(self, dictionaries: FaultDictionarySet, max_faults: int = 2, angle_tol: float = 1e-6):
        if max_faults < 1 or max_faults > len(dictionaries):
            raise ValueError(f"max_faults must be in 1..{len(dictionaries)}, got {max_faults}")
        self.dictionaries = dictionaries
        self.max_faults = max_faults
        self.angle_tol = angle_tol
        self.logger = logging.getLogger(__name__)
        self._subsets: List[Tuple[Tuple[FaultChannel, ...], np.ndarray]] = []
        for size in range(1, max_faults + 1):
            for subset in combinations(dictionaries.channels, size):
                stacked = np.hstack([dictionaries[c].basis.basis for c in subset])
                self._subsets.append((subset, range_basis(stacked, dictionaries.rel_tol).basis))

    def search_residual(self, r: np.ndarray) -> Tuple[FaultChannel, ...]:
        """
        First subset whose direct sum holds r within angle_tol

        Raises:
            CombinationNotFound: for a zero residual or when no subset fits
        """
        r = np.asarray(r, dtype=float).ravel()
        norm = np.linalg.norm(r)
        if norm == 0.0:
            raise CombinationNotFound("zero residual lies in no fault subspace")
        for subset, basis in self._subsets:
            if basis.shape[1] and np.linalg.norm(basis.T @ r) / norm >= 1.0 - self.angle_tol:
                return subset
        raise CombinationNotFound(f"no combination of up to {self.max_faults} channels explains the residual")

    def search_trace(self, trace: ResidualTrace) -> List[Optional[Tuple[FaultChannel, ...]]]:
        results: List[Optional[Tuple[FaultChannel, ...]]] = []
        for row in trace.values:
            try:
                results.append(self.search_residual(row))
            except CombinationNotFound:
                results.append(None)
        found = sum(r is not None for r in results)
        self.logger.info(f"Combination search matched {found}/{len(results)} residuals")
        return results


def combination_search(
    r: np.ndarray,
    dictionaries: FaultDictionarySet,
    max_faults: int = 2,
    angle_tol: float = 1e-6,
) -> Tuple[FaultChannel, ...]:
    """Single-residual form of CombinationSearch"""
    return CombinationSearch(dictionaries, max_faults, angle_tol).search_residual(r)


def search_residual(
    trace: ResidualTrace,
    dictionaries: FaultDictionarySet,
    max_faults: int = 2,
    angle_tol: float = 1e-6,
) -> List[Optional[Tuple[FaultChannel, ...]]]:
    """Combination search at every time step; None where nothing fits"""
    return CombinationSearch(dictionaries, max_faults, angle_tol).search_trace(trace)
