"""
Discernibility Analysis
=======================

Pairwise intersection dimensions of fault dictionaries, computed from the
dictionaries themselves and, when a model is available, from the nullity
formula and the case table for actuator/sensor pairs.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..dictionary.fault_dictionary import FaultDictionarySet
from ..errors import FaultIsolationError, InvalidChannel, TheoremMismatch
from ..kernel.kernel_filter import SCHEMA_VERSION
from ..numlin import (
    DEFAULT_REL_TOL,
    SubspaceBasis,
    nullspace,
    numerical_rank,
    subspace_intersection,
    subspace_intersection_dim,
)
from ..system.constructions import observability_matrix, stacked_fault_map
from ..system.models import FaultChannel, FaultSubsystem, StateSpaceModel
from .zeros import ZeroCount, count_zeros_nullity

logger = logging.getLogger(__name__)


class TheoremCase(Enum):
    ACT_ACT = "actuator_actuator"
    ACT_SEN = "actuator_sensor"
    SEN_SEN_MANY = "sensor_sensor_many_outputs"
    SEN_SEN_TWO = "sensor_sensor_two_outputs"


def classify_pair(c1: FaultChannel, c2: FaultChannel, n_y: int) -> TheoremCase:
    if c1.is_actuator and c2.is_actuator:
        return TheoremCase.ACT_ACT
    if c1.is_actuator or c2.is_actuator:
        return TheoremCase.ACT_SEN
    return TheoremCase.SEN_SEN_TWO if n_y == 2 else TheoremCase.SEN_SEN_MANY


@dataclass(eq=False)
class IntersectionRecord:
    channels: Tuple[FaultChannel, FaultChannel]
    d_cap: int
    theorem_case: TheoremCase
    basis: SubspaceBasis
    formula: Optional[int] = None
    predicted: Optional[int] = None
    fault_directions: Optional[np.ndarray] = None
    notes: List[str] = field(default_factory=list)

    @property
    def indiscernible(self) -> bool:
        return self.d_cap > 0

    @property
    def prediction_matches(self) -> Optional[bool]:
        return None if self.predicted is None else self.predicted == self.d_cap

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pair": [c.label for c in self.channels],
            "d_cap": self.d_cap,
            "theorem_case": self.theorem_case.value,
            "nullity_formula": self.formula,
            "predicted": self.predicted,
            "prediction_matches": self.prediction_matches,
            "indiscernible": self.indiscernible,
            "intersection_basis": self.basis.basis.T.tolist(),
            "fault_directions": None if self.fault_directions is None else self.fault_directions.T.tolist(),
            "notes": self.notes,
        }


@dataclass(eq=False)
class DiscernibilityReport:
    L: int
    records: List[IntersectionRecord]
    dictionary_nullity: Dict[FaultChannel, int]
    zero_counts: Dict[FaultChannel, ZeroCount] = field(default_factory=dict)
    output_observability: Dict[Tuple[int, ...], bool] = field(default_factory=dict)

    def pair(self, c1: FaultChannel, c2: FaultChannel) -> IntersectionRecord:
        for record in self.records:
            if set(record.channels) == {c1, c2}:
                return record
        raise InvalidChannel(f"no record for pair ({c1.label}, {c2.label})")

    def indiscernible_pairs(self) -> List[IntersectionRecord]:
        return [r for r in self.records if r.indiscernible]

    def mismatches(self) -> List[IntersectionRecord]:
        return [r for r in self.records if r.prediction_matches is False]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "L": self.L,
            "pairs": [r.to_dict() for r in self.records],
            "dictionary_nullity": {c.label: v for c, v in self.dictionary_nullity.items()},
            "zero_counts": {c.label: z.to_dict() for c, z in self.zero_counts.items()},
            "output_observability": {
                ",".join(map(str, subset)): ok for subset, ok in self.output_observability.items()
            },
            "indiscernible_pairs": [[c.label for c in r.channels] for r in self.indiscernible_pairs()],
        }

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
        return path


def augment_pair(model: StateSpaceModel, c1: FaultChannel, c2: FaultChannel) -> FaultSubsystem:
    """Two-channel fault subsystem (A, [B1 B2], C, [D1 D2])"""
    if c1 == c2:
        raise InvalidChannel(f"augmented pair needs two different channels, got {c1.label} twice")
    return FaultSubsystem.from_model(model, [c1, c2])


def check_output_observability(
    model: StateSpaceModel, subsets: Sequence[Sequence[int]], rel_tol: float = DEFAULT_REL_TOL
) -> Dict[Tuple[int, ...], bool]:
    """(A, C_I) observability for every listed output subset I"""
    result = {}
    for subset in subsets:
        key = tuple(sorted(subset))
        C = model.C[[i - 1 for i in key]]
        rank = numerical_rank(observability_matrix(model.A, C, max(model.n, 1)), rel_tol).numerical_rank
        result[key] = rank == model.n
    return result


def _nullity(m: np.ndarray, rel_tol: float) -> int:
    return m.shape[1] - numerical_rank(m, rel_tol).numerical_rank


def _pair_formula(model: StateSpaceModel, c1: FaultChannel, c2: FaultChannel, L: int, rel_tol: float) -> int:
    """dim N([O T1 T2]) - dim N([O T1]) - dim N([O T2])"""
    joint = stacked_fault_map(model, L, [c1, c2])
    first = stacked_fault_map(model, L, [c1])
    second = stacked_fault_map(model, L, [c2])
    return _nullity(joint, rel_tol) - _nullity(first, rel_tol) - _nullity(second, rel_tol)


def _predict(
    model: StateSpaceModel,
    c1: FaultChannel,
    c2: FaultChannel,
    case: TheoremCase,
    L: int,
    rel_tol: float,
    observability: Dict[Tuple[int, ...], bool],
    notes: List[str],
) -> Optional[int]:
    if case == TheoremCase.SEN_SEN_MANY:
        return 0
    if case == TheoremCase.SEN_SEN_TWO:
        return model.n

    try:
        if case == TheoremCase.ACT_ACT:
            joint = count_zeros_nullity(model, [c1, c2], L, rel_tol=rel_tol).total
            first = count_zeros_nullity(model, [c1], L, rel_tol=rel_tol).total
            second = count_zeros_nullity(model, [c2], L, rel_tol=rel_tol).total
            return joint - first - second

        actuator, sensor = (c1, c2) if c1.is_actuator else (c2, c1)
        remaining = tuple(i for i in range(1, model.n_y + 1) if i != sensor.index)
        if not remaining:
            notes.append("no outputs remain after removing the sensor")
            return None
        if not observability.get(remaining, True):
            notes.append(f"outputs {remaining} do not observe the state")
            return None
        return count_zeros_nullity(model, [actuator], L, output_subset=remaining, rel_tol=rel_tol).total
    except FaultIsolationError as exc:
        notes.append(f"prediction unavailable: {exc}")
        return None


def intersection_report(
    dictionaries: FaultDictionarySet,
    oracle: Optional[StateSpaceModel] = None,
    L: Optional[int] = None,
    rel_tol: Optional[float] = None,
    strict: bool = True,
) -> DiscernibilityReport:
    """
    Every unordered channel pair: d_cap from the dictionaries, the nullity
    formula and the case-table prediction when an oracle model is given

    Raises:
        TheoremMismatch: if strict and the dictionary side disagrees with the
            nullity formula
    """
    L = L or dictionaries.L
    rel_tol = rel_tol or dictionaries.rel_tol
    n_y = dictionaries.n_y

    observability: Dict[Tuple[int, ...], bool] = {}
    zero_counts: Dict[FaultChannel, ZeroCount] = {}
    if oracle is not None:
        subsets = [tuple(i for i in range(1, n_y + 1) if i != j) for j in range(1, n_y + 1)]
        observability = check_output_observability(oracle, [s for s in subsets if s], rel_tol)
        for subset, ok in observability.items():
            if not ok:
                logger.warning(f"Outputs {subset} do not observe the state; affected predictions are skipped")
        for channel in dictionaries.channels:
            try:
                zero_counts[channel] = count_zeros_nullity(oracle, [channel], L, rel_tol=rel_tol)
            except FaultIsolationError as exc:
                logger.warning(f"Zero count for {channel.label} unavailable: {exc}")

    records = []
    for c1, c2 in combinations(dictionaries.channels, 2):
        D1, D2 = dictionaries[c1].matrix, dictionaries[c2].matrix
        d_cap = subspace_intersection_dim(D1, D2, rel_tol)
        basis = subspace_intersection(D1, D2, rel_tol)
        case = classify_pair(c1, c2, n_y)
        record = IntersectionRecord((c1, c2), d_cap, case, basis)
        if d_cap > 0:
            record.fault_directions = nullspace(np.hstack([D1, -D2]), rel_tol).basis

        if oracle is not None:
            record.formula = _pair_formula(oracle, c1, c2, L, rel_tol)
            if record.formula != d_cap:
                message = (
                    f"pair ({c1.label}, {c2.label}): dictionaries give {d_cap}, "
                    f"nullity formula gives {record.formula}"
                )
                if strict:
                    raise TheoremMismatch(message)
                record.notes.append(message)
                logger.warning(message)
            record.predicted = _predict(oracle, c1, c2, case, L, rel_tol, observability, record.notes)
            if record.prediction_matches is False:
                logger.warning(
                    f"Pair ({c1.label}, {c2.label}) [{case.value}]: predicted {record.predicted}, computed {d_cap}"
                )
        records.append(record)

    report = DiscernibilityReport(
        L=L,
        records=records,
        dictionary_nullity={d.channel: d.nullity for d in dictionaries},
        zero_counts=zero_counts,
        output_observability=observability,
    )
    flagged = ["+".join(c.label for c in r.channels) for r in report.indiscernible_pairs()]
    logger.info(f"Discernibility at L={L}: {len(records)} pairs, indiscernible: {flagged or 'none'}")
    return report


@dataclass(frozen=True, eq=False)
class IndiscerniblePair:
    """
    Two single-fault experiments with identical windowed outputs: channel c1
    driven by f1 from initial state x0, channel c2 driven by f2 from rest
    """

    channels: Tuple[FaultChannel, FaultChannel]
    x0: np.ndarray
    f1: np.ndarray
    f2: np.ndarray


def indiscernible_pair(
    model: StateSpaceModel,
    c1: FaultChannel,
    c2: FaultChannel,
    L: int,
    rel_tol: float = DEFAULT_REL_TOL,
) -> List[IndiscerniblePair]:
    """
    Split each zero-dynamic direction (x0, g1, g2) of the augmented pair into
    experiments with O x0 + T1 g1 = T2 (-g2); directions that leave one
    channel idle are skipped
    """
    subsystem = augment_pair(model, c1, c2)
    basis = nullspace(stacked_fault_map(subsystem, L), rel_tol).basis
    n = model.n
    pairs = []
    for column in basis.T:
        x0 = column[:n]
        windows = column[n:].reshape(L, 2)
        g1, g2 = windows[:, 0], windows[:, 1]
        if np.linalg.norm(g1) < 1e-9 or np.linalg.norm(g2) < 1e-9:
            continue
        pairs.append(IndiscerniblePair((c1, c2), x0, g1, -g2))
    return pairs
