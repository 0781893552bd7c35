"""
Fault Dictionaries
==================

Per-channel fault signatures and their images under K^y_L. A fault on
channel c drives the residual into the column space of its dictionary.
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Union

import numpy as np

from ..errors import DimensionMismatch, InvalidChannel
from ..kernel.kernel_filter import SCHEMA_VERSION, KernelFilter
from ..numlin import DEFAULT_REL_TOL, SubspaceBasis, numerical_rank, range_basis
from ..system.constructions import ChannelSet, toeplitz
from ..system.models import ChannelKind, FaultChannel, StateSpaceModel, all_channels

logger = logging.getLogger(__name__)


class SignatureSource(Enum):
    DATA_DRIVEN = "data"
    ORACLE = "oracle"


def column_selection(kind: ChannelKind, i: int, L: int, n_u: int, n_y: int) -> List[int]:
    """
    0-based columns {(i-1) + t*width : t = 0..L-1} of the block Toeplitz
    matrix that belong to channel i; width is n_u for actuators, n_y for sensors
    """
    width = n_u if kind == ChannelKind.ACTUATOR else n_y
    if i < 1 or i > width:
        raise InvalidChannel(f"channel index {i} is outside 1..{width}")
    return [(i - 1) + t * width for t in range(L)]


@dataclass(frozen=True, eq=False)
class FaultSignature:
    """(L*n_y) x L Toeplitz columns through which channel faults enter y_{k,L}"""

    channel: FaultChannel
    matrix: np.ndarray
    source: SignatureSource


def build_signatures(
    kernel: KernelFilter,
    source: SignatureSource = SignatureSource.DATA_DRIVEN,
    model: Optional[StateSpaceModel] = None,
    channels: Optional[Sequence[FaultChannel]] = None,
) -> List[FaultSignature]:
    """
    One signature per channel

    Data-driven actuator signatures select columns of L21 when there is a
    single input, and of L21 L11^{-1} otherwise, so that each column
    belongs to exactly one input. Sensor signatures are identity columns.
    """
    L, n_u, n_y = kernel.L, kernel.n_u, kernel.n_y
    if source == SignatureSource.ORACLE:
        if model is None:
            raise ValueError("oracle signatures need a model")
        if (model.n_u, model.n_y) != (n_u, n_y):
            raise DimensionMismatch("model and filter dimensions differ")
        input_block = toeplitz(model, ChannelSet.inputs(), L)
    else:
        input_block = kernel.L21 if n_u == 1 else kernel.input_toeplitz()

    identity = np.eye(L * n_y)
    signatures = []
    for channel in channels or all_channels(n_u, n_y):
        channel.validate(n_u, n_y)
        cols = column_selection(channel.kind, channel.index, L, n_u, n_y)
        block = input_block if channel.is_actuator else identity
        signatures.append(FaultSignature(channel, block[:, cols].copy(), source))
    return signatures


@dataclass(frozen=True, eq=False)
class FaultDictionary:
    channel: FaultChannel
    matrix: np.ndarray
    basis: SubspaceBasis

    @property
    def rank(self) -> int:
        return self.basis.dim

    @property
    def nullity(self) -> int:
        """L - rank, the zero count of [O_L T^c_L] for this channel"""
        return self.matrix.shape[1] - self.rank


class FaultDictionarySet:
    """Dictionaries keyed by channel, iterated in actuator-then-sensor order"""

    def __init__(self, dictionaries: Sequence[FaultDictionary], L: int, n_u: int, n_y: int, rel_tol: float):
        self.L = L
        self.n_u = n_u
        self.n_y = n_y
        self.rel_tol = rel_tol
        ordered = sorted(dictionaries, key=lambda d: d.channel.sort_key)
        self._dictionaries: Dict[FaultChannel, FaultDictionary] = {d.channel: d for d in ordered}
        dims = {d.matrix.shape[0] for d in ordered}
        if len(dims) > 1:
            raise DimensionMismatch(f"dictionaries disagree on the residual dimension: {sorted(dims)}")
        self.residual_dim = dims.pop() if dims else 0

    @property
    def channels(self) -> List[FaultChannel]:
        return list(self._dictionaries)

    def __getitem__(self, channel: FaultChannel) -> FaultDictionary:
        if channel not in self._dictionaries:
            raise InvalidChannel(f"no dictionary for channel {channel.label}")
        return self._dictionaries[channel]

    def __iter__(self) -> Iterator[FaultDictionary]:
        return iter(self._dictionaries.values())

    def __len__(self):
        return len(self._dictionaries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "L": self.L,
            "n_u": self.n_u,
            "n_y": self.n_y,
            "rel_tol": self.rel_tol,
            "dictionaries": [
                {
                    "channel": d.channel.label,
                    "rank": d.rank,
                    "matrix": d.matrix.tolist(),
                    "basis": d.basis.to_dict(),
                }
                for d in self
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FaultDictionarySet":
        entries = []
        for item in data["dictionaries"]:
            basis = SubspaceBasis.from_dict(item["basis"])
            matrix = np.array(item["matrix"], dtype=float).reshape(basis.ambient_dim, -1)
            entries.append(FaultDictionary(FaultChannel.parse(item["channel"]), matrix, basis))
        return cls(entries, int(data["L"]), int(data["n_u"]), int(data["n_y"]), float(data["rel_tol"]))


def build_dictionaries(
    kernel: KernelFilter,
    signatures: Sequence[FaultSignature],
    rel_tol: float = DEFAULT_REL_TOL,
) -> FaultDictionarySet:
    """D^c_L = K^y_L T^c_L with an orthonormal basis of its range"""
    dictionaries = []
    for signature in signatures:
        if signature.matrix.shape[0] != kernel.K_y.shape[1]:
            raise DimensionMismatch(
                f"signature {signature.channel.label} has {signature.matrix.shape[0]} rows, "
                f"K_y has {kernel.K_y.shape[1]} columns"
            )
        matrix = kernel.K_y @ signature.matrix
        basis = range_basis(matrix, rel_tol)
        dictionaries.append(FaultDictionary(signature.channel, matrix, basis))
        logger.debug(f"Dictionary {signature.channel.label}: shape {matrix.shape}, rank {basis.dim}")

    result = FaultDictionarySet(dictionaries, kernel.L, kernel.n_u, kernel.n_y, rel_tol)
    logger.info(
        f"Built {len(result)} fault dictionaries: "
        + ", ".join(f"{d.channel.label}(rank {d.rank})" for d in result)
    )
    return result


def signature_rank_law(kernel: KernelFilter, signature: FaultSignature, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """rank(K_y P) for a signature P"""
    return numerical_rank(kernel.K_y @ signature.matrix, rel_tol).numerical_rank


def save_dictionaries(dictionaries: FaultDictionarySet, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(dictionaries.to_dict(), f, indent=2)
    return path


def load_dictionaries(path: Union[str, Path]) -> FaultDictionarySet:
    with open(path, "r", encoding="utf-8") as f:
        return FaultDictionarySet.from_dict(json.load(f))
