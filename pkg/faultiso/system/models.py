"""
System Models
=============

Innovation-form LTI models, fault channels, fault subsystems and simulated
trajectories.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch, InvalidChannel, InvalidSubset, ModelValidationError
from ..numlin import as_matrix, numerical_rank


class ChannelKind(Enum):
    ACTUATOR = "a"
    SENSOR = "s"


_CHANNEL_PATTERN = re.compile(r"^\s*([as])\s*(\d+)\s*$")


@dataclass(frozen=True)
class FaultChannel:
    """A single additive fault entry point; index is 1-based"""

    kind: ChannelKind
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise InvalidChannel(f"channel index must be >= 1, got {self.index}")

    @property
    def sort_key(self) -> Tuple[int, int]:
        """Actuators before sensors, then by index"""
        return (0 if self.kind == ChannelKind.ACTUATOR else 1, self.index)

    @classmethod
    def actuator(cls, index: int) -> "FaultChannel":
        return cls(ChannelKind.ACTUATOR, index)

    @classmethod
    def sensor(cls, index: int) -> "FaultChannel":
        return cls(ChannelKind.SENSOR, index)

    @classmethod
    def parse(cls, label: str) -> "FaultChannel":
        """Parse labels such as 'a1' or 's3'"""
        match = _CHANNEL_PATTERN.match(str(label).lower())
        if not match:
            raise InvalidChannel(f"cannot parse fault channel '{label}'")
        return cls(ChannelKind(match.group(1)), int(match.group(2)))

    @property
    def label(self) -> str:
        return f"{self.kind.value}{self.index}"

    @property
    def is_actuator(self) -> bool:
        return self.kind == ChannelKind.ACTUATOR

    def validate(self, n_u: int, n_y: int) -> None:
        limit = n_u if self.is_actuator else n_y
        if self.index > limit:
            raise InvalidChannel(
                f"channel {self.label} exceeds the available {'inputs' if self.is_actuator else 'outputs'} ({limit})"
            )

    def __str__(self):
        return self.label


def all_channels(n_u: int, n_y: int) -> List[FaultChannel]:
    """Every actuator channel followed by every sensor channel"""
    return [FaultChannel.actuator(i) for i in range(1, n_u + 1)] + [
        FaultChannel.sensor(j) for j in range(1, n_y + 1)
    ]


def normalize_output_subset(output_subset: Optional[Sequence[int]], n_y: int) -> Optional[Tuple[int, ...]]:
    """Validate a 1-based output subset and return it sorted"""
    if output_subset is None:
        return None
    subset = tuple(sorted(int(i) for i in output_subset))
    if not subset:
        raise InvalidSubset("output subset must not be empty")
    if len(set(subset)) != len(subset):
        raise InvalidSubset(f"output subset {subset} has duplicates")
    if subset[0] < 1 or subset[-1] > n_y:
        raise InvalidSubset(f"output subset {subset} is outside 1..{n_y}")
    return subset


@dataclass(eq=False)
class StateSpaceModel:
    """
    Innovation-form model

        x_{k+1} = A x_k + B_u u_k + K e_k
        y_k     = C x_k + D_u u_k + e_k,    e_k ~ N(0, Sigma_e)
    """

    A: np.ndarray
    B_u: np.ndarray
    C: np.ndarray
    D_u: np.ndarray
    K: Optional[np.ndarray] = None
    Sigma_e: Optional[np.ndarray] = None
    name: str = "model"
    check_observability: bool = True

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {self.A.shape}")

        self.C = _shaped(self.C, (None, n), "C")
        n_y = self.C.shape[0]
        self.D_u = as_matrix(self.D_u, "D_u")
        n_u = self.D_u.shape[1]
        if self.D_u.shape[0] != n_y:
            raise DimensionMismatch(f"D_u has {self.D_u.shape[0]} rows, C has {n_y}")
        self.B_u = _shaped(self.B_u, (n, n_u), "B_u")
        self.K = np.zeros((n, n_y)) if self.K is None else _shaped(self.K, (n, n_y), "K")
        self.Sigma_e = (
            np.zeros((n_y, n_y)) if self.Sigma_e is None else _shaped(self.Sigma_e, (n_y, n_y), "Sigma_e")
        )
        self._validate_covariance()
        if self.check_observability:
            self._validate_observability()

    def _validate_covariance(self):
        if not np.allclose(self.Sigma_e, self.Sigma_e.T, atol=1e-12, rtol=0.0):
            raise ModelValidationError("Sigma_e is not symmetric")
        if self.n_y and np.min(np.linalg.eigvalsh(self.Sigma_e)) < -1e-12:
            raise ModelValidationError("Sigma_e is not positive semidefinite")

    def _validate_observability(self):
        if self.n == 0:
            return
        blocks, power = [], np.eye(self.n)
        for _ in range(self.n):
            blocks.append(self.C @ power)
            power = power @ self.A
        rank = numerical_rank(np.vstack(blocks)).numerical_rank
        if rank < self.n:
            raise ModelValidationError(f"(A, C) is not observable: rank {rank} < n = {self.n}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B_u.shape[1]

    @property
    def n_y(self) -> int:
        return self.C.shape[0]

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.A)))) if self.n else 0.0

    def channels(self) -> List[FaultChannel]:
        return all_channels(self.n_u, self.n_y)

    def fault_matrices(self, channels: Sequence[FaultChannel]) -> Tuple[np.ndarray, np.ndarray]:
        """
        (B_f, D_f) for a channel list: an actuator contributes the matching
        columns of (B_u, D_u), a sensor contributes (0, e_j)
        """
        b_cols, d_cols = [], []
        for channel in channels:
            channel.validate(self.n_u, self.n_y)
            if channel.is_actuator:
                b_cols.append(self.B_u[:, channel.index - 1])
                d_cols.append(self.D_u[:, channel.index - 1])
            else:
                b_cols.append(np.zeros(self.n))
                d_cols.append(np.eye(self.n_y)[:, channel.index - 1])
        n_f = len(b_cols)
        b_f = np.column_stack(b_cols) if n_f else np.zeros((self.n, 0))
        d_f = np.column_stack(d_cols) if n_f else np.zeros((self.n_y, 0))
        return b_f.reshape(self.n, n_f), d_f.reshape(self.n_y, n_f)

    def restrict_outputs(self, output_subset: Sequence[int]) -> "StateSpaceModel":
        """Model seeing only the listed outputs (1-based); observability is not enforced"""
        rows = [i - 1 for i in normalize_output_subset(output_subset, self.n_y)]
        return StateSpaceModel(
            A=self.A,
            B_u=self.B_u,
            C=self.C[rows],
            D_u=self.D_u[rows],
            K=self.K[:, rows],
            Sigma_e=self.Sigma_e[np.ix_(rows, rows)],
            name=f"{self.name}[outputs {','.join(str(i + 1) for i in rows)}]",
            check_observability=False,
        )

    def with_noise_scale(self, alpha: float) -> "StateSpaceModel":
        """Copy with Sigma_e multiplied by alpha"""
        return StateSpaceModel(
            A=self.A,
            B_u=self.B_u,
            C=self.C,
            D_u=self.D_u,
            K=self.K,
            Sigma_e=self.Sigma_e * float(alpha),
            name=self.name,
            check_observability=False,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "A": self.A.tolist(),
            "B_u": self.B_u.tolist(),
            "C": self.C.tolist(),
            "D_u": self.D_u.tolist(),
            "K": self.K.tolist(),
            "Sigma_e": self.Sigma_e.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StateSpaceModel":
        return cls(
            A=np.array(data["A"], dtype=float),
            B_u=np.array(data["B_u"], dtype=float),
            C=np.array(data["C"], dtype=float),
            D_u=np.array(data["D_u"], dtype=float),
            K=None if data.get("K") is None else np.array(data["K"], dtype=float),
            Sigma_e=None if data.get("Sigma_e") is None else np.array(data["Sigma_e"], dtype=float),
            name=data.get("name", "model"),
        )


def _shaped(m, shape, name: str) -> np.ndarray:
    rows, cols = shape
    arr = as_matrix(m, name)
    if (rows is not None and arr.shape[0] != rows) or (cols is not None and arr.shape[1] != cols):
        raise DimensionMismatch(f"{name} has shape {arr.shape}, expected {shape}")
    return arr


@dataclass(eq=False)
class FaultSubsystem:
    """The (A, B_f, C, D_f) system seen by a set of fault channels"""

    A: np.ndarray
    B_f: np.ndarray
    C: np.ndarray
    D_f: np.ndarray
    channels: Tuple[FaultChannel, ...] = ()
    output_subset: Optional[Tuple[int, ...]] = None

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_f(self) -> int:
        return self.B_f.shape[1]

    @property
    def n_y(self) -> int:
        return self.C.shape[0]

    @property
    def label(self) -> str:
        outputs = "all" if self.output_subset is None else ",".join(map(str, self.output_subset))
        return f"{'+'.join(c.label for c in self.channels) or 'faults'} -> outputs {outputs}"

    @classmethod
    def from_model(
        cls,
        model: StateSpaceModel,
        channels: Sequence[FaultChannel],
        output_subset: Optional[Sequence[int]] = None,
    ) -> "FaultSubsystem":
        subset = normalize_output_subset(output_subset, model.n_y)
        b_f, d_f = model.fault_matrices(channels)
        c, d = model.C, d_f
        if subset is not None:
            rows = [i - 1 for i in subset]
            c, d = c[rows], d[rows]
        return cls(model.A, b_f, c, d, tuple(channels), subset)


@dataclass(eq=False)
class TrajectoryData:
    """Time-indexed records of one simulated or loaded experiment"""

    u: np.ndarray
    y: np.ndarray
    f: Optional[np.ndarray] = None
    active: Optional[List[Optional[FaultChannel]]] = None
    e: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        self.u = as_matrix(self.u, "u")
        self.y = as_matrix(self.y, "y")
        T = self.sample_count
        if self.u.shape[0] != T:
            raise DimensionMismatch(f"u has {self.u.shape[0]} samples, y has {T}")
        for name in ("f", "e", "x"):
            value = getattr(self, name)
            if value is not None:
                value = as_matrix(value, name)
                if value.shape[0] != T:
                    raise DimensionMismatch(f"{name} has {value.shape[0]} samples, expected {T}")
                setattr(self, name, value)
        if self.active is not None and len(self.active) != T:
            raise DimensionMismatch(f"active has {len(self.active)} entries, expected {T}")

    @property
    def sample_count(self) -> int:
        return self.y.shape[0]

    @property
    def n_u(self) -> int:
        return self.u.shape[1]

    @property
    def n_y(self) -> int:
        return self.y.shape[1]

    def active_labels(self) -> List[str]:
        if self.active is None:
            return ["healthy"] * self.sample_count
        return [c.label if c is not None else "healthy" for c in self.active]

    def slice(self, start: int, stop: int) -> "TrajectoryData":
        def cut(m):
            return None if m is None else m[start:stop]

        return TrajectoryData(
            u=self.u[start:stop],
            y=self.y[start:stop],
            f=cut(self.f),
            active=None if self.active is None else self.active[start:stop],
            e=cut(self.e),
            x=cut(self.x),
            x0=None if self.x is None else self.x[start],
        )
