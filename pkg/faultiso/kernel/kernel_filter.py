"""
Kernel Filter Estimation
========================

Estimates the kernel representation K_L = [K^u_L, K^y_L] that annihilates
every healthy windowed input/output trajectory, together with the learned
ranges of the input Toeplitz matrix and of the extended observability
matrix. Also provides the model-based kernel used for nominal dictionaries.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import scipy.linalg

from ..data.hankel import hankel
from ..errors import DimensionMismatch, EmptyParitySpace, NotPersistentlyExciting, WindowTooLong
from ..numlin import (
    DEFAULT_REL_TOL,
    SubspaceBasis,
    gap_rank,
    left_nullspace,
    lq_decompose,
    numerical_rank,
    range_basis,
)
from ..system.constructions import ChannelSet, extended_observability, toeplitz
from ..system.models import StateSpaceModel

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class RankPolicyKind(Enum):
    FIXED_ORDER = "fixed_order"
    GAP = "gap"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class RankPolicy:
    """How the system order is read off the singular values of L22"""

    kind: RankPolicyKind = RankPolicyKind.GAP
    order: Optional[int] = None
    gap_factor: float = 10.0
    rel_tol: float = DEFAULT_REL_TOL

    @classmethod
    def fixed_order(cls, order: int) -> "RankPolicy":
        return cls(RankPolicyKind.FIXED_ORDER, order=int(order))

    @classmethod
    def gap(cls, gap_factor: float = 10.0) -> "RankPolicy":
        return cls(RankPolicyKind.GAP, gap_factor=gap_factor)

    @classmethod
    def threshold(cls, rel_tol: float) -> "RankPolicy":
        return cls(RankPolicyKind.THRESHOLD, rel_tol=rel_tol)

    def estimate_order(self, singular_values: np.ndarray) -> int:
        if self.kind == RankPolicyKind.FIXED_ORDER:
            return int(self.order)
        if self.kind == RankPolicyKind.GAP:
            return gap_rank(singular_values, self.gap_factor)
        s = np.asarray(singular_values)
        if len(s) == 0 or s[0] == 0.0:
            return 0
        return int(np.sum(s > self.rel_tol * s[0]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "order": self.order,
            "gap_factor": self.gap_factor,
            "rel_tol": self.rel_tol,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RankPolicy":
        return cls(
            RankPolicyKind(data.get("kind", "gap")),
            order=data.get("order"),
            gap_factor=float(data.get("gap_factor", 10.0)),
            rel_tol=float(data.get("rel_tol", DEFAULT_REL_TOL)),
        )


@dataclass(eq=False)
class KernelFilter:
    """
    Residual generator r_k = K_u u_{k,L} + K_y y_{k,L}

    Rows of [K_u K_y] are orthonormal. L11 and L21 are the input blocks of
    the LQ factor (identity and T^u_L for a model-based filter).
    """

    L: int
    n_u: int
    n_y: int
    K_u: np.ndarray
    K_y: np.ndarray
    estimated_n: int
    L11: np.ndarray
    L21: np.ndarray
    L21_basis: SubspaceBasis
    L22_basis: SubspaceBasis
    order_singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rank_policy: RankPolicy = field(default_factory=RankPolicy)
    source: str = "data"

    @property
    def r(self) -> int:
        return self.K_y.shape[0]

    @property
    def K(self) -> np.ndarray:
        return np.hstack([self.K_u, self.K_y])

    def input_toeplitz(self) -> np.ndarray:
        """Estimate of T^u_L recovered as L21 L11^{-1}"""
        return scipy.linalg.solve(self.L11.T, self.L21.T).T

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "source": self.source,
            "L": self.L,
            "n_u": self.n_u,
            "n_y": self.n_y,
            "estimated_n": self.estimated_n,
            "r": self.r,
            "rank_policy": self.rank_policy.to_dict(),
            "K_u": self.K_u.tolist(),
            "K_y": self.K_y.tolist(),
            "L11": self.L11.tolist(),
            "L21": self.L21.tolist(),
            "L21_basis": self.L21_basis.to_dict(),
            "L22_basis": self.L22_basis.to_dict(),
            "order_singular_values": self.order_singular_values.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KernelFilter":
        L, n_u, n_y = int(data["L"]), int(data["n_u"]), int(data["n_y"])
        r = int(data["r"])
        return cls(
            L=L,
            n_u=n_u,
            n_y=n_y,
            K_u=np.array(data["K_u"], dtype=float).reshape(r, L * n_u),
            K_y=np.array(data["K_y"], dtype=float).reshape(r, L * n_y),
            estimated_n=int(data["estimated_n"]),
            L11=np.array(data["L11"], dtype=float).reshape(L * n_u, L * n_u),
            L21=np.array(data["L21"], dtype=float).reshape(L * n_y, L * n_u),
            L21_basis=SubspaceBasis.from_dict(data["L21_basis"]),
            L22_basis=SubspaceBasis.from_dict(data["L22_basis"]),
            order_singular_values=np.array(data.get("order_singular_values", []), dtype=float),
            rank_policy=RankPolicy.from_dict(data.get("rank_policy", {})),
            source=data.get("source", "data"),
        )


@dataclass(frozen=True, eq=False)
class ResidualTrace:
    """Residual vectors r_k indexed by window start"""

    times: np.ndarray
    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class ParityReport:
    observability_residual: float
    input_residual: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "max_abs_Ky_O": self.observability_residual,
            "max_abs_Ku_plus_Ky_Tu": self.input_residual,
        }


def _check_dims(u: np.ndarray, y: np.ndarray):
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    u = u.reshape(-1, 1) if u.ndim == 1 else u
    y = y.reshape(-1, 1) if y.ndim == 1 else y
    if u.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"u has {u.shape[0]} samples, y has {y.shape[0]}")
    return u, y


def _refine_input_block(u, y, L, past, rel_tol, L11):
    """
    Regress future outputs on future inputs and past data; the coefficient of
    the future inputs is T^u_L. Returns None when the data are too short.
    """
    n_u, n_y = u.shape[1], y.shape[1]
    T = u.shape[0]
    columns = T - past - L + 1
    rows = L * n_u + past * (n_u + n_y)
    if past < 1 or columns < rows + 1:
        return None

    U = hankel(u, past + L).matrix
    Y = hankel(y, past + L).matrix
    u_past, u_future = U[: past * n_u], U[past * n_u:]
    y_past, y_future = Y[: past * n_y], Y[past * n_y:]
    regressors = np.vstack([u_future, u_past, y_past])

    coef, _, _, _ = scipy.linalg.lstsq(regressors.T, y_future.T, cond=rel_tol)
    T_u = coef.T[:, : L * n_u]
    return T_u @ L11


def estimate_kernel(
    u,
    y,
    L: int,
    rank_policy: Optional[RankPolicy] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    instrument: bool = True,
    past_horizon: Optional[int] = None,
) -> KernelFilter:
    """
    Estimate the kernel filter from healthy data

    The stacked Hankel matrix [U; Y] is LQ-factored; the system order is read
    from the singular values of L22 under rank_policy and K is taken as the
    trailing left singular vectors of the LQ factor, so that K [U; Y] ~ 0.

    Args:
        u, y: T x n_u input and T x n_y output samples
        L: window length
        rank_policy: order estimation policy (gap heuristic by default)
        rel_tol: relative threshold for the persistent-excitation check
        instrument: refine L21 with a past-data regression
        past_horizon: past window for the refinement, defaults to L

    Raises:
        WindowTooLong, NotPersistentlyExciting, OrderAmbiguous, EmptyParitySpace
    """
    u, y = _check_dims(u, y)
    rank_policy = rank_policy or RankPolicy.gap()
    n_u, n_y = u.shape[1], y.shape[1]
    T = u.shape[0]
    if L > T:
        raise WindowTooLong(f"window length {L} exceeds the {T} healthy samples")

    p, q = L * n_u, L * n_y
    U = hankel(u, L).matrix
    Y = hankel(y, L).matrix
    depth = U.shape[1]
    if depth < p:
        raise NotPersistentlyExciting(f"only {depth} windows for {p} input rows")

    stacked = np.vstack([U, Y]) / np.sqrt(depth)
    factor, _ = lq_decompose(stacked)
    L11 = factor[:p, :p]
    L21 = factor[p:, :p]
    L22 = factor[p:, p:]

    l11_rank = numerical_rank(L11, rel_tol).numerical_rank
    if l11_rank < p:
        raise NotPersistentlyExciting(
            f"input block L11 has rank {l11_rank} < {p}; the input is not persistently exciting of order {L}"
        )

    u22, s22, _ = scipy.linalg.svd(L22, full_matrices=True) if L22.size else (np.eye(q), np.zeros(0), None)
    estimated_n = rank_policy.estimate_order(s22)
    r = q - estimated_n
    if r <= 0:
        logger.warning(f"Window L={L} leaves no parity space (L*n_y={q}, order {estimated_n})")
        raise EmptyParitySpace(f"L*n_y - n = {q} - {estimated_n} = {r}; increase L")

    u_full, _, _ = scipy.linalg.svd(factor, full_matrices=True)
    K = u_full[:, p + estimated_n:].T
    K_u, K_y = K[:, :p], K[:, p:]

    if instrument:
        refined = _refine_input_block(u, y, L, past_horizon or L, rel_tol, L11)
        if refined is None:
            logger.warning("Too few samples for the input-range refinement; using the raw LQ block")
        else:
            L21 = refined

    l22_basis = SubspaceBasis(q, u22[:, :estimated_n].copy())
    l21_basis = range_basis(L21, rel_tol)
    logger.info(
        f"Estimated kernel filter: L={L}, order={estimated_n}, residual dimension r={r}, "
        f"policy={rank_policy.kind.value}"
    )
    return KernelFilter(
        L=L,
        n_u=n_u,
        n_y=n_y,
        K_u=K_u,
        K_y=K_y,
        estimated_n=estimated_n,
        L11=L11,
        L21=L21,
        L21_basis=l21_basis,
        L22_basis=l22_basis,
        order_singular_values=s22,
        rank_policy=rank_policy,
        source="data",
    )


def nominal_kernel(model: StateSpaceModel, L: int, rel_tol: float = DEFAULT_REL_TOL) -> KernelFilter:
    """
    Model-based kernel: orthonormal left nullspace of [[I, 0], [T^u_L, O_L]]
    """
    O = extended_observability(model, L)
    T_u = toeplitz(model, ChannelSet.inputs(), L)
    p, q = L * model.n_u, L * model.n_y
    G = np.block([[np.eye(p), np.zeros((p, model.n))], [T_u, O]])

    N = left_nullspace(G, rel_tol).basis.T
    if N.shape[0] == 0:
        raise EmptyParitySpace(f"L*n_y - n = {q - model.n}; increase L")

    logger.info(f"Nominal kernel filter for {model.name}: L={L}, r={N.shape[0]}")
    return KernelFilter(
        L=L,
        n_u=model.n_u,
        n_y=model.n_y,
        K_u=N[:, :p],
        K_y=N[:, p:],
        estimated_n=model.n,
        L11=np.eye(p),
        L21=T_u,
        L21_basis=range_basis(T_u, rel_tol),
        L22_basis=range_basis(O, rel_tol),
        rank_policy=RankPolicy.fixed_order(model.n),
        source="nominal",
    )


def residual(kernel: KernelFilter, u, y) -> ResidualTrace:
    """Residuals for every window start k = 0 .. T-L"""
    u, y = _check_dims(u, y)
    if u.shape[1] != kernel.n_u or y.shape[1] != kernel.n_y:
        raise DimensionMismatch(
            f"data has (n_u, n_y) = ({u.shape[1]}, {y.shape[1]}), filter expects ({kernel.n_u}, {kernel.n_y})"
        )
    U = hankel(u, kernel.L).matrix
    Y = hankel(y, kernel.L).matrix
    values = (kernel.K_u @ U + kernel.K_y @ Y).T
    return ResidualTrace(np.arange(values.shape[0]), values)


def parity_check(kernel: KernelFilter, model: StateSpaceModel) -> ParityReport:
    """Max |K_y O_L| and max |K_u + K_y T^u_L| against a model"""
    if (model.n_u, model.n_y) != (kernel.n_u, kernel.n_y):
        raise DimensionMismatch("model and filter dimensions differ")
    O = extended_observability(model, kernel.L)
    T_u = toeplitz(model, ChannelSet.inputs(), kernel.L)
    return ParityReport(
        observability_residual=float(np.max(np.abs(kernel.K_y @ O))) if O.size else 0.0,
        input_residual=float(np.max(np.abs(kernel.K_u + kernel.K_y @ T_u))),
    )


def save_filter(kernel: KernelFilter, path: Union[str, Path], threshold: Optional[float] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = kernel.to_dict()
    document["residual_threshold"] = threshold
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)
    return path


def load_filter(path: Union[str, Path]) -> KernelFilter:
    with open(path, "r", encoding="utf-8") as f:
        return KernelFilter.from_dict(json.load(f))


def load_threshold(path: Union[str, Path]) -> Optional[float]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f).get("residual_threshold")
