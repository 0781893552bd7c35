"""
Transmission Zeros
==================

Zero counting through the nullity of [O_L T^f_L], the minimal inversion
delay, zero-dynamic input directions and an independent Rosenbrock-pencil
oracle.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from ..dictionary.fault_dictionary import SignatureSource, build_signatures
from ..errors import (
    HorizonTooShort,
    NotLeftInvertible,
    NumericallyIllConditioned,
    RankToleranceAmbiguous,
    ZeroDynamicsViolation,
)
from ..kernel.kernel_filter import KernelFilter, nominal_kernel
from ..numlin import DEFAULT_REL_TOL, RankDecision, nullspace, numerical_rank
from ..system.constructions import subsystem_observability, subsystem_toeplitz
from ..system.models import FaultChannel, FaultSubsystem, StateSpaceModel

logger = logging.getLogger(__name__)

# Relative sigma_min/sigma_max of the Rosenbrock matrix at a candidate zero
ZERO_CONFIRM_TOL = 1e-7
ZERO_REJECT_TOL = 1e-4
ZERO_CLUSTER_GAP = 1e-6
LARGE_ZERO = 1e6


@dataclass(frozen=True, eq=False)
class ZeroCount:
    finite: int
    infinite: int
    horizon_used: Optional[int] = None
    minimal_delay: Optional[int] = None
    locations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    @property
    def total(self) -> int:
        return self.finite + self.infinite

    def to_dict(self) -> Dict[str, Any]:
        return {
            "finite": self.finite,
            "infinite": self.infinite,
            "total": self.total,
            "horizon_used": self.horizon_used,
            "minimal_delay": self.minimal_delay,
            "locations": [[float(z.real), float(z.imag)] for z in self.locations],
        }


@dataclass(frozen=True, eq=False)
class ZeroDynamicBasis:
    """Columns (x0, f0) with O_L x0 + T^f_L f0 = 0; x0 is None on the data side"""

    x0: Optional[np.ndarray]
    f0: np.ndarray

    @property
    def dim(self) -> int:
        return self.f0.shape[1]


Source = Union[StateSpaceModel, FaultSubsystem, KernelFilter]


def _subsystem(source, fault_channels, output_subset) -> FaultSubsystem:
    if isinstance(source, FaultSubsystem):
        return source
    return FaultSubsystem.from_model(source, fault_channels, output_subset)


def _rank(m: np.ndarray, rel_tol: float, what: str) -> RankDecision:
    decision = numerical_rank(m, rel_tol)
    if not decision.is_clear():
        raise RankToleranceAmbiguous(
            f"no clear singular-value gap around rel_tol={rel_tol} for {what}: "
            f"{np.array2string(decision.singular_values, precision=3)}"
        )
    return decision


def _rosenbrock(subsystem: FaultSubsystem, z: complex) -> np.ndarray:
    n = subsystem.n
    return np.block(
        [
            [subsystem.A - z * np.eye(n), subsystem.B_f],
            [subsystem.C, subsystem.D_f],
        ]
    ).astype(complex)


def _relative_sigma_min(matrix: np.ndarray, columns: int) -> float:
    s = scipy.linalg.svd(matrix, compute_uv=False)
    if len(s) < columns or s[0] == 0.0:
        return 0.0
    return float(s[columns - 1] / s[0])


def minimal_delay(
    source: Union[StateSpaceModel, FaultSubsystem],
    fault_channels: Optional[Sequence[FaultChannel]] = None,
    L_max: Optional[int] = None,
    output_subset: Optional[Sequence[int]] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    seed: int = 0,
) -> int:
    """
    Smallest tau with rank T_{tau+1} - rank T_tau = n_f

    The normal rank of the Rosenbrock matrix is first evaluated at a random
    point of the annulus 0.5 <= |z| <= 2 (two retries).

    Raises:
        NotLeftInvertible: when the fault subsystem cannot be inverted
        HorizonTooShort: when L_max stops the scan before tau is found
    """
    subsystem = _subsystem(source, fault_channels, output_subset)
    n, n_f = subsystem.n, subsystem.n_f
    if n_f == 0:
        return 0
    if subsystem.n_y < n_f:
        raise NotLeftInvertible(f"{n_f} fault channels but only {subsystem.n_y} outputs")

    rng = np.random.default_rng(seed)
    full = False
    for _ in range(3):
        z = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        if _relative_sigma_min(_rosenbrock(subsystem, z), n + n_f) > rel_tol:
            full = True
            break
    if not full:
        raise NotLeftInvertible(f"Rosenbrock matrix of {subsystem.label} is column-rank deficient")

    limit = L_max if L_max is not None else n + 1
    previous = 0
    for k in range(limit + 1):
        current = numerical_rank(subsystem_toeplitz(subsystem, k + 1), rel_tol).numerical_rank
        if current - previous == n_f:
            return k
        previous = current
    if limit >= n:
        raise NotLeftInvertible(f"no inversion delay up to {limit} for {subsystem.label}")
    raise HorizonTooShort(f"inversion delay exceeds L_max={limit}")


def count_zeros_nullity(
    source: Source,
    fault_channels: Optional[Sequence[FaultChannel]] = None,
    L: int = 1,
    output_subset: Optional[Sequence[int]] = None,
    rel_tol: float = DEFAULT_REL_TOL,
) -> ZeroCount:
    """
    zeta = dim N([O_L T^f_L]) and zeta_inf = dim N(T^f_L)

    With a KernelFilter the count uses only learned quantities:
    zeta = L n_f - rank(K_y S) and zeta_inf = L n_f - rank(S) for the stacked
    data-driven signatures S.

    Raises:
        HorizonTooShort: if L < max(tau, n)
        RankToleranceAmbiguous: if a rank decision has no clear gap
    """
    if isinstance(source, KernelFilter):
        channels = list(fault_channels or [])
        signatures = build_signatures(source, SignatureSource.DATA_DRIVEN, channels=channels)
        S = np.hstack([s.matrix for s in signatures])
        total = S.shape[1] - _rank(source.K_y @ S, rel_tol, "K_y S").numerical_rank
        infinite = S.shape[1] - _rank(S, rel_tol, "S").numerical_rank
        return ZeroCount(finite=total - infinite, infinite=infinite, horizon_used=source.L)

    subsystem = _subsystem(source, fault_channels, output_subset)
    tau = minimal_delay(subsystem, L_max=max(L, subsystem.n + 1), rel_tol=rel_tol)
    if L < max(tau, subsystem.n):
        raise HorizonTooShort(f"L={L} is below max(tau={tau}, n={subsystem.n})")

    O = subsystem_observability(subsystem, L)
    T_f = subsystem_toeplitz(subsystem, L)
    stacked = np.hstack([O, T_f])
    total = stacked.shape[1] - _rank(stacked, rel_tol, "[O T]").numerical_rank
    infinite = T_f.shape[1] - _rank(T_f, rel_tol, "T").numerical_rank
    logger.debug(f"Zero count for {subsystem.label} at L={L}: total {total}, infinite {infinite}")
    return ZeroCount(finite=total - infinite, infinite=infinite, horizon_used=L, minimal_delay=tau)


def zero_dynamic_inputs(
    source: Source,
    fault_channels: Optional[Sequence[FaultChannel]] = None,
    L: int = 1,
    output_subset: Optional[Sequence[int]] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    check_tol: float = 1e-8,
) -> ZeroDynamicBasis:
    """
    Orthonormal basis of N([O_L T^f_L]) split into (x0, f0)

    Each f0 is checked to vanish in the residual, K_y T^f_L f0 = 0.

    Raises:
        HorizonTooShort, ZeroDynamicsViolation
    """
    if isinstance(source, KernelFilter):
        signatures = build_signatures(source, SignatureSource.DATA_DRIVEN, channels=list(fault_channels or []))
        S = np.hstack([s.matrix for s in signatures])
        return ZeroDynamicBasis(None, nullspace(source.K_y @ S, rel_tol).basis)

    subsystem = _subsystem(source, fault_channels, output_subset)
    if L < subsystem.n:
        raise HorizonTooShort(f"L={L} is below n={subsystem.n}")
    O = subsystem_observability(subsystem, L)
    T_f = subsystem_toeplitz(subsystem, L)
    basis = nullspace(np.hstack([O, T_f]), rel_tol).basis
    x0, f0 = basis[: subsystem.n], basis[subsystem.n:]

    if basis.shape[1]:
        annihilator = nullspace(O.T, rel_tol).basis.T if O.size else np.eye(T_f.shape[0])
        leak = np.max(np.abs(annihilator @ T_f @ f0)) if annihilator.size else 0.0
        if leak > check_tol * max(1.0, np.linalg.norm(T_f, 2)):
            raise ZeroDynamicsViolation(f"zero-dynamic directions leak into the residual ({leak:.3g})")
    return ZeroDynamicBasis(x0, f0)


def pencil_zero_oracle(
    subsystem: FaultSubsystem,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
) -> ZeroCount:
    """
    Finite zeros from the generalized eigenvalues of the (squared-down)
    Rosenbrock pencil, each confirmed by a rank drop of the full Rosenbrock
    matrix; infinite zeros as dim N(T_tau).

    Raises:
        NumericallyIllConditioned: when a candidate is neither clearly a zero
            nor clearly spurious
    """
    n, n_f, n_y = subsystem.n, subsystem.n_f, subsystem.n_y
    tau = minimal_delay(subsystem, L_max=n + 1, rel_tol=rel_tol, seed=seed)
    infinite = 0
    if tau > 0:
        T_tau = subsystem_toeplitz(subsystem, tau)
        infinite = T_tau.shape[1] - numerical_rank(T_tau, rel_tol).numerical_rank

    if n == 0:
        return ZeroCount(0, infinite, horizon_used=tau, minimal_delay=tau)

    if n_y == n_f:
        C, D = subsystem.C, subsystem.D_f
    else:
        R = np.random.default_rng(seed).standard_normal((n_f, n_y))
        C, D = R @ subsystem.C, R @ subsystem.D_f

    a = np.block([[subsystem.A, subsystem.B_f], [C, D]])
    b = np.block([[np.eye(n), np.zeros((n, n_f))], [np.zeros((n_f, n)), np.zeros((n_f, n_f))]])
    alpha, beta = scipy.linalg.eigvals(a, b, homogeneous_eigvals=True)

    candidates = []
    for al, be in zip(alpha, beta):
        # eigenvalues at infinity of index > 1 come back as huge finite values
        if abs(be) <= abs(al) / LARGE_ZERO:
            continue
        candidates.append(complex(al / be))

    confirmed = []
    for z in candidates:
        drop = _relative_sigma_min(_rosenbrock(subsystem, z), n + n_f)
        if drop < ZERO_CONFIRM_TOL:
            confirmed.append(z)
        elif drop <= ZERO_REJECT_TOL:
            raise NumericallyIllConditioned(
                f"candidate zero {z:.6g} of {subsystem.label} has ambiguous rank drop {drop:.3g}"
            )

    locations = _cluster(np.array(confirmed, dtype=complex))
    logger.debug(f"Pencil oracle for {subsystem.label}: {len(confirmed)} finite zeros, {infinite} infinite")
    return ZeroCount(len(confirmed), infinite, horizon_used=tau, minimal_delay=tau, locations=locations)


def _cluster(zeros: np.ndarray) -> np.ndarray:
    """Sorted zeros; members closer than ZERO_CLUSTER_GAP share one value, one entry per multiplicity"""
    if len(zeros) == 0:
        return zeros
    order = np.lexsort((zeros.imag, zeros.real))
    ordered = zeros[order]
    merged = [ordered[0]]
    for z in ordered[1:]:
        merged.append(merged[-1] if abs(z - merged[-1]) < ZERO_CLUSTER_GAP else z)
    return np.array(merged, dtype=complex)


def check_nominal_annihilation(model: StateSpaceModel, f0: np.ndarray, channels, L: int) -> float:
    """max |K_y T^f_L f0| with the model-based kernel"""
    kernel = nominal_kernel(model, L)
    T_f = subsystem_toeplitz(FaultSubsystem.from_model(model, channels), L)
    return float(np.max(np.abs(kernel.K_y @ T_f @ f0))) if f0.size else 0.0
