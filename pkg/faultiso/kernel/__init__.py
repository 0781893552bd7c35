from .kernel_filter import (
    KernelFilter,
    ParityReport,
    RankPolicy,
    RankPolicyKind,
    ResidualTrace,
    estimate_kernel,
    load_filter,
    load_threshold,
    nominal_kernel,
    parity_check,
    residual,
    save_filter,
)

__all__ = [
    "KernelFilter",
    "ParityReport",
    "RankPolicy",
    "RankPolicyKind",
    "ResidualTrace",
    "estimate_kernel",
    "load_filter",
    "load_threshold",
    "nominal_kernel",
    "parity_check",
    "residual",
    "save_filter",
]
