from .discernibility import (
    DiscernibilityReport,
    IndiscerniblePair,
    IntersectionRecord,
    TheoremCase,
    augment_pair,
    check_output_observability,
    classify_pair,
    indiscernible_pair,
    intersection_report,
)
from .zeros import (
    ZeroCount,
    ZeroDynamicBasis,
    check_nominal_annihilation,
    count_zeros_nullity,
    minimal_delay,
    pencil_zero_oracle,
    zero_dynamic_inputs,
)

__all__ = [
    "DiscernibilityReport",
    "IndiscerniblePair",
    "IntersectionRecord",
    "TheoremCase",
    "ZeroCount",
    "ZeroDynamicBasis",
    "augment_pair",
    "check_nominal_annihilation",
    "check_output_observability",
    "classify_pair",
    "count_zeros_nullity",
    "indiscernible_pair",
    "intersection_report",
    "minimal_delay",
    "pencil_zero_oracle",
    "zero_dynamic_inputs",
]
