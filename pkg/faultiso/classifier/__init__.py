from .angle_classifier import (
    DEFAULT_TIE_TOL,
    AngleTrace,
    CombinationSearch,
    Decision,
    DecisionStatus,
    angles,
    combination_search,
    decide,
    decisions_frame,
    search_residual,
)

__all__ = [
    "DEFAULT_TIE_TOL",
    "AngleTrace",
    "CombinationSearch",
    "Decision",
    "DecisionStatus",
    "angles",
    "combination_search",
    "decide",
    "decisions_frame",
    "search_residual",
]
