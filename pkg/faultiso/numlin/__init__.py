from .decompositions import (
    DEFAULT_REL_TOL,
    Matrix,
    RankDecision,
    as_matrix,
    gap_rank,
    lq_decompose,
    numerical_rank,
    svd_split,
)
from .subspaces import (
    SubspaceBasis,
    left_nullspace,
    nullspace,
    orthogonal_projection,
    principal_angles,
    range_basis,
    subspace_intersection,
    subspace_intersection_dim,
)

__all__ = [
    "DEFAULT_REL_TOL",
    "Matrix",
    "RankDecision",
    "SubspaceBasis",
    "as_matrix",
    "gap_rank",
    "left_nullspace",
    "lq_decompose",
    "nullspace",
    "numerical_rank",
    "orthogonal_projection",
    "principal_angles",
    "range_basis",
    "subspace_intersection",
    "subspace_intersection_dim",
    "svd_split",
]
