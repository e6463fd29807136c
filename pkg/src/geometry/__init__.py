"""
Geometry of the input and reduced spaces: domains, orthonormal matrices,
subspace distances and the box/affine alternating projection.
"""

from src.geometry.domains import (
    BallDomain,
    BoxDomain,
    DetBoundCheck,
    Domain,
    OrthonormalMatrix,
    det_lower_bound_check,
    random_orthonormal,
    sample_ball_uniform,
    subspace_distance,
    subspace_distance_svd,
)
from src.geometry.projection import (
    ProjectionResult,
    ProjectionStatus,
    alternating_projection,
    clamp_to_box,
    project_affine,
)

__all__ = [
    "BallDomain",
    "BoxDomain",
    "DetBoundCheck",
    "Domain",
    "OrthonormalMatrix",
    "ProjectionResult",
    "ProjectionStatus",
    "alternating_projection",
    "clamp_to_box",
    "det_lower_bound_check",
    "project_affine",
    "random_orthonormal",
    "sample_ball_uniform",
    "subspace_distance",
    "subspace_distance_svd",
]
