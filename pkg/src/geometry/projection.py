"""
Alternating projection between a box and an affine subspace.

Given a reduced-space proposal z and an estimated projection matrix B_hat, we
look for a point x in the box with B_hat^T x = z by alternately clamping to the
box and projecting onto Y = {x : B_hat^T x = z}.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from src.config import settings
from src.errors import DimensionError
from src.geometry.domains import BoxDomain, OrthonormalMatrix

logger = logging.getLogger(__name__)


class ProjectionStatus(str, Enum):
    CONVERGED = "converged"
    INFEASIBLE_LIMIT = "infeasible-limit"


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Outcome of alternating_projection."""

    point: np.ndarray
    residual: float
    iterations: int
    status: ProjectionStatus
    residual_history: Tuple[float, ...] = field(default=())

    @property
    def converged(self) -> bool:
        return self.status == ProjectionStatus.CONVERGED


def clamp_to_box(u: np.ndarray, box: BoxDomain) -> np.ndarray:
    """Euclidean projection onto the box: clamp every coordinate to [lower_j, upper_j]."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != box.dim:
        raise DimensionError(f"Point has length {u.shape[-1]}, box has dimension {box.dim}")
    return np.clip(u, box.lower, box.upper)


def project_affine(v: np.ndarray, B_hat: OrthonormalMatrix, z: np.ndarray) -> np.ndarray:
    """Euclidean projection of v onto {x : B_hat^T x = z}."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape[0] != B_hat.cols:
        raise DimensionError(f"z has length {z.shape[0]}, B_hat has {B_hat.cols} columns")
    v = np.asarray(v, dtype=float)
    return v - B_hat.lift(B_hat.project(v) - z)


def _residual(point: np.ndarray, B_hat: OrthonormalMatrix, z: np.ndarray) -> float:
    return float(np.linalg.norm(B_hat.project(point) - z))


def alternating_projection(
    z: np.ndarray,
    B_hat: OrthonormalMatrix,
    box: BoxDomain,
    tol: float = settings.PROJECTION_TOL,
    max_iter: int = settings.PROJECTION_MAX_ITER,
) -> ProjectionResult:
    """
    Find a box point whose reduced coordinates match z.

    Starts from u = B_hat z. If the box and the affine subspace do not
    intersect the residual stagnates; the run then stops with status
    infeasible-limit and returns the last box-feasible iterate.

    Args:
        z: Target reduced coordinates (length d)
        B_hat: D x d orthonormal matrix
        box: Feasible box
        tol: Residual tolerance ||B_hat^T x - z||
        max_iter: Maximum number of clamp/project rounds

    Returns:
        ProjectionResult with a point inside the box
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if B_hat.rows != box.dim:
        raise DimensionError(f"B_hat has {B_hat.rows} rows, box has dimension {box.dim}")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape[0] != B_hat.cols:
        raise DimensionError(f"z has length {z.shape[0]}, B_hat has {B_hat.cols} columns")

    u = B_hat.lift(z)
    if box.contains(u):
        residual = _residual(u, B_hat, z)
        return ProjectionResult(u, residual, 0, ProjectionStatus.CONVERGED, (residual,))

    window = settings.PROJECTION_STAGNATION_WINDOW
    history = []
    v = u
    for iteration in range(1, max_iter + 1):
        v = clamp_to_box(u, box)
        residual = _residual(v, B_hat, z)
        history.append(residual)
        if residual <= tol:
            return ProjectionResult(
                v, residual, iteration, ProjectionStatus.CONVERGED, tuple(history)
            )
        if len(history) > window:
            reference = history[-1 - window]
            if reference - residual <= settings.PROJECTION_STAGNATION_RTOL * reference:
                logger.debug(
                    f"Alternating projection stagnated at residual {residual:.3e} "
                    f"after {iteration} iterations"
                )
                break
        u = project_affine(v, B_hat, z)

    logger.debug(f"Alternating projection stopped infeasible with residual {history[-1]:.3e}")
    return ProjectionResult(
        v, history[-1], len(history), ProjectionStatus.INFEASIBLE_LIMIT, tuple(history)
    )
