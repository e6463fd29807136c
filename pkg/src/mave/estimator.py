"""
Minimum average variance estimation of the EDR directions.

Alternates between local-linear fits at every anchor (directions fixed) and a
stacked least-squares update of the directions (local fits fixed), followed by
the polar factor to restore orthonormal columns. Several starts are refined and
the one with the smallest final objective wins.
"""

import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from src.errors import DimensionError, InsufficientDataError, RankDeficiencyError
from src.geometry.domains import OrthonormalMatrix, random_orthonormal
from src.mave.dataset import Dataset, MaveConfig
from src.mave.smoothing import (
    LocalFit,
    LocalFits,
    MatrixLike,
    as_matrix,
    fit_local_linear,
    local_residuals,
    weight_matrix,
)

logger = logging.getLogger(__name__)

# Ridge used by the full-dimensional seed fit when the config disables ridging
_SEED_RIDGE = 1e-8
_DEGENERATE_DIRECTION = 1e-12


class ObjectiveStep(NamedTuple):
    """Fixed-weight objective before and after one direction update."""

    before: float
    after: float


@dataclass(frozen=True, eq=False)
class EdrEstimate:
    B_hat: OrthonormalMatrix
    objective: float
    iterations: int
    converged: bool
    history: Tuple[ObjectiveStep, ...] = field(default=())
    restart: int = 0
    rank_deficient: bool = False


def _weights_for(
    projected: np.ndarray, config: MaveConfig, n: int, D: int, d: int
) -> np.ndarray:
    weights, _ = weight_matrix(
        projected,
        config.bandwidth(n, D),
        d + 2,
        config.max_bandwidth_inflations,
        config.bandwidth_inflation,
    )
    return weights


def mave_objective(
    dataset: Dataset,
    B_hat: MatrixLike,
    config: MaveConfig,
    weights: Optional[np.ndarray] = None,
) -> float:
    """
    Sum over anchors of the weighted squared local-linear residuals.

    Args:
        dataset: Samples
        B_hat: D x d directions
        config: Bandwidth and ridge settings
        weights: Optional n x n weight matrix (computed from B_hat otherwise)

    Returns:
        Non-negative objective value
    """
    B = as_matrix(B_hat)
    if B.shape[0] != dataset.dim:
        raise DimensionError(f"B_hat has {B.shape[0]} rows, data has dimension {dataset.dim}")
    if weights is None:
        weights = _weights_for(
            dataset.inputs @ B, config, dataset.size, dataset.dim, B.shape[1]
        )
    fits = fit_local_linear(dataset.inputs, dataset.responses, B, weights, config.ridge)
    return max(fits.total_residual, 0.0)


def _as_local_fits(fits: Union[LocalFits, Sequence[LocalFit]]) -> LocalFits:
    if isinstance(fits, LocalFits):
        return fits
    fits = list(fits)
    return LocalFits(
        np.arange(len(fits)),
        np.array([fit.intercept for fit in fits], dtype=float),
        np.array([np.atleast_1d(fit.slope) for fit in fits], dtype=float),
        np.array([fit.residual for fit in fits], dtype=float),
    )


def update_directions(
    dataset: Dataset,
    fits: Union[LocalFits, Sequence[LocalFit]],
    weights: np.ndarray,
    d: int,
    current: Optional[OrthonormalMatrix] = None,
    ridge: float = 1e-8,
) -> Tuple[OrthonormalMatrix, LocalFits, bool]:
    """
    Minimize the MAVE objective over the directions with the local fits fixed.

    The problem is linear in vec(B) with normal matrix
    sum_j (b_j b_j^T) kron M_j, M_j = sum_i w_ji (x_i - x_j)(x_i - x_j)^T.
    The minimizer is replaced by its polar factor U (B = U P) and the slopes
    become P b_j so the fixed-weight objective is unchanged.

    Args:
        dataset: Samples
        fits: Local fits, one per anchor
        weights: Weight rows matching the fits' anchors
        d: Number of directions
        current: Directions to keep if the update degenerates to zero
        ridge: Relative ridge used only if the Cholesky factorization fails

    Returns:
        (orthonormal directions, carried-over fits, rank_deficient flag)
    """
    fits = _as_local_fits(fits)
    X = dataset.inputs
    y = dataset.responses
    n, D = X.shape
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    anchors = fits.anchors
    slopes = fits.slopes.reshape(len(fits), -1)
    intercepts = fits.intercepts
    if slopes.shape[1] != d:
        raise DimensionError(f"Slopes have length {slopes.shape[1]}, expected d={d}")
    if W.shape != (len(fits), n):
        raise DimensionError(f"Weights {W.shape} do not match {len(fits)} anchors x {n} points")

    Xj = X[anchors]
    sw = W.sum(axis=1)
    wx = W @ X
    wy = W @ y
    wxy = W @ (X * y[:, None])
    wxx = (W @ (X[:, :, None] * X[:, None, :]).reshape(n, D * D)).reshape(-1, D, D)
    scatter = (
        wxx
        - wx[:, :, None] * Xj[:, None, :]
        - Xj[:, :, None] * wx[:, None, :]
        + sw[:, None, None] * Xj[:, :, None] * Xj[:, None, :]
    )
    # sum_i w_ji (y_i - a_j)(x_i - x_j)
    moments = (
        wxy
        - intercepts[:, None] * wx
        - Xj * (wy - intercepts * sw)[:, None]
    )

    # vec(B) index k * D + a holds B[a, k]
    normal = np.einsum("jk,jl,jab->kalb", slopes, slopes, scatter, optimize=True)
    normal = normal.reshape(d * D, d * D)
    rhs = np.einsum("jk,ja->ka", slopes, moments).reshape(d * D)

    rank_deficient = False
    try:
        vec = linalg.cho_solve(linalg.cho_factor(normal, lower=True), rhs)
        if not np.all(np.isfinite(vec)):
            raise linalg.LinAlgError("non-finite direction update")
    except linalg.LinAlgError:
        rank_deficient = True
        stabilizer = ridge * max(np.trace(normal), 1.0) / (D * d)
        logger.warning(f"Direction update is singular, ridge-stabilizing with {stabilizer:.3e}")
        vec = linalg.solve(normal + stabilizer * np.eye(d * D), rhs, assume_a="sym")

    B_new = vec.reshape(d, D).T
    if np.linalg.norm(B_new) <= _DEGENERATE_DIRECTION:
        if current is None:
            raise RankDeficiencyError("Direction update vanished and no current directions given")
        logger.warning("Direction update vanished, keeping the current directions")
        return current, fits, True

    unitary, positive = linalg.polar(B_new, side="right")
    carried = LocalFits(
        anchors,
        intercepts.copy(),
        slopes @ positive.T,
        local_residuals(X @ unitary, y, anchors, W, intercepts, slopes @ positive.T),
    )
    return OrthonormalMatrix(unitary), carried, rank_deficient


def _opg_start(dataset: Dataset, config: MaveConfig, d: int) -> OrthonormalMatrix:
    """Top-d right singular vectors of the stacked full-dimensional local slopes."""
    X = dataset.inputs
    n, D = X.shape
    weights = _weights_for(X, config, n, D, D)
    ridge = config.ridge if config.ridge > 0 else _SEED_RIDGE
    fits = fit_local_linear(X, dataset.responses, np.eye(D), weights, ridge)
    _, _, vt = linalg.svd(fits.slopes, full_matrices=False)
    return OrthonormalMatrix(vt[:d].T)


def _refine(
    dataset: Dataset, start: OrthonormalMatrix, config: MaveConfig, max_iters: int
) -> Tuple[OrthonormalMatrix, int, bool, List[ObjectiveStep], bool]:
    X = dataset.inputs
    y = dataset.responses
    n, D = X.shape
    d = start.cols
    B = start
    history: List[ObjectiveStep] = []
    converged = False
    rank_deficient = False
    iterations = 0

    for iterations in range(1, max_iters + 1):
        weights = _weights_for(B.project(X), config, n, D, d)
        fits = fit_local_linear(X, y, B, weights, config.ridge)
        B_new, carried, flagged = update_directions(
            dataset, fits, weights, d, current=B, ridge=max(config.ridge, _SEED_RIDGE)
        )
        rank_deficient = rank_deficient or flagged
        history.append(ObjectiveStep(fits.total_residual, carried.total_residual))
        change = float(np.linalg.norm(B_new.projector() - B.projector()))
        logger.debug(
            f"MAVE iteration {iterations}: objective {fits.total_residual:.6g} -> "
            f"{carried.total_residual:.6g}, projector change {change:.3e}"
        )
        B = B_new
        if change < config.tol:
            converged = True
            break

    return B, iterations, converged, history, rank_deficient


def estimate_edr(
    dataset: Dataset,
    config: MaveConfig,
    rng: np.random.Generator,
    initial: Optional[OrthonormalMatrix] = None,
) -> EdrEstimate:
    """
    Estimate a D x d basis of the EDR space.

    The first start is `initial` when given, otherwise the outer-product-of-
    gradients seed; the remaining n_restarts - 1 starts are Haar-random.

    Raises:
        DimensionError: if target_dim exceeds the data dimension
        InsufficientDataError: if fewer than target_dim + 2 samples are available
    """
    n, D = dataset.size, dataset.dim
    d = config.target_dim
    if d > D:
        raise DimensionError(f"target_dim={d} exceeds the input dimension D={D}")
    if n < d + 2:
        raise InsufficientDataError(f"MAVE needs at least {d + 2} samples, got {n}")
    if initial is not None and (initial.rows != D or initial.cols != d):
        raise DimensionError(
            f"Warm start is {initial.rows}x{initial.cols}, expected {D}x{d}"
        )

    if d == D:
        identity = OrthonormalMatrix(np.eye(D))
        return EdrEstimate(identity, mave_objective(dataset, identity, config), 0, True)

    starts = [initial if initial is not None else _opg_start(dataset, config, d)]
    starts += [random_orthonormal(rng, D, d) for _ in range(config.n_restarts - 1)]

    best: Optional[EdrEstimate] = None
    for index, start in enumerate(starts):
        B, iterations, converged, history, flagged = _refine(
            dataset, start, config, config.max_outer_iters
        )
        objective = mave_objective(dataset, B, config)
        logger.debug(
            f"MAVE start {index}: objective {objective:.6g} after {iterations} iterations"
        )
        if best is None or objective < best.objective:
            best = EdrEstimate(B, objective, iterations, converged, tuple(history), index, flagged)

    if not best.converged:
        logger.debug(f"MAVE did not converge within {config.max_outer_iters} outer iterations")
    logger.info(
        f"MAVE fitted: n={n}, D={D}, d={d}, objective={best.objective:.6g}, "
        f"start={best.restart}, iterations={best.iterations}"
    )
    return best
