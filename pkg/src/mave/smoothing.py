"""
Kernel weights and weighted local-linear fits in the projected space.

For an anchor x_j the local model is y_i ~ a_j + b_j^T B^T (x_i - x_j), fitted
by weighted least squares with Epanechnikov weights computed from the
projected distances.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from src.errors import BandwidthTooSmallError, DimensionError, RankDeficiencyError
from src.geometry.domains import OrthonormalMatrix
from src.mave.dataset import Dataset

logger = logging.getLogger(__name__)

MatrixLike = Union[OrthonormalMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class LocalFit:
    """Local intercept a_j = g(B^T x_j), slope b_j = grad g(B^T x_j) and weighted residual."""

    intercept: float
    slope: np.ndarray
    residual: float = 0.0


@dataclass(frozen=True, eq=False)
class LocalFits:
    """Local fits for a batch of anchors, stored as arrays."""

    anchors: np.ndarray
    intercepts: np.ndarray
    slopes: np.ndarray
    residuals: np.ndarray

    def __len__(self) -> int:
        return int(self.anchors.shape[0])

    def __getitem__(self, index: int) -> LocalFit:
        return LocalFit(
            float(self.intercepts[index]),
            self.slopes[index].copy(),
            float(self.residuals[index]),
        )

    @property
    def total_residual(self) -> float:
        return float(np.sum(self.residuals))


def as_matrix(B: MatrixLike) -> np.ndarray:
    if isinstance(B, OrthonormalMatrix):
        return B.entries
    B = np.asarray(B, dtype=float)
    return B[:, None] if B.ndim == 1 else B


def _kernel(sq_dist: np.ndarray, h: np.ndarray, d: int) -> np.ndarray:
    """Epanechnikov kernel 3/4 h^-d (1 - ||z||^2 / h^2)^+ on squared distances."""
    return 0.75 * h ** (-d) * np.maximum(1.0 - sq_dist / h**2, 0.0)


def epanechnikov_weights(projected: np.ndarray, j: int, h: float) -> np.ndarray:
    """
    Normalized Epanechnikov weights of every point around anchor j.

    Args:
        projected: n x d projected points B^T x_i
        j: Anchor index (the anchor itself is included)
        h: Bandwidth

    Returns:
        Length-n non-negative weights summing to 1

    Raises:
        BandwidthTooSmallError: if every kernel value is zero
    """
    if not h > 0:
        raise ValueError(f"Bandwidth must be positive, got {h}")
    projected = np.asarray(projected, dtype=float)
    if projected.ndim == 1:
        projected = projected[:, None]
    sq_dist = np.sum((projected - projected[j]) ** 2, axis=1)
    raw = _kernel(sq_dist, np.asarray(h, dtype=float), projected.shape[1])
    total = raw.sum()
    if not total > 0:
        raise BandwidthTooSmallError(f"No point within bandwidth {h:.4g} of anchor {j}")
    return raw / total


def weight_matrix(
    projected: np.ndarray,
    h: float,
    min_support: int,
    max_inflations: int = 10,
    inflation: float = 1.5,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row-stochastic weight matrix, row j holding the weights of anchor j.

    Anchors with fewer than min_support points inside their bandwidth get the
    bandwidth inflated by `inflation`, at most `max_inflations` times.

    Returns:
        (n x n weights, per-anchor bandwidths)
    """
    projected = np.asarray(projected, dtype=float)
    if projected.ndim == 1:
        projected = projected[:, None]
    n, d = projected.shape
    sq_dist = cdist(projected, projected, "sqeuclidean")
    bandwidths = np.full(n, float(h))
    needed = min(min_support, n)

    for _ in range(max_inflations):
        support = np.sum(sq_dist < bandwidths[:, None] ** 2, axis=1)
        starving = support < needed
        if not np.any(starving):
            break
        bandwidths[starving] *= inflation
    else:
        support = np.sum(sq_dist < bandwidths[:, None] ** 2, axis=1)
        if np.any(support < needed):
            logger.warning(
                f"{int(np.sum(support < needed))} anchors still have fewer than "
                f"{needed} supporting points after {max_inflations} bandwidth inflations"
            )

    raw = _kernel(sq_dist, bandwidths[:, None], d)
    totals = raw.sum(axis=1)
    if np.any(totals <= 0):
        raise BandwidthTooSmallError("Kernel weights vanish for at least one anchor")
    return raw / totals[:, None], bandwidths


def fit_local_linear(
    inputs: np.ndarray,
    responses: np.ndarray,
    B: MatrixLike,
    weights: np.ndarray,
    ridge: float,
    anchors: np.ndarray = None,
) -> LocalFits:
    """
    Weighted local-linear fits for a batch of anchors.

    Solves, for every anchor j, the normal equations of
    min_{a,b} sum_i w_ji [y_i - a - b^T B^T (x_i - x_j)]^2. A positive ridge adds
    ridge * trace(A_j) / (d + 1) to the slope block of each normal matrix.

    Args:
        inputs: n x D inputs
        responses: length-n responses
        B: D x d projection matrix
        weights: m x n weights, row k belonging to anchors[k]
        ridge: Relative ridge (0 disables regularization)
        anchors: Anchor indices (defaults to all n points)

    Returns:
        LocalFits for the anchors

    Raises:
        RankDeficiencyError: if ridge is 0 and a normal matrix is singular
    """
    X = np.asarray(inputs, dtype=float)
    y = np.asarray(responses, dtype=float)
    B = as_matrix(B)
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    n = X.shape[0]
    anchors = np.arange(n) if anchors is None else np.atleast_1d(np.asarray(anchors, dtype=int))
    if W.shape != (anchors.shape[0], n):
        raise DimensionError(f"Weights {W.shape} do not match {anchors.shape[0]} anchors x {n} points")
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")

    Z = X @ B
    d = Z.shape[1]
    m = anchors.shape[0]
    Zj = Z[anchors]

    sw = W.sum(axis=1)
    swz = W @ Z
    swzz = (W @ (Z[:, :, None] * Z[:, None, :]).reshape(n, d * d)).reshape(m, d, d)
    swy = W @ y
    swzy = W @ (Z * y[:, None])

    mean_dz = swz - sw[:, None] * Zj
    cross_dz = (
        swzz
        - swz[:, :, None] * Zj[:, None, :]
        - Zj[:, :, None] * swz[:, None, :]
        + sw[:, None, None] * Zj[:, :, None] * Zj[:, None, :]
    )

    normal = np.empty((m, d + 1, d + 1))
    normal[:, 0, 0] = sw
    normal[:, 0, 1:] = mean_dz
    normal[:, 1:, 0] = mean_dz
    normal[:, 1:, 1:] = cross_dz
    rhs = np.empty((m, d + 1))
    rhs[:, 0] = swy
    rhs[:, 1:] = swzy - Zj * swy[:, None]

    if ridge > 0:
        scale = np.trace(normal, axis1=1, axis2=2) / (d + 1)
        normal[:, 1:, 1:] += (ridge * scale)[:, None, None] * np.eye(d)
    else:
        ranks = np.linalg.matrix_rank(normal)
        deficient = np.flatnonzero(ranks < d + 1)
        if deficient.size:
            raise RankDeficiencyError(
                f"Local design is singular for {deficient.size} anchors "
                f"(first: {int(anchors[deficient[0]])}); use a positive ridge"
            )

    solution = np.linalg.solve(normal, rhs[:, :, None])[:, :, 0]
    intercepts = solution[:, 0]
    slopes = solution[:, 1:]
    residuals = local_residuals(Z, y, anchors, W, intercepts, slopes)
    return LocalFits(anchors, intercepts, slopes, residuals)


def local_residuals(
    Z: np.ndarray,
    y: np.ndarray,
    anchors: np.ndarray,
    W: np.ndarray,
    intercepts: np.ndarray,
    slopes: np.ndarray,
) -> np.ndarray:
    """Per-anchor weighted squared residuals sum_i w_ji [y_i - a_j - b_j^T (z_i - z_j)]^2."""
    offsets = np.sum(Z[anchors] * slopes, axis=1)
    predictions = intercepts[:, None] + slopes @ Z.T - offsets[:, None]
    return np.sum(W * (y[None, :] - predictions) ** 2, axis=1)


def local_linear_fit(
    dataset: Dataset, B_hat: MatrixLike, j: int, weights: np.ndarray, ridge: float
) -> LocalFit:
    """Weighted local-linear fit at a single anchor j."""
    fits = fit_local_linear(
        dataset.inputs, dataset.responses, B_hat, np.asarray(weights)[None, :], ridge, [j]
    )
    return fits[0]
