"""
Domains, orthonormal matrices and subspace diagnostics.

The input space of the optimizer is either a Euclidean ball of radius 1 + eps_bar
or an axis-aligned box; the reduced space is always a ball.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import linalg

from src.errors import DiagnosticUndefinedError, DimensionError

logger = logging.getLogger(__name__)

ORTHONORMAL_TOL = 1e-8
# Relative shrink of sampled radii; keeps every sample inside the closed ball
_RADIAL_SLACK = 1e-12


def _as_readonly(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class BallDomain:
    """Closed Euclidean ball of the given radius centred at the origin."""

    dim: int
    radius: float

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionError(f"Ball dimension must be >= 1, got {self.dim}")
        if not self.radius > 0:
            raise ValueError(f"Ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.linalg.norm(x) <= self.radius + tol)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return sample_ball_uniform(rng, self, n)


@dataclass(frozen=True, eq=False)
class BoxDomain:
    """Axis-aligned box [lower_j, upper_j]^D."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise DimensionError(
                f"Box bounds must be vectors of equal length, got {lower.shape} and {upper.shape}"
            )
        if not np.all(lower < upper):
            raise ValueError("Box requires lower[j] < upper[j] for every coordinate")
        object.__setattr__(self, "lower", _as_readonly(lower))
        object.__setattr__(self, "upper", _as_readonly(upper))

    @classmethod
    def symmetric(cls, dim: int, half_width: float = 1.0) -> "BoxDomain":
        """Build [-half_width, half_width]^dim."""
        return cls(-half_width * np.ones(dim), half_width * np.ones(dim))

    @property
    def dim(self) -> int:
        return int(self.lower.shape[0])

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.lower + (self.upper - self.lower) * rng.random((n, self.dim))


Domain = Union[BallDomain, BoxDomain]


@dataclass(frozen=True, eq=False)
class OrthonormalMatrix:
    """D x d matrix with orthonormal columns (B^T B = I_d)."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim == 1:
            entries = entries[:, None]
        if entries.ndim != 2:
            raise DimensionError(f"Expected a 2-D matrix, got shape {entries.shape}")
        rows, cols = entries.shape
        if cols < 1 or cols > rows:
            raise DimensionError(f"Need 1 <= d <= D, got D={rows}, d={cols}")
        gap = np.linalg.norm(entries.T @ entries - np.eye(cols))
        if gap > ORTHONORMAL_TOL:
            raise ValueError(f"Columns are not orthonormal: ||B^T B - I||_F = {gap:.3e}")
        object.__setattr__(self, "entries", _as_readonly(entries))

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    def project(self, x: np.ndarray) -> np.ndarray:
        """Reduced coordinates B^T x for a point or for every row of a matrix."""
        return np.asarray(x, dtype=float) @ self.entries

    def lift(self, z: np.ndarray) -> np.ndarray:
        """Map reduced coordinates back with B z."""
        return self.entries @ np.asarray(z, dtype=float)

    def projector(self) -> np.ndarray:
        return self.entries @ self.entries.T


class DetBoundCheck(NamedTuple):
    determinant: float
    bound: float
    holds: bool


def sample_ball_uniform(rng: np.random.Generator, domain: BallDomain, n: int) -> np.ndarray:
    """
    Draw n points uniformly from the ball.

    Directions are normalized Gaussians and radii are radius * U^(1/D), which is
    exact in any dimension without rejection.

    Args:
        rng: Random source
        domain: Ball to sample from
        n: Number of points (>= 1)

    Returns:
        n x D array of points with norm <= radius
    """
    if n < 1:
        raise ValueError(f"Need at least one sample, got n={n}")
    directions = rng.standard_normal((n, domain.dim))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    # A zero Gaussian draw has probability zero but would divide by zero
    norms[norms == 0.0] = 1.0
    radii = domain.radius * (1.0 - _RADIAL_SLACK) * rng.random((n, 1)) ** (1.0 / domain.dim)
    return directions / norms * radii


def random_orthonormal(rng: np.random.Generator, D: int, d: int) -> OrthonormalMatrix:
    """
    Haar-distributed D x d matrix with orthonormal columns.

    Uses the QR factorization of a Gaussian matrix with the signs of R's
    diagonal folded into Q.
    """
    if d < 1 or d > D:
        raise DimensionError(f"Need 1 <= d <= D, got D={D}, d={d}")
    gaussian = rng.standard_normal((D, d))
    q, r = linalg.qr(gaussian, mode="economic")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return OrthonormalMatrix(q * signs)


def _check_same_ambient(B: OrthonormalMatrix, B_hat: OrthonormalMatrix) -> None:
    if B.rows != B_hat.rows:
        raise DimensionError(f"Ambient dimensions differ: {B.rows} vs {B_hat.rows}")


def subspace_distance(B: OrthonormalMatrix, B_hat: OrthonormalMatrix) -> float:
    """
    Frobenius distance ||B^T (I - B_hat B_hat^T)||_F between the true and estimated spans.

    Zero exactly when span(B) is contained in span(B_hat).
    """
    _check_same_ambient(B, B_hat)
    residual = B.entries - B_hat.entries @ (B_hat.entries.T @ B.entries)
    return float(np.linalg.norm(residual))


def subspace_distance_svd(B: OrthonormalMatrix, B_hat: OrthonormalMatrix) -> float:
    """Same distance through the singular values of B^T B_hat."""
    _check_same_ambient(B, B_hat)
    psi = linalg.svdvals(B.entries.T @ B_hat.entries)
    return float(np.sqrt(max(B.cols - float(np.sum(psi**2)), 0.0)))


def det_lower_bound_check(B: OrthonormalMatrix, B_hat: OrthonormalMatrix) -> DetBoundCheck:
    """
    Check |det(B^T B_hat)| >= sqrt(1 - delta^2) for square cross products.

    Raises:
        DimensionError: if B and B_hat have different column counts
        DiagnosticUndefinedError: if the subspace distance is >= 1
    """
    _check_same_ambient(B, B_hat)
    if B.cols != B_hat.cols:
        raise DimensionError(f"Determinant check needs d = d_e, got {B_hat.cols} and {B.cols}")
    delta = subspace_distance(B, B_hat)
    if delta >= 1.0:
        raise DiagnosticUndefinedError(f"Bound undefined for subspace distance {delta:.4f} >= 1")
    determinant = float(abs(linalg.det(B.entries.T @ B_hat.entries)))
    bound = float(np.sqrt(1.0 - delta**2))
    return DetBoundCheck(determinant, bound, determinant >= bound - 1e-10)
