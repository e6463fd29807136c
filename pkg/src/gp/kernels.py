"""
Stationary covariance kernels on the reduced space.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from src.errors import DimensionError

MATERN_SMOOTHNESS = (0.5, 1.5, 2.5)


class KernelFamily(str, Enum):
    SE = "se"
    MATERN = "matern"


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Kernel family with signal variance tau^2 and per-coordinate lengthscales theta."""

    family: KernelFamily
    signal_variance: float
    lengthscales: np.ndarray
    smoothness: Optional[float] = None

    def __post_init__(self):
        family = KernelFamily(self.family)
        lengthscales = np.atleast_1d(np.array(self.lengthscales, dtype=float, copy=True))
        if not self.signal_variance > 0:
            raise ValueError(f"Signal variance must be positive, got {self.signal_variance}")
        if lengthscales.ndim != 1 or not np.all(lengthscales > 0):
            raise ValueError("Lengthscales must be a vector of positive values")
        smoothness = self.smoothness
        if family is KernelFamily.MATERN:
            smoothness = 2.5 if smoothness is None else float(smoothness)
            if smoothness not in MATERN_SMOOTHNESS:
                raise ValueError(f"Matern smoothness must be one of {MATERN_SMOOTHNESS}, got {smoothness}")
        lengthscales.setflags(write=False)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "signal_variance", float(self.signal_variance))
        object.__setattr__(self, "lengthscales", lengthscales)
        object.__setattr__(self, "smoothness", smoothness)

    @property
    def dim(self) -> int:
        return int(self.lengthscales.shape[0])

    def with_params(self, signal_variance: float, lengthscales: np.ndarray) -> "KernelSpec":
        return KernelSpec(self.family, signal_variance, lengthscales, self.smoothness)


def _correlation(spec: KernelSpec, r: np.ndarray) -> np.ndarray:
    if spec.family is KernelFamily.SE:
        return np.exp(-0.5 * r**2)
    if spec.smoothness == 0.5:
        return np.exp(-r)
    if spec.smoothness == 1.5:
        scaled = np.sqrt(3.0) * r
        return (1.0 + scaled) * np.exp(-scaled)
    scaled = np.sqrt(5.0) * r
    return (1.0 + scaled + scaled**2 / 3.0) * np.exp(-scaled)


def _as_rows(spec: KernelSpec, Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[None, :] if Z.shape[0] == spec.dim else Z[:, None]
    if Z.shape[1] != spec.dim:
        raise DimensionError(f"Points have dimension {Z.shape[1]}, kernel expects {spec.dim}")
    return Z


def kernel_matrix(spec: KernelSpec, Z1: np.ndarray, Z2: np.ndarray) -> np.ndarray:
    """
    Covariance matrix between two sets of points.

    Args:
        spec: Kernel specification
        Z1: n1 x d points
        Z2: n2 x d points

    Returns:
        n1 x n2 matrix tau^2 * rho(r), r the lengthscale-scaled distance
    """
    Z1 = _as_rows(spec, Z1)
    Z2 = _as_rows(spec, Z2)
    r = cdist(Z1 / spec.lengthscales, Z2 / spec.lengthscales, "euclidean")
    return spec.signal_variance * _correlation(spec, r)


def kernel_eval(spec: KernelSpec, z: np.ndarray, z_prime: np.ndarray) -> float:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    z_prime = np.atleast_1d(np.asarray(z_prime, dtype=float))
    if z.shape != (spec.dim,) or z_prime.shape != (spec.dim,):
        raise DimensionError(
            f"kernel_eval expects two points of dimension {spec.dim}, got {z.shape} and {z_prime.shape}"
        )
    return float(kernel_matrix(spec, z[None, :], z_prime[None, :])[0, 0])
