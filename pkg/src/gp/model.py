"""
Noiseless Gaussian-process regression with a constant prior mean.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from src.config import settings
from src.errors import DimensionError, IllConditionedError
from src.gp.kernels import KernelSpec, kernel_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GpModel:
    """A GP conditioned on (Z, Y); `cholesky` is the lower factor of K + nugget * I."""

    kernel: KernelSpec
    prior_mean: float
    train_inputs: np.ndarray
    train_values: np.ndarray
    nugget: float
    cholesky: np.ndarray
    alpha: np.ndarray

    @property
    def size(self) -> int:
        return int(self.train_values.shape[0])


@dataclass(frozen=True, eq=False)
class PredictiveDistribution:
    mean: np.ndarray
    variance: np.ndarray

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.variance)


def fit_gp(
    kernel: KernelSpec,
    mean: Optional[float],
    Z: np.ndarray,
    Y: np.ndarray,
    nugget: float = 0.0,
) -> GpModel:
    """
    Condition a GP on training data.

    The nugget starts at max(nugget, 1e-10 tau^2) and grows tenfold until the
    Cholesky factorization succeeds or it exceeds max(1e-4 tau^2, nugget).

    Args:
        kernel: Kernel with fixed hyperparameters
        mean: Constant prior mean (data mean if None)
        Z: n x d training inputs
        Y: n training values
        nugget: Requested diagonal jitter

    Returns:
        Fitted GpModel

    Raises:
        IllConditionedError: if no admissible nugget makes K positive definite
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    Y = np.asarray(Y, dtype=float).reshape(-1)
    if Z.shape[0] != Y.shape[0] or Z.shape[0] == 0:
        raise DimensionError(f"Need matching non-empty Z {Z.shape} and Y {Y.shape}")
    if Z.shape[1] != kernel.dim:
        raise DimensionError(f"Z has dimension {Z.shape[1]}, kernel expects {kernel.dim}")
    prior_mean = float(np.mean(Y)) if mean is None else float(mean)

    tau2 = kernel.signal_variance
    K = kernel_matrix(kernel, Z, Z)
    start = max(float(nugget), settings.NUGGET_START * tau2)
    # A requested nugget above the escalation ceiling is still tried once
    ceiling = max(settings.NUGGET_MAX * tau2, start) * (1.0 + 1e-9)
    jitter = start
    factor = None
    while True:
        try:
            factor = linalg.cholesky(K + jitter * np.eye(Z.shape[0]), lower=True)
            break
        except linalg.LinAlgError:
            jitter *= settings.NUGGET_GROWTH
            if jitter > ceiling:
                break
    if factor is None:
        raise IllConditionedError(
            f"Covariance of {Z.shape[0]} points is not positive definite up to nugget "
            f"{ceiling / (1.0 + 1e-9):.3e}"
        )
    if jitter > start:
        logger.warning(f"Nugget escalated to {jitter:.3e} to factorize the covariance")

    alpha = linalg.cho_solve((factor, True), Y - prior_mean)
    return GpModel(kernel, prior_mean, Z.copy(), Y.copy(), jitter, factor, alpha)


def predict(model: GpModel, Zq: np.ndarray) -> PredictiveDistribution:
    """Posterior mean and variance at every row of Zq."""
    Zq = np.asarray(Zq, dtype=float)
    if Zq.ndim == 1:
        Zq = Zq[None, :]
    cross = kernel_matrix(model.kernel, model.train_inputs, Zq)
    mean = model.prior_mean + cross.T @ model.alpha
    v = linalg.solve_triangular(model.cholesky, cross, lower=True)
    variance = model.kernel.signal_variance - np.sum(v**2, axis=0)
    return PredictiveDistribution(mean, np.maximum(variance, 0.0))


def posterior(model: GpModel, z: np.ndarray) -> PredictiveDistribution:
    """Posterior at a single point; mean and variance are scalars."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (model.kernel.dim,):
        raise DimensionError(f"Expected a point of dimension {model.kernel.dim}, got {z.shape}")
    pred = predict(model, z[None, :])
    return PredictiveDistribution(float(pred.mean[0]), float(pred.variance[0]))


def log_marginal_likelihood(model: GpModel) -> float:
    residual = model.train_values - model.prior_mean
    n = model.size
    return float(
        -0.5 * residual @ model.alpha
        - np.sum(np.log(np.diag(model.cholesky)))
        - 0.5 * n * np.log(2.0 * np.pi)
    )
