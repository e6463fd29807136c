"""
Type-II maximum likelihood for the kernel hyperparameters.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.optimize import minimize
from scipy.spatial.distance import pdist

from src.errors import IllConditionedError
from src.gp.kernels import KernelFamily, KernelSpec
from src.gp.model import fit_gp, log_marginal_likelihood

logger = logging.getLogger(__name__)

_FAILED = 1e25


class HyperparameterBounds(BaseModel):
    """Box constraints on tau^2 and on every lengthscale."""

    model_config = ConfigDict(frozen=True)

    signal_variance: Tuple[float, float] = (1e-6, 1e4)
    lengthscale: Tuple[float, float] = (1e-2, 1e2)

    @field_validator("signal_variance", "lengthscale")
    @classmethod
    def _positive_interval(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        lo, hi = value
        if not 0 < lo < hi:
            raise ValueError(f"bounds must satisfy 0 < lo < hi, got {value}")
        return value


def heuristic_start(Z: np.ndarray, Y: np.ndarray, bounds: HyperparameterBounds) -> np.ndarray:
    """log [var(Y), median pairwise distance, ...] clipped to the bounds."""
    variance = float(np.var(Y)) if Y.shape[0] > 1 else 1.0
    distances = pdist(Z) if Z.shape[0] > 1 else np.array([])
    distances = distances[distances > 0]
    lengthscale = float(np.median(distances)) if distances.size else 1.0
    variance = float(np.clip(variance if variance > 0 else 1.0, *bounds.signal_variance))
    lengthscale = float(np.clip(lengthscale, *bounds.lengthscale))
    return np.log(np.concatenate([[variance], np.full(Z.shape[1], lengthscale)]))


def fit_hyperparameters(
    Z: np.ndarray,
    Y: np.ndarray,
    family: KernelFamily,
    bounds: Optional[HyperparameterBounds] = None,
    rng: Optional[np.random.Generator] = None,
    smoothness: Optional[float] = None,
    n_starts: int = 8,
    nugget: float = 0.0,
) -> KernelSpec:
    """
    Maximize the log marginal likelihood over (tau^2, theta).

    L-BFGS-B runs on log-parameters from the data heuristic plus
    n_starts - 1 log-uniform random starts. The heuristic itself stays a
    candidate, so the result is never worse than it.

    Args:
        Z: n x d training inputs
        Y: n training values
        family: Kernel family
        bounds: Parameter box (defaults to HyperparameterBounds())
        rng: Random source for the extra starts
        smoothness: Matern smoothness
        n_starts: Total number of starts
        nugget: Requested nugget passed to fit_gp

    Returns:
        KernelSpec with the best hyperparameters found

    Raises:
        IllConditionedError: if the likelihood cannot be evaluated at any start
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    Y = np.asarray(Y, dtype=float).reshape(-1)
    bounds = bounds or HyperparameterBounds()
    rng = rng if rng is not None else np.random.default_rng(0)
    d = Z.shape[1]
    template = KernelSpec(family, 1.0, np.ones(d), smoothness)

    log_bounds = [tuple(np.log(bounds.signal_variance))] + [tuple(np.log(bounds.lengthscale))] * d
    lower = np.array([lo for lo, _ in log_bounds])
    upper = np.array([hi for _, hi in log_bounds])

    def negative_lml(params: np.ndarray) -> float:
        params = np.clip(params, lower, upper)
        try:
            spec = template.with_params(np.exp(params[0]), np.exp(params[1:]))
            value = -log_marginal_likelihood(fit_gp(spec, None, Z, Y, nugget))
        except (IllConditionedError, np.linalg.LinAlgError, ValueError, FloatingPointError):
            return _FAILED
        return value if np.isfinite(value) else _FAILED

    heuristic = heuristic_start(Z, Y, bounds)
    starts = [heuristic] + [rng.uniform(lower, upper) for _ in range(max(n_starts, 1) - 1)]

    best_params = heuristic
    best_value = negative_lml(heuristic)
    for index, start in enumerate(starts):
        result = minimize(negative_lml, start, method="L-BFGS-B", bounds=log_bounds)
        params = np.clip(result.x, lower, upper)
        value = negative_lml(params)
        logger.debug(f"Hyperparameter start {index}: -lml={value:.6g} ({result.message})")
        if value < best_value:
            best_params, best_value = params, value

    if best_value >= _FAILED:
        raise IllConditionedError(
            f"Marginal likelihood could not be evaluated at any of {len(starts)} starts"
        )
    spec = template.with_params(np.exp(best_params[0]), np.exp(best_params[1:]))
    logger.debug(
        f"Hyperparameters refitted: tau2={spec.signal_variance:.4g}, "
        f"lengthscales={np.round(spec.lengthscales, 4).tolist()}, lml={-best_value:.6g}"
    )
    return spec
