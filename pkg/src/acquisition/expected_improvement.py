"""
Expected improvement for maximization.
"""

from typing import Tuple, Union

import numpy as np
from scipy.stats import norm

from src.gp.model import PredictiveDistribution

ArrayLike = Union[float, np.ndarray]


def h_func(x: ArrayLike) -> ArrayLike:
    """h(x) = x Phi(x) + phi(x), strictly positive with h(x) - h(-x) = x."""
    x = np.asarray(x, dtype=float)
    value = np.maximum(x * norm.cdf(x) + norm.pdf(x), 0.0)
    return float(value) if value.ndim == 0 else value


def expected_improvement(mean: ArrayLike, variance: ArrayLike, incumbent: float) -> np.ndarray:
    """
    Vectorized EI: sigma h((mu - y*) / sigma), and (mu - y*)^+ where sigma = 0.

    Args:
        mean: Posterior means
        variance: Posterior variances (clamped at 0)
        incumbent: Best observed value y*

    Returns:
        Non-negative EI values with the broadcast shape of mean and variance
    """
    mean = np.asarray(mean, dtype=float)
    sigma = np.sqrt(np.maximum(np.asarray(variance, dtype=float), 0.0))
    improvement = mean - incumbent
    positive = sigma > 0
    safe_sigma = np.where(positive, sigma, 1.0)
    ei = np.where(
        positive,
        sigma * np.asarray(h_func(improvement / safe_sigma)),
        np.maximum(improvement, 0.0),
    )
    return np.maximum(ei, 0.0)


def ei_value(pred: PredictiveDistribution, incumbent: float) -> float:
    return float(expected_improvement(pred.mean, pred.variance, incumbent).reshape(-1)[0])


def ei_sandwich_bounds(improvement: ArrayLike, sigma: ArrayLike, R: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pointwise bounds on EI when |mu - g| <= R sigma.

    Here improvement = g - y*, the improvement of the true function value.

    Returns:
        (max{I - R sigma, h(-R)/h(R) I}, I + (R + 1) sigma)
    """
    if R < 0:
        raise ValueError(f"R must be non-negative, got {R}")
    improvement = np.maximum(np.asarray(improvement, dtype=float), 0.0)
    sigma = np.asarray(sigma, dtype=float)
    ratio = h_func(-R) / h_func(R)
    lower = np.maximum(improvement - R * sigma, ratio * improvement)
    upper = improvement + (R + 1.0) * sigma
    return lower, upper
