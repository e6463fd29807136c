"""
Maximization of expected improvement over the reduced ball.

Compass (pattern) search runs from several starts at once: every start tries a
step of +/- step along each coordinate, moves to the best trial if it improves,
and halves its step otherwise.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.acquisition.expected_improvement import expected_improvement
from src.errors import DimensionError
from src.geometry.domains import BallDomain, sample_ball_uniform
from src.gp.model import GpModel, predict

logger = logging.getLogger(__name__)

_IMPROVEMENT_RTOL = 1e-12


class AcqConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_starts: int = Field(32, ge=1)
    max_local_iters: int = Field(200, ge=1)
    # Search stops once the step falls below step_tol * radius
    step_tol: float = Field(1e-6, gt=0)
    raw_samples: int = Field(512, ge=1)
    initial_step: float = Field(0.25, gt=0)


def _ei_at(model: GpModel, Z: np.ndarray, incumbent: float) -> np.ndarray:
    pred = predict(model, Z)
    return expected_improvement(pred.mean, pred.variance, incumbent)


def _into_ball(Z: np.ndarray, radius: float) -> np.ndarray:
    norms = np.linalg.norm(Z, axis=-1, keepdims=True)
    scale = np.where(norms > radius, radius / np.where(norms > 0, norms, 1.0), 1.0)
    return Z * scale


def maximize_ei(
    model: GpModel,
    incumbent: float,
    domain: BallDomain,
    config: AcqConfig,
    rng: np.random.Generator,
    incumbent_z: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, float]:
    """
    Approximate argmax of EI over the ball.

    Args:
        model: Fitted GP on the reduced space
        incumbent: Best observed value y*
        domain: Reduced-space ball
        config: Search settings
        rng: Random source for the raw candidates
        incumbent_z: Reduced location of the incumbent, used as an extra start

    Returns:
        (z, ei) with ||z|| <= radius and ei the EI at z
    """
    d = domain.dim
    if model.kernel.dim != d:
        raise DimensionError(f"GP has dimension {model.kernel.dim}, domain has {d}")
    radius = domain.radius

    raw = sample_ball_uniform(rng, domain, config.raw_samples)
    raw_ei = _ei_at(model, raw, incumbent)
    order = np.argsort(-raw_ei, kind="stable")[: config.n_starts]
    points = raw[order]
    values = raw_ei[order]
    if incumbent_z is not None:
        start = _into_ball(np.atleast_1d(np.asarray(incumbent_z, dtype=float))[None, :], radius)
        points = np.vstack([points, start])
        values = np.append(values, _ei_at(model, start, incumbent))

    steps = np.full(points.shape[0], config.initial_step * radius)
    min_step = config.step_tol * radius
    moves = np.vstack([np.eye(d), -np.eye(d)])

    for _ in range(config.max_local_iters):
        active = steps >= min_step
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        trials = points[idx, None, :] + steps[idx, None, None] * moves[None, :, :]
        trials = _into_ball(trials, radius)
        trial_ei = _ei_at(model, trials.reshape(-1, d), incumbent).reshape(idx.size, 2 * d)
        best = np.argmax(trial_ei, axis=1)
        best_ei = trial_ei[np.arange(idx.size), best]
        improved = best_ei > values[idx] + _IMPROVEMENT_RTOL * np.abs(values[idx])
        improved &= best_ei > values[idx]
        moved = idx[improved]
        points[moved] = trials[improved, best[improved]]
        values[moved] = best_ei[improved]
        steps[idx[~improved]] *= 0.5

    winner = int(np.argmax(values))
    z = points[winner].copy()
    ei = float(_ei_at(model, z[None, :], incumbent)[0])
    logger.debug(f"EI search: best ei={ei:.4e} at ||z||={np.linalg.norm(z):.4f}")
    return z, ei
