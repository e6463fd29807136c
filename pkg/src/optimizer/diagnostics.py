"""
Run diagnostics derived from a finished trace.
"""

import logging
from typing import Dict, Sequence

import numpy as np

from src.errors import DiagnosticUndefinedError
from src.optimizer.base import Phase, RunTrace

logger = logging.getLogger(__name__)

SUPPORT_LEVELS = (4, 8, 16)


def exploration_support_threshold(m: int, radius: float, d: int, lengthscale_min: float) -> float:
    """radius * sqrt(C) * d * m^(-1/d) with C = 1 / theta_min^2."""
    if m < 1 or d < 1:
        raise DiagnosticUndefinedError(f"Need m >= 1 and d >= 1, got m={m}, d={d}")
    if not lengthscale_min > 0:
        raise DiagnosticUndefinedError(f"Lengthscale must be positive, got {lengthscale_min}")
    return radius * (1.0 / lengthscale_min) * d * m ** (-1.0 / d)


def exploration_support_count(
    trace: RunTrace, m: int, radius: float, d: int, lengthscale_min: float
) -> int:
    """
    Number of BO proposals whose posterior std exceeded the support threshold.

    For a space-filling argument the count should not exceed m.
    """
    threshold = exploration_support_threshold(m, radius, d, lengthscale_min)
    stds = np.array(
        [
            record.proposal_std
            for record in trace.records
            if record.phase == Phase.BO and record.proposal_std is not None
        ],
        dtype=float,
    )
    return int(np.sum(stds > threshold))


def log_exploration_support(
    trace: RunTrace,
    radius: float,
    d: int,
    lengthscale_min: float,
    levels: Sequence[int] = SUPPORT_LEVELS,
) -> Dict[int, int]:
    counts = {
        m: exploration_support_count(trace, m, radius, d, lengthscale_min) for m in levels
    }
    for m, count in counts.items():
        log = logger.info if count <= m else logger.warning
        log(f"Exploration support (m={m}): {count} proposals above threshold")
    return counts
