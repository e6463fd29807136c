"""
Quick invariant checks run by `mavebo-bench selftest`.
"""

import logging
from typing import Callable, List, NamedTuple

import numpy as np

from src.acquisition.expected_improvement import expected_improvement, h_func
from src.bench.functions import make_embedded_function
from src.geometry.domains import (
    BallDomain,
    BoxDomain,
    OrthonormalMatrix,
    det_lower_bound_check,
    random_orthonormal,
    sample_ball_uniform,
    subspace_distance,
    subspace_distance_svd,
)
from src.geometry.projection import ProjectionStatus, alternating_projection
from src.gp.kernels import KernelFamily, KernelSpec
from src.gp.model import fit_gp, predict
from src.mave.smoothing import epanechnikov_weights

logger = logging.getLogger(__name__)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    message: str = ""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise AssertionError(message)


def _check_ball_sampling() -> None:
    rng = np.random.default_rng(0)
    points = sample_ball_uniform(rng, BallDomain(5, 1.05), 2000)
    _require(np.all(np.linalg.norm(points, axis=1) <= 1.05), "sample outside the ball")


def _check_orthonormal() -> None:
    B = random_orthonormal(np.random.default_rng(1), 8, 3)
    gap = np.linalg.norm(B.entries.T @ B.entries - np.eye(3))
    _require(gap < 1e-10, f"||B^T B - I|| = {gap:.2e}")


def _check_subspace_distance() -> None:
    theta = np.pi / 6
    B = OrthonormalMatrix(np.array([[1.0], [0.0]]))
    B_hat = OrthonormalMatrix(np.array([[np.cos(theta)], [np.sin(theta)]]))
    distance = subspace_distance(B, B_hat)
    _require(abs(distance - 0.5) < 1e-12, "rotation by pi/6 should give 0.5")
    rng = np.random.default_rng(2)
    for _ in range(20):
        B, B_hat = random_orthonormal(rng, 6, 2), random_orthonormal(rng, 6, 2)
        gap = abs(subspace_distance(B, B_hat) - subspace_distance_svd(B, B_hat))
        _require(gap < 1e-10, "determinant and SVD distances disagree")
    _require(det_lower_bound_check(B, B).holds, "lower bound fails for identical subspaces")


def _check_projection() -> None:
    B = OrthonormalMatrix(np.array([[1.0], [1.0]]) / np.sqrt(2.0))
    box = BoxDomain.symmetric(2)
    inside = alternating_projection(np.array([1.2]), B, box)
    _require(inside.converged and inside.iterations == 0, "feasible point was not returned unchanged")
    outside = alternating_projection(np.array([1.5]), B, box)
    _require(outside.status == ProjectionStatus.INFEASIBLE_LIMIT, "infeasible target not reported")
    expected = 1.5 - np.sqrt(2.0)
    _require(abs(outside.residual - expected) < 1e-6, f"residual {outside.residual:.6g} != 1.5 - sqrt(2)")
    history = np.array(outside.residual_history)
    _require(np.all(np.diff(history) <= 1e-15), "residual increased")


def _check_weights() -> None:
    weights = epanechnikov_weights(np.array([[0.0], [0.5]]), 0, 1.0)
    _require(np.allclose(weights, [0.75 / 1.3125, 0.5625 / 1.3125]), f"weights {weights}")


def _check_gp_interpolation() -> None:
    rng = np.random.default_rng(3)
    Z = rng.uniform(-1, 1, (20, 2))
    Y = np.sin(3 * Z[:, 0]) + Z[:, 1] ** 2
    model = fit_gp(KernelSpec(KernelFamily.SE, 1.0, np.array([0.5, 0.5])), None, Z, Y, 1e-10)
    pred = predict(model, Z)
    _require(np.max(np.abs(pred.mean - Y)) < 1e-5, "GP does not interpolate")
    _require(np.max(np.sqrt(pred.variance)) < 1e-4, "posterior std too large at training points")


def _check_expected_improvement() -> None:
    x = np.linspace(-5, 5, 101)
    _require(np.allclose(h_func(x) - h_func(-x), x), "h(x) - h(-x) != x")
    ei = expected_improvement(np.linspace(-1, 1, 11), np.linspace(0, 1, 11), 0.0)
    _require(np.all(ei >= 0), "negative EI")


def _check_benchmark() -> None:
    bench = make_embedded_function("quadratic-bowl", 10, 0, "ball")
    x = bench.domain.sample(np.random.default_rng(4), 1)[0]
    w = np.random.default_rng(5).standard_normal(10)
    w -= bench.true_B.lift(bench.true_B.project(w))
    _require(abs(bench(x) - bench(x + w)) < 1e-10, "value changed along a null direction")
    _require(bench.f_max == 0.0, f"f_max {bench.f_max} != 0")


CHECKS: List[Callable[[], None]] = [
    _check_ball_sampling,
    _check_orthonormal,
    _check_subspace_distance,
    _check_projection,
    _check_weights,
    _check_gp_interpolation,
    _check_expected_improvement,
    _check_benchmark,
]


def run_selftest() -> List[CheckResult]:
    """Run every check and log a line per result."""
    results = []
    for check in CHECKS:
        name = check.__name__.replace("_check_", "")
        try:
            check()
            results.append(CheckResult(name, True))
            logger.info(f"✓ {name}")
        except Exception as exc:
            results.append(CheckResult(name, False, str(exc)))
            logger.error(f"✗ {name}: {exc}")
    return results
