"""
Synthetic benchmark functions f(x) = g(B^T x) with a known EDR basis B.

The reduced coordinates u = B^T x are affinely mapped onto the native box of
the link function g. Ball domains use u directly; box domains clamp u to the
cube [-1, 1]^{d_e} first.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from src.config import settings
from src.errors import DimensionError
from src.geometry.domains import BallDomain, BoxDomain, Domain, OrthonormalMatrix, random_orthonormal
from src.geometry.projection import alternating_projection

logger = logging.getLogger(__name__)

DOMAIN_KINDS = ("ball", "box")

HARTMANN3_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
HARTMANN3_A = np.array(
    [
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
    ]
)
HARTMANN3_P = 1e-4 * np.array(
    [
        [3689, 1170, 2673],
        [4699, 4387, 7470],
        [1091, 8732, 5547],
        [381, 5743, 8828],
    ]
)


def quadratic_bowl(u: np.ndarray) -> np.ndarray:
    """g(u) = -||u||^2, maximum 0 at the origin."""
    u = np.asarray(u, dtype=float)
    return -np.sum(u**2, axis=-1)


def branin(x: np.ndarray) -> np.ndarray:
    """Branin-Hoo on [-5, 10] x [0, 15]; global minimum 0.397887."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    b = 5.1 / (4.0 * np.pi**2)
    c = 5.0 / np.pi
    t = 1.0 / (8.0 * np.pi)
    return (x2 - b * x1**2 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * np.cos(x1) + 10.0


def hartmann3(x: np.ndarray) -> np.ndarray:
    """Hartmann 3-D on [0, 1]^3; global minimum -3.86278."""
    x = np.asarray(x, dtype=float)
    inner = np.sum(HARTMANN3_A * (x[..., None, :] - HARTMANN3_P) ** 2, axis=-1)
    return -np.sum(HARTMANN3_ALPHA * np.exp(-inner), axis=-1)


@dataclass(frozen=True)
class LinkSpec:
    """A link function with its native box and default effective dimension."""

    native: Callable[[np.ndarray], np.ndarray]
    effective_dim: int
    lower: Optional[Tuple[float, ...]] = None
    upper: Optional[Tuple[float, ...]] = None
    fixed_dim: bool = True


LINKS: Dict[str, LinkSpec] = {
    "quadratic-bowl": LinkSpec(quadratic_bowl, 2, fixed_dim=False),
    "branin": LinkSpec(branin, 2, (-5.0, 0.0), (10.0, 15.0)),
    "hartmann3": LinkSpec(hartmann3, 3, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
}


def reduced_link(u: np.ndarray, g_name: str, half_width: float, clamp: bool) -> np.ndarray:
    """
    Evaluate the link at reduced coordinates u in [-half_width, half_width]^{d_e}.

    Args:
        u: Reduced coordinates, shape (..., d_e)
        g_name: Link name
        half_width: Half-width of the cube mapped onto the native box
        clamp: Clamp u to the cube before mapping

    Returns:
        Link values to be maximized
    """
    spec = LINKS[g_name]
    u = np.asarray(u, dtype=float)
    if clamp:
        u = np.clip(u, -half_width, half_width)
    if spec.lower is None:
        return spec.native(u)
    lower = np.asarray(spec.lower)
    upper = np.asarray(spec.upper)
    native = lower + (u + half_width) / (2.0 * half_width) * (upper - lower)
    # Native links are minimized
    return -spec.native(native)


@dataclass(frozen=True, eq=False)
class BenchmarkFunction:
    name: str
    dim: int
    effective_dim: int
    true_B: OrthonormalMatrix
    link: Callable[[np.ndarray], np.ndarray]
    f_max: float
    domain: Domain

    def __call__(self, x: np.ndarray) -> float:
        return float(self.link(self.true_B.project(np.asarray(x, dtype=float))))

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.link(self.true_B.project(np.atleast_2d(X))), dtype=float)


def _domain_for(domain_kind: str, D: int) -> Domain:
    if domain_kind == "ball":
        return BallDomain(D, settings.BALL_RADIUS)
    if domain_kind == "box":
        return BoxDomain.symmetric(D, settings.BOX_HALF_WIDTH)
    raise ValueError(f"Unknown domain kind {domain_kind!r}; expected one of {DOMAIN_KINDS}")


@lru_cache(maxsize=None)
def scan_maximum(g_name: str, d_e: int, domain_kind: str, half_width: float) -> float:
    """
    Maximum of the reduced link over its reachable reduced domain.

    An unscrambled Sobol scan of 2^FMAX_SCAN_LOG2 points (restricted to the
    ball for ball domains) is polished with SLSQP from the best scanned point.
    """
    if g_name == "quadratic-bowl":
        return 0.0
    clamp = domain_kind == "box"
    g = partial(reduced_link, g_name=g_name, half_width=half_width, clamp=clamp)

    sampler = qmc.Sobol(d=d_e, scramble=False)
    points = qmc.scale(sampler.random_base2(settings.FMAX_SCAN_LOG2), -half_width, half_width)
    if domain_kind == "ball":
        points = points[np.sum(points**2, axis=1) <= half_width**2]
    values = g(points)
    best = int(np.argmax(values))
    start, best_value = points[best], float(values[best])

    constraints = []
    if domain_kind == "ball":
        constraints.append({"type": "ineq", "fun": lambda u: half_width**2 - float(np.sum(u**2))})
    result = minimize(
        lambda u: -float(g(u)),
        start,
        method="SLSQP",
        bounds=[(-half_width, half_width)] * d_e,
        constraints=constraints,
    )
    polished = result.x
    feasible = np.all(np.abs(polished) <= half_width + 1e-12) and (
        domain_kind != "ball" or np.sum(polished**2) <= half_width**2 + 1e-12
    )
    if feasible and -result.fun > best_value:
        best_value = float(-result.fun)
    logger.debug(f"f_max for {g_name} (d_e={d_e}, {domain_kind}): {best_value:.6f}")
    return best_value


def _check_corners(true_B: OrthonormalMatrix, box: BoxDomain) -> None:
    d_e = true_B.cols
    corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * d_e, indexing="ij")).reshape(d_e, -1).T
    unreachable = [
        corner for corner in corners if not alternating_projection(corner, true_B, box).converged
    ]
    if unreachable:
        logger.warning(
            f"{len(unreachable)} of {len(corners)} reduced cube corners are not reachable from the box"
        )


def make_embedded_function(
    g_name: str,
    D: int,
    seed: int,
    domain_kind: str = "ball",
    effective_dim: Optional[int] = None,
) -> BenchmarkFunction:
    """
    Build f(x) = g(B^T x) with a Haar-random B.

    Args:
        g_name: "quadratic-bowl", "branin" or "hartmann3"
        D: Ambient dimension
        seed: Seed for the random basis
        domain_kind: "ball" or "box"
        effective_dim: Override d_e (quadratic bowl only)

    Returns:
        BenchmarkFunction with its f_max

    Raises:
        DimensionError: if D < d_e
    """
    if g_name not in LINKS:
        raise ValueError(f"Unknown function {g_name!r}; expected one of {', '.join(LINKS)}")
    spec = LINKS[g_name]
    d_e = spec.effective_dim if effective_dim is None else int(effective_dim)
    if spec.fixed_dim and d_e != spec.effective_dim:
        raise DimensionError(f"{g_name} has effective dimension {spec.effective_dim}, got {d_e}")
    if d_e < 1:
        raise DimensionError(f"Effective dimension must be >= 1, got {d_e}")
    if D < d_e:
        raise DimensionError(f"{g_name} needs D >= {d_e}, got D={D}")

    domain = _domain_for(domain_kind, D)
    true_B = random_orthonormal(np.random.default_rng(seed), D, d_e)
    if domain_kind == "box":
        half_width = settings.BOX_HALF_WIDTH
        _check_corners(true_B, domain)
    else:
        half_width = domain.radius

    link = partial(reduced_link, g_name=g_name, half_width=half_width, clamp=domain_kind == "box")
    f_max = scan_maximum(g_name, d_e, domain_kind, half_width)
    return BenchmarkFunction(g_name, D, d_e, true_B, link, f_max, domain)
