"""
Shared types and the abstract run loop for the optimizers.
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.acquisition.search import AcqConfig, maximize_ei
from src.config import settings
from src.errors import DimensionError, MaveBoError, OptimizationAborted
from src.geometry.domains import BallDomain, BoxDomain, Domain, OrthonormalMatrix
from src.geometry.projection import alternating_projection
from src.gp.hyperparameters import HyperparameterBounds, fit_hyperparameters
from src.gp.kernels import KernelFamily, KernelSpec
from src.gp.model import GpModel, fit_gp, posterior
from src.mave.dataset import MaveConfig

Objective = Callable[[np.ndarray], float]


class Phase(str, Enum):
    INITIAL = "initial"
    BO = "bo"


class BudgetSplit(BaseModel):
    """N total evaluations, the first N0 of them uniform."""

    model_config = ConfigDict(frozen=True)

    total: int
    initial: int

    @model_validator(mode="after")
    def _check_split(self) -> "BudgetSplit":
        if not 3 <= self.initial < self.total:
            raise ValueError(f"budget needs 3 <= N0 < N, got N0={self.initial}, N={self.total}")
        return self

    @property
    def bo_iterations(self) -> int:
        return self.total - self.initial

    @property
    def n1(self) -> int:
        return self.total - self.initial - 1


@dataclass(frozen=True, eq=False)
class TraceRecord:
    iter: int
    x: np.ndarray
    y: float
    best_y: float
    wall_ms: float
    phase: Phase = Phase.INITIAL
    z: Optional[np.ndarray] = None
    simple_regret: Optional[float] = None
    delta_n: Optional[float] = None
    projection_residual: Optional[float] = None
    proposal_std: Optional[float] = None


@dataclass
class RunTrace:
    """Per-evaluation records of a single run; best_y never decreases."""

    algorithm: str
    seed: int
    records: List[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def best_record(self) -> TraceRecord:
        if not self.records:
            raise ValueError("Trace is empty")
        return max(self.records, key=lambda record: record.y)

    def ys(self) -> np.ndarray:
        return np.array([record.y for record in self.records], dtype=float)

    def xs(self) -> np.ndarray:
        return np.array([record.x for record in self.records], dtype=float)


def simple_regret(trace: RunTrace, f_max: float) -> float:
    """r_N = f_max - max_n y_n."""
    if not trace.records:
        raise ValueError("simple_regret needs a non-empty trace")
    return float(f_max - np.max(trace.ys()))


class OptimizerConfig(BaseModel):
    """Settings of a MAVE-BO run."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    budget: BudgetSplit
    domain: Any
    mave: MaveConfig = MaveConfig()
    kernel_family: KernelFamily = KernelFamily.MATERN
    smoothness: Optional[float] = 2.5
    hyperparameter_bounds: HyperparameterBounds = HyperparameterBounds()
    acq: AcqConfig = AcqConfig()
    seed: int = 0
    refit_hyperparams_every: int = Field(5, ge=1)
    cmave_outer_iters: int = Field(10, ge=1)
    reduced_radius: Optional[float] = Field(None, gt=0)
    duplicate_tol: float = Field(1e-10, ge=0)
    # Relative to the reduced radius
    duplicate_step: float = Field(1e-3, gt=0)
    projection_tol: float = Field(settings.PROJECTION_TOL, gt=0)
    projection_max_iter: int = Field(settings.PROJECTION_MAX_ITER, ge=1)

    @field_validator("domain")
    @classmethod
    def _check_domain(cls, value: Any) -> Domain:
        if not isinstance(value, (BallDomain, BoxDomain)):
            raise ValueError(f"domain must be a BallDomain or BoxDomain, got {type(value).__name__}")
        return value

    @model_validator(mode="after")
    def _check_dims(self) -> "OptimizerConfig":
        if self.mave.target_dim > self.domain.dim:
            raise ValueError(
                f"target_dim={self.mave.target_dim} exceeds the domain dimension {self.domain.dim}"
            )
        return self


class BaseOptimizer(ABC):
    """
    Base class for the optimizers.

    Subclasses implement `_run`, which appends one record per objective
    evaluation through `_evaluate`. Library errors raised inside `_run` are
    converted to OptimizationAborted carrying the partial trace.
    """

    name = "base"

    def __init__(self, domain: Domain, seed: int, total: int):
        if total < 1:
            raise ValueError(f"Budget must be at least 1, got {total}")
        self.logger = logging.getLogger(self.__class__.__name__)
        self.domain = domain
        self.seed = seed
        self.total = total

    def run(
        self,
        objective: Objective,
        true_B: Optional[OrthonormalMatrix] = None,
        f_max: Optional[float] = None,
    ) -> RunTrace:
        """
        Optimize the objective over the domain.

        Args:
            objective: Black-box function of a D-vector
            true_B: True EDR basis, enables delta_n in the trace
            f_max: True maximum, enables simple_regret in the trace

        Returns:
            RunTrace with exactly `total` records

        Raises:
            OptimizationAborted: if a numerical step fails
        """
        if true_B is not None and true_B.rows != self.domain.dim:
            raise DimensionError(f"true_B has {true_B.rows} rows, domain has dimension {self.domain.dim}")
        rng = np.random.default_rng(self.seed)
        trace = RunTrace(self.name, self.seed)
        self._objective = objective
        self._f_max = f_max
        self._clock = time.perf_counter()
        try:
            self._run(rng, trace, true_B)
        except OptimizationAborted:
            raise
        except MaveBoError as exc:
            self.logger.error(
                f"{self.name} run (seed {self.seed}) aborted after {len(trace)} evaluations: {exc}"
            )
            raise OptimizationAborted(f"{self.name} run aborted: {exc}", trace) from exc

        best = trace.best_record()
        regret = "" if f_max is None else f", simple regret {f_max - best.y:.6g}"
        self.logger.info(f"{self.name} run (seed {self.seed}) finished: best y {best.y:.6g}{regret}")
        return trace

    @abstractmethod
    def _run(
        self, rng: np.random.Generator, trace: RunTrace, true_B: Optional[OrthonormalMatrix]
    ) -> None:
        pass

    def _evaluate(
        self,
        trace: RunTrace,
        x: np.ndarray,
        phase: Phase,
        z: Optional[np.ndarray] = None,
        delta_n: Optional[float] = None,
        projection_residual: Optional[float] = None,
        proposal_std: Optional[float] = None,
    ) -> float:
        """Evaluate the objective at x and append the record."""
        y = float(self._objective(x))
        if not np.isfinite(y):
            raise OptimizationAborted(f"Objective returned {y} at evaluation {len(trace) + 1}", trace)
        now = time.perf_counter()
        wall_ms = (now - self._clock) * 1000.0
        self._clock = now
        best_y = y if not trace.records else max(trace.records[-1].best_y, y)
        trace.records.append(
            TraceRecord(
                iter=len(trace) + 1,
                x=np.array(x, dtype=float),
                y=y,
                best_y=best_y,
                wall_ms=wall_ms,
                phase=phase,
                z=None if z is None else np.atleast_1d(np.array(z, dtype=float)),
                simple_regret=None if self._f_max is None else float(self._f_max - best_y),
                delta_n=delta_n,
                projection_residual=projection_residual,
                proposal_std=proposal_std,
            )
        )
        return y

    def _sample_domain(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.domain.sample(rng, n)


class MaveBoOptimizer(BaseOptimizer):
    """Pieces shared by the sequential and concurrent MAVE-BO loops."""

    def __init__(self, config: OptimizerConfig):
        super().__init__(config.domain, config.seed, config.budget.total)
        self.config = config
        self._kernel: Optional[KernelSpec] = None
        self.last_radius: Optional[float] = None

    @property
    def target_dim(self) -> int:
        return self.config.mave.target_dim

    def _initial_design(self, rng: np.random.Generator, trace: RunTrace) -> Tuple[np.ndarray, np.ndarray]:
        n0 = self.config.budget.initial
        X = self._sample_domain(rng, n0)
        Y = np.array([self._evaluate(trace, x, Phase.INITIAL) for x in X])
        self.logger.info(f"Initial design sampled: {n0} points in dimension {self.domain.dim}")
        return X, Y

    def _reduced_radius(self, Z: np.ndarray) -> float:
        if isinstance(self.domain, BallDomain):
            radius = self.config.reduced_radius or self.domain.radius
            return min(radius, self.domain.radius)
        if self.config.reduced_radius is not None:
            return self.config.reduced_radius
        return max(settings.BALL_RADIUS, float(np.max(np.linalg.norm(Z, axis=1))))

    def _surrogate(self, Z: np.ndarray, Y: np.ndarray, bo_step: int, rng: np.random.Generator) -> GpModel:
        """Fit the GP, refitting hyperparameters every refit_hyperparams_every BO steps."""
        if self._kernel is None or bo_step % self.config.refit_hyperparams_every == 0:
            self._kernel = fit_hyperparameters(
                Z,
                Y,
                self.config.kernel_family,
                self.config.hyperparameter_bounds,
                rng,
                self.config.smoothness,
            )
            self.logger.info(
                f"Hyperparameters refitted at BO step {bo_step}: tau2={self._kernel.signal_variance:.4g}, "
                f"min lengthscale={float(np.min(self._kernel.lengthscales)):.4g}"
            )
        return fit_gp(self._kernel, None, Z, Y)

    def _deduplicate(self, z: np.ndarray, Z: np.ndarray, radius: float, rng: np.random.Generator) -> np.ndarray:
        gaps = np.linalg.norm(Z - z, axis=1)
        if np.min(gaps) > self.config.duplicate_tol:
            return z
        step = BallDomain(z.shape[0], self.config.duplicate_step * radius).sample(rng, 1)[0]
        moved = z + step
        norm = np.linalg.norm(moved)
        if norm > radius:
            moved *= radius / norm
        self.logger.debug(f"Proposal duplicates a training point, perturbed by {np.linalg.norm(step):.2e}")
        return moved

    def _back_map(self, z: np.ndarray, B_hat: OrthonormalMatrix) -> Tuple[np.ndarray, np.ndarray, Optional[float]]:
        """Map a reduced proposal into the domain: (x, B_hat^T x, projection residual)."""
        if isinstance(self.domain, BallDomain):
            return B_hat.lift(z), z, None
        result = alternating_projection(
            z, B_hat, self.domain, self.config.projection_tol, self.config.projection_max_iter
        )
        if not result.converged:
            self.logger.warning(
                f"Back-projection infeasible (residual {result.residual:.3e}), "
                "evaluating the nearest box point"
            )
        return result.point, B_hat.project(result.point), result.residual

    def _bo_step(
        self,
        trace: RunTrace,
        X: np.ndarray,
        Y: np.ndarray,
        B_hat: OrthonormalMatrix,
        bo_step: int,
        rng: np.random.Generator,
        delta_n: Optional[float] = None,
    ) -> Tuple[np.ndarray, float]:
        """One EI proposal in span(B_hat) followed by an evaluation; returns (x, y)."""
        Z = B_hat.project(X)
        radius = self._reduced_radius(Z)
        self.last_radius = radius
        model = self._surrogate(Z, Y, bo_step, rng)
        best = int(np.argmax(Y))
        reduced = BallDomain(B_hat.cols, radius)
        z, ei = maximize_ei(model, float(Y[best]), reduced, self.config.acq, rng, Z[best])
        z = self._deduplicate(z, Z, radius, rng)
        proposal_std = float(np.sqrt(posterior(model, z).variance))
        x, z_actual, residual = self._back_map(z, B_hat)
        self.logger.debug(f"BO step {bo_step}: ei={ei:.4e}, std={proposal_std:.4e}")
        y = self._evaluate(
            trace,
            x,
            Phase.BO,
            z=z_actual,
            delta_n=delta_n,
            projection_residual=residual,
            proposal_std=proposal_std,
        )
        return x, y

    def _mark_initial_delta(self, trace: RunTrace, delta: float) -> None:
        trace.records[-1] = replace(trace.records[-1], delta_n=delta)

