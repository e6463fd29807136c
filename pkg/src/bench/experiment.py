"""
Experiment orchestration: one optimizer run per seed, executed on a thread
pool, then written once in seed order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from tqdm import tqdm

from src.acquisition.search import AcqConfig
from src.bench.emitters import emit_experiment, ensure_writable
from src.bench.functions import LINKS, make_embedded_function
from src.config import settings
from src.errors import OptimizationAborted
from src.geometry.domains import Domain
from src.gp.kernels import KernelFamily
from src.mave.dataset import MaveConfig
from src.optimizer.base import BudgetSplit, OptimizerConfig, RunTrace, simple_regret
from src.optimizer.factory import get_optimizer, run_random_search

logger = logging.getLogger(__name__)


def default_n0(budget: int) -> int:
    """60 % of the budget, kept inside [3, budget - 1]."""
    return int(min(max(round(0.6 * budget), 3), budget - 1))


class ExperimentConfig(BaseModel):
    """A benchmark function, an algorithm and the seeds to run it with."""

    model_config = ConfigDict(frozen=True)

    function: str
    dim: int = Field(ge=1)
    effective_dim: Optional[int] = Field(None, ge=1)
    algorithm: Literal["smave", "cmave", "random"] = "smave"
    seeds: List[int] = Field(min_length=1)
    budget: int = Field(settings.DEFAULT_BUDGET, ge=1)
    n0: Optional[int] = None
    kernel: KernelFamily = KernelFamily.MATERN
    smoothness: float = 2.5
    edr_dim: Optional[int] = Field(None, ge=1)
    domain: Literal["ball", "box"] = "ball"
    output_path: Optional[Path] = None
    output_format: Literal["csv", "json"] = "csv"
    acq: AcqConfig = AcqConfig()

    @field_validator("function")
    @classmethod
    def _known_function(cls, value: str) -> str:
        if value not in LINKS:
            raise ValueError(f"unknown function {value!r}; expected one of {', '.join(LINKS)}")
        return value

    @field_validator("seeds")
    @classmethod
    def _distinct_seeds(cls, value: List[int]) -> List[int]:
        if len(set(value)) != len(value):
            raise ValueError("seeds must be distinct")
        return value

    @field_validator("smoothness")
    @classmethod
    def _matern_smoothness(cls, value: float) -> float:
        if value not in (0.5, 1.5, 2.5):
            raise ValueError(f"smoothness must be 0.5, 1.5 or 2.5, got {value}")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        # An explicit n0 is checked for every algorithm, random search included
        if self.n0 is not None or self.algorithm != "random":
            n0 = default_n0(self.budget) if self.n0 is None else self.n0
            if not 3 <= n0 < self.budget:
                raise ValueError(f"n0 must satisfy 3 <= n0 < budget, got n0={n0}, budget={self.budget}")
        link = LINKS[self.function]
        d_e = self.effective_dim or link.effective_dim
        if link.fixed_dim and d_e != link.effective_dim:
            raise ValueError(f"effective_dim of {self.function} is fixed at {link.effective_dim}, got {d_e}")
        if d_e > self.dim:
            raise ValueError(f"dim={self.dim} is smaller than the effective dimension {d_e}")
        if self.edr_dim is not None and self.edr_dim > self.dim:
            raise ValueError(f"edr_dim={self.edr_dim} exceeds dim={self.dim}")
        return self

    def budget_split(self) -> BudgetSplit:
        n0 = default_n0(self.budget) if self.n0 is None else self.n0
        return BudgetSplit(total=self.budget, initial=n0)

    def optimizer_config(self, domain: Domain, edr_dim: int, seed: int) -> OptimizerConfig:
        return OptimizerConfig(
            budget=self.budget_split(),
            domain=domain,
            mave=MaveConfig(target_dim=edr_dim),
            kernel_family=self.kernel,
            smoothness=self.smoothness,
            acq=self.acq,
            seed=seed,
        )

    def describe(self) -> Dict[str, Any]:
        data = self.model_dump(mode="json", exclude={"acq"})
        data["n0"] = None if self.algorithm == "random" else self.budget_split().initial
        return data


@dataclass
class ExperimentSummary:
    """Final simple regrets per seed with their median and quartiles."""

    final_regrets: Dict[int, float]
    median: float
    q1: float
    q3: float
    traces: List[RunTrace] = field(default_factory=list)

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_seeds": len(self.final_regrets),
            "final_regrets": {str(seed): regret for seed, regret in self.final_regrets.items()},
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "iqr": self.iqr,
        }


def run_single(config: ExperimentConfig, seed: int) -> Tuple[RunTrace, float]:
    """Run the configured algorithm on the benchmark built from this seed; returns (trace, f_max)."""
    bench = make_embedded_function(
        config.function, config.dim, seed, config.domain, config.effective_dim
    )
    if config.algorithm == "random":
        return run_random_search(bench, bench.f_max, config.budget, bench.domain, seed), bench.f_max
    edr_dim = min(config.edr_dim or bench.effective_dim, config.dim)
    optimizer = get_optimizer(config.algorithm, config.optimizer_config(bench.domain, edr_dim, seed))
    return optimizer.run(bench, bench.true_B, bench.f_max), bench.f_max


def summarize(traces: List[RunTrace], f_max_by_seed: Dict[int, float]) -> ExperimentSummary:
    regrets = {trace.seed: simple_regret(trace, f_max_by_seed[trace.seed]) for trace in traces}
    values = np.array(list(regrets.values()), dtype=float)
    q1, median, q3 = np.percentile(values, [25, 50, 75])
    return ExperimentSummary(regrets, float(median), float(q1), float(q3), list(traces))


def run_experiment(config: ExperimentConfig) -> ExperimentSummary:
    """
    Run every seed and write the traces.

    Args:
        config: Experiment settings

    Returns:
        ExperimentSummary over the seeds

    Raises:
        ExperimentIOError: if the output location is not writable (checked before any run)
        OptimizationAborted: if a run fails
    """
    output = None
    if config.output_path is not None:
        output = ensure_writable(config.output_path)

    # Builds the f_max cache once, before the workers need it
    make_embedded_function(config.function, config.dim, config.seeds[0], config.domain, config.effective_dim)

    workers = min(settings.worker_count(), len(config.seeds))
    logger.info(
        f"Running {config.algorithm} on {config.function} (D={config.dim}) "
        f"for {len(config.seeds)} seeds with {workers} workers"
    )
    traces: Dict[int, RunTrace] = {}
    f_max: Dict[int, float] = {}
    failures: Dict[int, OptimizationAborted] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(run_single, config, seed): seed for seed in config.seeds}
        for future in tqdm(as_completed(futures), total=len(futures), desc="seeds"):
            seed = futures[future]
            try:
                traces[seed], f_max[seed] = future.result()
            except OptimizationAborted as exc:
                failures[seed] = exc
    if failures:
        seed = min(failures)
        logger.error(f"{len(failures)} of {len(config.seeds)} runs aborted (first seed {seed})")
        raise failures[seed]

    ordered = [traces[seed] for seed in config.seeds]
    summary = summarize(ordered, f_max)
    logger.info(
        f"Final simple regret: median {summary.median:.4g}, IQR [{summary.q1:.4g}, {summary.q3:.4g}]"
    )
    if output is not None:
        emit_experiment(ordered, config.output_format, output, config.describe(), summary.to_dict())
    return summary
