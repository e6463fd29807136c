from typing import Dict, Optional, Type

from src.geometry.domains import Domain, OrthonormalMatrix
from src.optimizer.base import BaseOptimizer, MaveBoOptimizer, Objective, OptimizerConfig, RunTrace
from src.optimizer.concurrent import ConcurrentMaveBO
from src.optimizer.random_search import RandomSearch
from src.optimizer.sequential import SequentialMaveBO

ALGORITHMS = ("smave", "cmave", "random")


class OptimizerFactory:
    """Factory class for creating optimizers by algorithm name."""

    _mave_optimizers: Dict[str, Type[MaveBoOptimizer]] = {
        "smave": SequentialMaveBO,
        "cmave": ConcurrentMaveBO,
    }

    @staticmethod
    def get_optimizer(algorithm: str, config: OptimizerConfig) -> BaseOptimizer:
        """
        Get the optimizer for an algorithm name.

        Args:
            algorithm: One of "smave", "cmave", "random" (case-insensitive)
            config: Run settings; random search uses only domain, seed and total budget

        Returns:
            An optimizer instance

        Raises:
            ValueError: for an unknown algorithm
        """
        key = str(algorithm).lower()
        if key == "random":
            return RandomSearch(config.domain, config.seed, config.budget.total)
        if key not in OptimizerFactory._mave_optimizers:
            raise ValueError(f"Unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")
        return OptimizerFactory._mave_optimizers[key](config)


def get_optimizer(algorithm: str, config: OptimizerConfig) -> BaseOptimizer:
    return OptimizerFactory.get_optimizer(algorithm, config)


def run_smave_bo(
    objective: Objective,
    true_B: Optional[OrthonormalMatrix],
    f_max: Optional[float],
    config: OptimizerConfig,
) -> RunTrace:
    """Sequential MAVE-BO: one EDR estimate from the initial design."""
    return SequentialMaveBO(config).run(objective, true_B, f_max)


def run_cmave_bo(
    objective: Objective,
    true_B: Optional[OrthonormalMatrix],
    f_max: Optional[float],
    config: OptimizerConfig,
) -> RunTrace:
    """Concurrent MAVE-BO: the EDR estimate is refreshed before every proposal."""
    return ConcurrentMaveBO(config).run(objective, true_B, f_max)


def run_random_search(
    objective: Objective, f_max: Optional[float], N: int, domain: Domain, seed: int
) -> RunTrace:
    return RandomSearch(domain, seed, N).run(objective, None, f_max)
