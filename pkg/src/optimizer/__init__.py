from src.optimizer.base import (
    BaseOptimizer,
    BudgetSplit,
    OptimizerConfig,
    Phase,
    RunTrace,
    TraceRecord,
    simple_regret,
)
from src.optimizer.concurrent import ConcurrentMaveBO
from src.optimizer.diagnostics import exploration_support_count
from src.optimizer.factory import (
    ALGORITHMS,
    OptimizerFactory,
    get_optimizer,
    run_cmave_bo,
    run_random_search,
    run_smave_bo,
)
from src.optimizer.random_search import RandomSearch
from src.optimizer.sequential import SequentialMaveBO

__all__ = [
    "ALGORITHMS",
    "BaseOptimizer",
    "BudgetSplit",
    "ConcurrentMaveBO",
    "OptimizerConfig",
    "OptimizerFactory",
    "Phase",
    "RandomSearch",
    "RunTrace",
    "SequentialMaveBO",
    "TraceRecord",
    "exploration_support_count",
    "get_optimizer",
    "run_cmave_bo",
    "run_random_search",
    "run_smave_bo",
    "simple_regret",
]
