"""
Synthetic embedded benchmarks, experiment orchestration and result emission.
"""

from src.bench.emitters import emit_experiment, emit_trace
from src.bench.experiment import ExperimentConfig, ExperimentSummary, run_experiment
from src.bench.functions import BenchmarkFunction, make_embedded_function

__all__ = [
    "BenchmarkFunction",
    "ExperimentConfig",
    "ExperimentSummary",
    "emit_experiment",
    "emit_trace",
    "make_embedded_function",
    "run_experiment",
]
