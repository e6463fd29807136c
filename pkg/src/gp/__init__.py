from src.gp.hyperparameters import HyperparameterBounds, fit_hyperparameters
from src.gp.kernels import KernelFamily, KernelSpec, kernel_eval, kernel_matrix
from src.gp.model import (
    GpModel,
    PredictiveDistribution,
    fit_gp,
    log_marginal_likelihood,
    posterior,
    predict,
)

__all__ = [
    "HyperparameterBounds",
    "fit_hyperparameters",
    "KernelFamily",
    "KernelSpec",
    "kernel_eval",
    "kernel_matrix",
    "GpModel",
    "PredictiveDistribution",
    "fit_gp",
    "log_marginal_likelihood",
    "posterior",
    "predict",
]
