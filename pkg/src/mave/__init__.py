from src.mave.dataset import Dataset, MaveConfig
from src.mave.estimator import (
    EdrEstimate,
    ObjectiveStep,
    estimate_edr,
    mave_objective,
    update_directions,
)
from src.mave.smoothing import (
    LocalFit,
    LocalFits,
    epanechnikov_weights,
    fit_local_linear,
    local_linear_fit,
    weight_matrix,
)

__all__ = [
    "Dataset",
    "MaveConfig",
    "EdrEstimate",
    "ObjectiveStep",
    "estimate_edr",
    "mave_objective",
    "update_directions",
    "LocalFit",
    "LocalFits",
    "epanechnikov_weights",
    "fit_local_linear",
    "local_linear_fit",
    "weight_matrix",
]
