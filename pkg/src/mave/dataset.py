"""
Paired samples {(x_i, y_i)} used to estimate the EDR directions.
"""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.errors import DimensionError


@dataclass(frozen=True, eq=False)
class Dataset:
    """Inputs (n x D) and scalar responses (n,), both finite."""

    inputs: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=float, copy=True)
        responses = np.array(self.responses, dtype=float, copy=True).reshape(-1)
        if inputs.ndim == 1:
            inputs = inputs[None, :]
        if inputs.ndim != 2 or inputs.shape[0] != responses.shape[0]:
            raise DimensionError(
                f"Inputs {inputs.shape} and responses {responses.shape} do not pair up"
            )
        if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(responses))):
            raise ValueError("Dataset contains non-finite entries")
        inputs.setflags(write=False)
        responses.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "responses", responses)

    @property
    def size(self) -> int:
        return int(self.inputs.shape[0])

    @property
    def dim(self) -> int:
        return int(self.inputs.shape[1])

    def augment(self, x: np.ndarray, y: float) -> "Dataset":
        """Return a new dataset with one more sample."""
        return Dataset(
            np.vstack([self.inputs, np.asarray(x, dtype=float)[None, :]]),
            np.append(self.responses, float(y)),
        )


class MaveConfig(BaseModel):
    """Controls for the MAVE direction estimate."""

    model_config = ConfigDict(frozen=True)

    target_dim: int = Field(1, ge=1)
    # h = bandwidth_scale * n^(-1/(D+4))
    bandwidth_scale: float = Field(2.0, gt=0)
    max_outer_iters: int = Field(50, ge=1)
    # Convergence threshold on ||B_new B_new^T - B B^T||_F
    tol: float = Field(1e-4, gt=0)
    n_restarts: int = Field(5, ge=1)
    # Relative ridge, scaled by the trace of each normal matrix
    ridge: float = Field(1e-8, ge=0)
    max_bandwidth_inflations: int = Field(10, ge=0)
    bandwidth_inflation: float = Field(1.5, gt=1)

    def bandwidth(self, n: int, D: int) -> float:
        return self.bandwidth_scale * float(n) ** (-1.0 / (D + 4))
