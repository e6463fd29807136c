"""
Concurrent MAVE-BO: re-estimate the EDR space from all data before every
proposal and re-project the whole history onto it.
"""

from typing import Optional

import numpy as np

from src.geometry.domains import OrthonormalMatrix, subspace_distance
from src.mave.dataset import Dataset
from src.mave.estimator import estimate_edr
from src.optimizer.base import MaveBoOptimizer, RunTrace
from src.optimizer.diagnostics import log_exploration_support


class ConcurrentMaveBO(MaveBoOptimizer):
    name = "cmave"

    def _run(
        self, rng: np.random.Generator, trace: RunTrace, true_B: Optional[OrthonormalMatrix]
    ) -> None:
        X, Y = self._initial_design(rng, trace)
        warm_config = self.config.mave.model_copy(
            update={"max_outer_iters": self.config.cmave_outer_iters, "n_restarts": 1}
        )

        B_hat = None
        for step in range(self.config.budget.bo_iterations):
            if B_hat is None:
                estimate = estimate_edr(Dataset(X, Y), self.config.mave, rng)
            else:
                estimate = estimate_edr(Dataset(X, Y), warm_config, rng, initial=B_hat)
            B_hat = estimate.B_hat

            delta = None
            if true_B is not None:
                delta = subspace_distance(true_B, B_hat)
                self.logger.debug(f"BO step {step}: subspace distance {delta:.4f}")
                if step == 0 and delta >= 1.0:
                    self.logger.warning(
                        f"Subspace distance {delta:.4f} >= 1 at the first BO step; "
                        "the regret guarantee does not apply"
                    )

            x, y = self._bo_step(trace, X, Y, B_hat, step, rng, delta_n=delta)
            X = np.vstack([X, x])
            Y = np.append(Y, y)

        log_exploration_support(
            trace, self.last_radius, B_hat.cols, float(np.min(self._kernel.lengthscales))
        )
