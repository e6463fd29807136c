from typing import Optional

import numpy as np

from src.geometry.domains import OrthonormalMatrix
from src.optimizer.base import BaseOptimizer, Phase, RunTrace


class RandomSearch(BaseOptimizer):
    """Uniform sampling baseline: every evaluation is an independent draw from the domain."""

    name = "random"

    def _run(
        self, rng: np.random.Generator, trace: RunTrace, true_B: Optional[OrthonormalMatrix]
    ) -> None:
        for x in self._sample_domain(rng, self.total):
            self._evaluate(trace, x, Phase.INITIAL)
