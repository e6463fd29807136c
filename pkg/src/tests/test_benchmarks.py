"""
Trend experiments at desk scale. They take minutes, so they only run when
HDBO_RUN_SLOW=1.
"""

import os
import sys
import unittest

import numpy as np

# Add the project root to sys.path
current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(current_dir))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.bench.experiment import ExperimentConfig, run_experiment
from src.config import settings
from src.geometry.domains import subspace_distance
from src.mave.dataset import MaveConfig
from src.mave.estimator import estimate_edr
from src.tests.test_config import rng, single_index_dataset


def quadratic_link(t):
    return t**2 + 0.5 * t


def edr_distance(n: int, seed: int) -> float:
    data, beta = single_index_dataset(n, 10, quadratic_link, seed=seed)
    estimate = estimate_edr(data, MaveConfig(target_dim=1), rng(seed))
    for step in estimate.history:
        assert step.after <= step.before + 1e-9
    return subspace_distance(beta, estimate.B_hat)


@unittest.skipUnless(settings.RUN_SLOW_TESTS, "set HDBO_RUN_SLOW=1 to run trend experiments")
class TestMaveTrends(unittest.TestCase):
    def test_recovery_at_500_samples(self):
        distances = [edr_distance(500, seed) for seed in range(10)]
        self.assertLess(np.median(distances), 0.15)

    def test_distance_shrinks_with_sample_size(self):
        small = np.median([edr_distance(125, seed) for seed in range(10)])
        large = np.median([edr_distance(1000, seed) for seed in range(10)])
        self.assertLess(large, small)


@unittest.skipUnless(settings.RUN_SLOW_TESTS, "set HDBO_RUN_SLOW=1 to run trend experiments")
class TestEndToEnd(unittest.TestCase):
    def bowl_config(self, algorithm: str, seeds):
        return ExperimentConfig(
            function="quadratic-bowl",
            dim=20,
            effective_dim=2,
            algorithm=algorithm,
            seeds=list(seeds),
            budget=100,
            n0=60,
        )

    def test_smave_beats_random_search(self):
        smave = run_experiment(self.bowl_config("smave", range(20)))
        random = run_experiment(self.bowl_config("random", range(20)))
        self.assertLess(smave.median, random.median)
        for trace in smave.traces:
            self.assertEqual(len(trace), 100)
            best = np.array([record.best_y for record in trace.records])
            self.assertTrue(np.all(np.diff(best) >= 0))

    def test_cmave_tracks_the_subspace(self):
        summary = run_experiment(self.bowl_config("cmave", range(5)))
        improved = 0
        for trace in summary.traces:
            self.assertEqual(len(trace), 100)
            deltas = [record.delta_n for record in trace.records[60:]]
            self.assertTrue(all(delta is not None for delta in deltas))
            improved += deltas[-1] <= deltas[0]
        self.assertGreaterEqual(improved, 3)


if __name__ == "__main__":
    unittest.main()
