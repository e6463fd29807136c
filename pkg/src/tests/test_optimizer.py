import os
import sys
import unittest
from unittest import mock

import numpy as np
from pydantic import ValidationError

# Add the project root to sys.path
current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(current_dir))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.errors import DiagnosticUndefinedError, OptimizationAborted, RankDeficiencyError
from src.geometry.domains import BallDomain, BoxDomain
from src.optimizer.base import (
    BudgetSplit,
    OptimizerConfig,
    Phase,
    RunTrace,
    TraceRecord,
    simple_regret,
)
from src.optimizer.concurrent import ConcurrentMaveBO
from src.optimizer.diagnostics import exploration_support_count, log_exploration_support
from src.optimizer.factory import (
    get_optimizer,
    run_cmave_bo,
    run_random_search,
    run_smave_bo,
)
from src.optimizer.random_search import RandomSearch
from src.optimizer.sequential import SequentialMaveBO
from src.tests.test_config import (
    BALL_RADIUS,
    bowl_objective,
    small_optimizer_config,
    unit_vector,
)


def make_trace(ys, stds=None):
    trace = RunTrace("test", 0)
    best = -np.inf
    for index, y in enumerate(ys):
        best = max(best, y)
        std = None if stds is None else stds[index]
        trace.records.append(
            TraceRecord(index + 1, np.zeros(2), y, best, 0.0, Phase.BO, proposal_std=std)
        )
    return trace


class TestBudgetAndRegret(unittest.TestCase):
    def test_budget_split(self):
        split = BudgetSplit(total=5, initial=3)
        self.assertEqual(split.bo_iterations, 2)
        self.assertEqual(split.n1, 1)
        for total, initial in ((5, 2), (5, 5), (4, 6)):
            with self.assertRaises(ValidationError):
                BudgetSplit(total=total, initial=initial)

    def test_simple_regret(self):
        self.assertEqual(simple_regret(make_trace([1.0, 3.0, 2.0]), 5.0), 2.0)
        self.assertEqual(simple_regret(make_trace([-0.5]), 0.0), 0.5)
        with self.assertRaises(ValueError):
            simple_regret(RunTrace("test", 0), 1.0)

    def test_config_validation(self):
        with self.assertRaises(ValidationError):
            small_optimizer_config(D=2, target_dim=3)
        with self.assertRaises(ValidationError):
            OptimizerConfig(budget=BudgetSplit(total=5, initial=3), domain="ball")


class TestRandomSearch(unittest.TestCase):
    def test_single_evaluation(self):
        B = unit_vector(4)
        trace = run_random_search(bowl_objective(B), 0.0, 1, BallDomain(4, BALL_RADIUS), 3)
        self.assertEqual(len(trace), 1)
        record = trace.records[0]
        self.assertEqual(record.best_y, record.y)
        self.assertEqual(record.simple_regret, -record.y)

    def test_samples_stay_in_ball(self):
        trace = run_random_search(bowl_objective(unit_vector(6)), None, 50, BallDomain(6, BALL_RADIUS), 4)
        self.assertTrue(np.all(np.linalg.norm(trace.xs(), axis=1) <= BALL_RADIUS))
        self.assertTrue(all(record.simple_regret is None for record in trace.records))
        self.assertTrue(np.all(np.diff([record.best_y for record in trace.records]) >= 0))

    def test_deterministic(self):
        domain = BallDomain(5, BALL_RADIUS)
        objective = bowl_objective(unit_vector(5))
        first = run_random_search(objective, 0.0, 20, domain, 11)
        second = run_random_search(objective, 0.0, 20, domain, 11)
        np.testing.assert_array_equal(first.xs(), second.xs())
        np.testing.assert_array_equal(first.ys(), second.ys())
        self.assertFalse(np.array_equal(first.xs(), run_random_search(objective, 0.0, 20, domain, 12).xs()))

    def test_non_finite_objective_aborts(self):
        values = iter([1.0, 2.0, np.nan])
        optimizer = RandomSearch(BallDomain(3, 1.0), 0, 5)
        with self.assertRaises(OptimizationAborted) as context:
            optimizer.run(lambda x: next(values))
        self.assertEqual(len(context.exception.trace), 2)


class TestSequentialMaveBO(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.B = unit_vector(10, 0)
        cls.config = small_optimizer_config()
        cls.trace = run_smave_bo(bowl_objective(cls.B), cls.B, 0.0, cls.config)

    def test_trace_length_and_phases(self):
        self.assertEqual(len(self.trace), 24)
        phases = [record.phase for record in self.trace.records]
        self.assertEqual(phases, [Phase.INITIAL] * 16 + [Phase.BO] * 8)
        self.assertEqual([record.iter for record in self.trace.records], list(range(1, 25)))

    def test_best_y_is_running_maximum(self):
        best = np.array([record.best_y for record in self.trace.records])
        np.testing.assert_array_equal(best, np.maximum.accumulate(self.trace.ys()))
        for record in self.trace.records:
            self.assertAlmostEqual(record.simple_regret, -record.best_y)

    def test_proposals_lie_in_the_estimated_span(self):
        for record in self.trace.records[16:]:
            self.assertEqual(record.z.shape, (1,))
            self.assertAlmostEqual(np.linalg.norm(record.x), np.linalg.norm(record.z), places=10)
            self.assertLessEqual(np.linalg.norm(record.x), BALL_RADIUS + 1e-9)
            self.assertIsNotNone(record.proposal_std)
            self.assertIsNone(record.projection_residual)

    def test_delta_only_on_last_initial_record(self):
        with_delta = [record.iter for record in self.trace.records if record.delta_n is not None]
        self.assertEqual(with_delta, [16])
        self.assertTrue(0.0 <= self.trace.records[15].delta_n <= 1.0 + 1e-12)
        self.assertTrue(all(record.z is None for record in self.trace.records[:16]))

    def test_deterministic(self):
        again = run_smave_bo(bowl_objective(self.B), self.B, 0.0, self.config)
        np.testing.assert_array_equal(again.xs(), self.trace.xs())
        np.testing.assert_array_equal(again.ys(), self.trace.ys())

    def test_without_f_max_or_true_basis(self):
        trace = run_smave_bo(bowl_objective(self.B), None, None, small_optimizer_config(total=18))
        self.assertEqual(len(trace), 18)
        self.assertTrue(all(record.simple_regret is None for record in trace.records))
        self.assertTrue(all(record.delta_n is None for record in trace.records))

    def test_box_domain_records_projection_residual(self):
        config = small_optimizer_config(total=19, box=True)
        trace = SequentialMaveBO(config).run(bowl_objective(self.B), self.B, 0.0)
        box = BoxDomain.symmetric(10)
        for record in trace.records[16:]:
            self.assertIsNotNone(record.projection_residual)
            self.assertTrue(box.contains(record.x, tol=1e-12))

    def test_estimation_failure_aborts_with_partial_trace(self):
        with mock.patch(
            "src.optimizer.sequential.estimate_edr", side_effect=RankDeficiencyError("singular")
        ):
            with self.assertRaises(OptimizationAborted) as context:
                run_smave_bo(bowl_objective(self.B), self.B, 0.0, self.config)
        self.assertEqual(len(context.exception.trace), 16)


class TestConcurrentMaveBO(unittest.TestCase):
    def test_delta_on_every_bo_record(self):
        B = unit_vector(8, 2)
        config = small_optimizer_config(D=8, total=19, initial=16)
        trace = run_cmave_bo(bowl_objective(B), B, 0.0, config)
        self.assertEqual(len(trace), 19)
        self.assertTrue(all(record.delta_n is None for record in trace.records[:16]))
        self.assertTrue(all(record.delta_n is not None for record in trace.records[16:]))

    def test_single_bo_step(self):
        B = unit_vector(6, 1)
        trace = ConcurrentMaveBO(small_optimizer_config(D=6, total=13, initial=12)).run(bowl_objective(B))
        self.assertEqual(len(trace), 13)
        self.assertEqual(trace.records[-1].phase, Phase.BO)


    def test_deterministic(self):
        B = unit_vector(6, 0)
        config = small_optimizer_config(D=6, total=15, initial=12)
        first = run_cmave_bo(bowl_objective(B), B, 0.0, config)
        second = run_cmave_bo(bowl_objective(B), B, 0.0, config)
        np.testing.assert_array_equal(first.xs(), second.xs())
        np.testing.assert_array_equal(first.ys(), second.ys())
        self.assertEqual(
            [record.delta_n for record in first.records], [record.delta_n for record in second.records]
        )

    def test_warns_when_first_estimate_is_orthogonal(self):
        B = unit_vector(6, 1)
        config = small_optimizer_config(D=6, total=14, initial=12)
        with mock.patch("src.optimizer.concurrent.subspace_distance", return_value=1.0):
            with self.assertLogs("ConcurrentMaveBO", level="WARNING") as logs:
                run_cmave_bo(bowl_objective(B), B, 0.0, config)
        self.assertEqual(sum("first BO step" in line for line in logs.output), 1)


class TestFactory(unittest.TestCase):
    def test_known_algorithms(self):
        config = small_optimizer_config()
        self.assertIsInstance(get_optimizer("smave", config), SequentialMaveBO)
        self.assertIsInstance(get_optimizer("CMAVE", config), ConcurrentMaveBO)
        self.assertIsInstance(get_optimizer("random", config), RandomSearch)

    def test_unknown_algorithm(self):
        with self.assertRaises(ValueError):
            get_optimizer("rembo", small_optimizer_config())


class TestExplorationSupport(unittest.TestCase):
    def test_count_above_threshold(self):
        trace = make_trace([0.0, 0.0, 0.0], stds=[0.1, 0.3, 0.5])
        # threshold = 1 * (1 / 1) * 1 * 4^-1 = 0.25
        self.assertEqual(exploration_support_count(trace, 4, 1.0, 1, 1.0), 2)
        self.assertEqual(exploration_support_count(trace, 1, 1.0, 1, 1.0), 0)

    def test_logged_levels(self):
        counts = log_exploration_support(make_trace([0.0], stds=[10.0]), 1.0, 2, 0.5)
        self.assertEqual(set(counts), {4, 8, 16})

    def test_undefined_inputs(self):
        trace = make_trace([0.0], stds=[1.0])
        with self.assertRaises(DiagnosticUndefinedError):
            exploration_support_count(trace, 0, 1.0, 1, 1.0)
        with self.assertRaises(DiagnosticUndefinedError):
            exploration_support_count(trace, 4, 1.0, 1, 0.0)


if __name__ == "__main__":
    unittest.main()
