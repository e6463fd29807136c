import os
import sys
import unittest
from unittest import mock

import numpy as np
from scipy.stats import multivariate_normal

# Add the project root to sys.path
current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(current_dir))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.errors import DimensionError, IllConditionedError
from src.gp.hyperparameters import HyperparameterBounds, fit_hyperparameters, heuristic_start
from src.gp.kernels import KernelFamily, KernelSpec, kernel_eval, kernel_matrix
from src.gp.model import fit_gp, log_marginal_likelihood, posterior, predict
from src.tests.test_config import rng

ALL_KERNELS = [
    KernelSpec(KernelFamily.SE, 2.0, [0.5, 1.5]),
    KernelSpec(KernelFamily.MATERN, 2.0, [0.5, 1.5], 0.5),
    KernelSpec(KernelFamily.MATERN, 2.0, [0.5, 1.5], 1.5),
    KernelSpec(KernelFamily.MATERN, 2.0, [0.5, 1.5], 2.5),
]


def toy_data(n: int = 12, seed: int = 21):
    generator = rng(seed)
    Z = generator.uniform(-1, 1, (n, 2))
    Y = np.sin(3.0 * Z[:, 0]) + Z[:, 1] ** 2
    return Z, Y


class TestKernels(unittest.TestCase):
    def test_diagonal_is_signal_variance(self):
        z = np.array([0.3, -0.7])
        for spec in ALL_KERNELS:
            self.assertAlmostEqual(kernel_eval(spec, z, z), 2.0)

    def test_matrices_are_symmetric_psd(self):
        Z, _ = toy_data(20)
        for spec in ALL_KERNELS:
            K = kernel_matrix(spec, Z, Z)
            np.testing.assert_allclose(K, K.T)
            self.assertGreater(np.linalg.eigvalsh(K).min(), -1e-10)

    def test_decays_with_distance(self):
        spec = ALL_KERNELS[3]
        origin = np.zeros(2)
        near = kernel_eval(spec, origin, np.array([0.1, 0.0]))
        far = kernel_eval(spec, origin, np.array([1.0, 0.0]))
        self.assertGreater(near, far)
        self.assertGreater(far, 0.0)

    def test_default_smoothness(self):
        self.assertEqual(KernelSpec(KernelFamily.MATERN, 1.0, [1.0]).smoothness, 2.5)
        self.assertIsNone(KernelSpec(KernelFamily.SE, 1.0, [1.0]).smoothness)

    def test_invalid_parameters(self):
        with self.assertRaises(ValueError):
            KernelSpec(KernelFamily.SE, 0.0, [1.0])
        with self.assertRaises(ValueError):
            KernelSpec(KernelFamily.SE, 1.0, [1.0, -1.0])
        with self.assertRaises(ValueError):
            KernelSpec(KernelFamily.MATERN, 1.0, [1.0], 2.0)

    def test_unit_distance_values(self):
        origin, one = np.zeros(1), np.ones(1)
        se = KernelSpec(KernelFamily.SE, 1.0, [1.0])
        self.assertAlmostEqual(kernel_eval(se, origin, one), np.exp(-0.5), places=12)
        exponential = KernelSpec(KernelFamily.MATERN, 1.0, [1.0], 0.5)
        self.assertAlmostEqual(kernel_eval(exponential, origin, one), np.exp(-1.0), places=12)
        matern32 = KernelSpec(KernelFamily.MATERN, 1.0, [1.0], 1.5)
        expected = (1.0 + np.sqrt(3.0)) * np.exp(-np.sqrt(3.0))
        self.assertAlmostEqual(kernel_eval(matern32, origin, one), expected, places=12)
        matern52 = KernelSpec(KernelFamily.MATERN, 1.0, [1.0], 2.5)
        expected = (1.0 + np.sqrt(5.0) + 5.0 / 3.0) * np.exp(-np.sqrt(5.0))
        self.assertAlmostEqual(kernel_eval(matern52, origin, one), expected, places=12)

    def test_lengthscale_scales_distance(self):
        spec = KernelSpec(KernelFamily.SE, 3.0, [2.0, 0.5])
        value = kernel_eval(spec, np.zeros(2), np.array([2.0, 0.5]))
        self.assertAlmostEqual(value, 3.0 * np.exp(-1.0), places=12)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            kernel_eval(ALL_KERNELS[0], np.zeros(2), np.zeros(3))


class TestGpModel(unittest.TestCase):
    def setUp(self):
        self.Z, self.Y = toy_data()
        self.spec = KernelSpec(KernelFamily.MATERN, 1.0, [0.6, 0.6])
        self.model = fit_gp(self.spec, None, self.Z, self.Y)

    def test_interpolates_training_data(self):
        pred = predict(self.model, self.Z)
        np.testing.assert_allclose(pred.mean, self.Y, atol=1e-6)
        self.assertTrue(np.all(pred.variance <= 1e-6 * self.spec.signal_variance))

    def test_prior_mean_defaults_to_data_mean(self):
        self.assertAlmostEqual(self.model.prior_mean, float(np.mean(self.Y)))
        far_away = posterior(self.model, np.array([50.0, 50.0]))
        self.assertAlmostEqual(far_away.mean, self.model.prior_mean, places=6)
        self.assertAlmostEqual(far_away.variance, self.spec.signal_variance, places=6)

    def test_log_marginal_likelihood_matches_scipy(self):
        for spec in ALL_KERNELS:
            model = fit_gp(spec, 0.3, self.Z, self.Y)
            covariance = kernel_matrix(spec, self.Z, self.Z) + model.nugget * np.eye(len(self.Y))
            expected = multivariate_normal(np.full(len(self.Y), 0.3), covariance).logpdf(self.Y)
            self.assertAlmostEqual(log_marginal_likelihood(model), expected, delta=1e-6 * abs(expected) + 1e-8)

    def test_variance_shrinks_with_more_data(self):
        queries = rng(22).uniform(-1, 1, (30, 2))
        previous = np.full(30, np.inf)
        for k in range(1, len(self.Y) + 1):
            variance = predict(fit_gp(self.spec, 0.0, self.Z[:k], self.Y[:k]), queries).variance
            self.assertTrue(np.all(variance <= previous + 1e-9))
            previous = variance

    def test_posterior_is_scalar(self):
        pred = posterior(self.model, self.Z[0])
        self.assertIsInstance(pred.mean, float)
        self.assertIsInstance(pred.variance, float)
        with self.assertRaises(DimensionError):
            posterior(self.model, np.zeros(3))

    def test_duplicate_inputs_escalate_nugget(self):
        Z = np.vstack([self.Z, self.Z[:1]])
        Y = np.append(self.Y, self.Y[0])
        model = fit_gp(KernelSpec(KernelFamily.SE, 1.0, [5.0, 5.0]), None, Z, Y)
        self.assertLessEqual(model.nugget, 1e-4 * (1 + 1e-9))
        self.assertTrue(np.all(np.isfinite(model.alpha)))

    def test_single_point_with_large_nugget(self):
        spec = KernelSpec(KernelFamily.SE, 1.0, [1.0])
        model = fit_gp(spec, 0.0, np.array([[0.0]]), np.array([1.0]), nugget=0.5)
        self.assertAlmostEqual(model.nugget, 0.5)
        self.assertAlmostEqual(model.cholesky[0, 0], np.sqrt(1.5), places=12)
        self.assertAlmostEqual(model.alpha[0], 1.0 / 1.5, places=12)

    def test_large_nugget_with_duplicate_inputs(self):
        Z = np.vstack([self.Z, self.Z])
        Y = np.concatenate([self.Y, self.Y])
        model = fit_gp(self.spec, None, Z, Y, nugget=0.01)
        self.assertEqual(model.nugget, 0.01)
        self.assertTrue(np.all(np.isfinite(model.alpha)))

    def test_posterior_mean_is_affine_in_responses(self):
        queries = rng(27).uniform(-1, 1, (15, 2))
        scaled = fit_gp(self.spec, None, self.Z, 2.0 * self.Y + 1.0)
        np.testing.assert_allclose(
            predict(scaled, queries).mean, 2.0 * predict(self.model, queries).mean + 1.0, atol=1e-8
        )
        np.testing.assert_allclose(
            predict(scaled, queries).variance, predict(self.model, queries).variance, atol=1e-12
        )

    def test_ill_conditioned(self):
        with mock.patch(
            "src.gp.model.linalg.cholesky", side_effect=np.linalg.LinAlgError("not positive definite")
        ):
            with self.assertRaises(IllConditionedError):
                fit_gp(self.spec, None, self.Z, self.Y)

    def test_mismatched_training_data(self):
        with self.assertRaises(DimensionError):
            fit_gp(self.spec, None, self.Z, self.Y[:-1])


class TestHyperparameters(unittest.TestCase):
    def setUp(self):
        self.Z, self.Y = toy_data(15, seed=23)

    def test_bounds_validation(self):
        with self.assertRaises(ValueError):
            HyperparameterBounds(lengthscale=(1.0, 0.5))
        with self.assertRaises(ValueError):
            HyperparameterBounds(signal_variance=(0.0, 1.0))

    def test_never_worse_than_heuristic(self):
        bounds = HyperparameterBounds()
        spec = fit_hyperparameters(self.Z, self.Y, KernelFamily.MATERN, bounds, rng(24), n_starts=3)
        start = np.exp(heuristic_start(self.Z, self.Y, bounds))
        heuristic = KernelSpec(KernelFamily.MATERN, start[0], start[1:])
        fitted_lml = log_marginal_likelihood(fit_gp(spec, None, self.Z, self.Y))
        heuristic_lml = log_marginal_likelihood(fit_gp(heuristic, None, self.Z, self.Y))
        self.assertGreaterEqual(fitted_lml, heuristic_lml - 1e-8)

    def test_within_bounds(self):
        bounds = HyperparameterBounds(signal_variance=(0.1, 10.0), lengthscale=(0.05, 5.0))
        spec = fit_hyperparameters(self.Z, self.Y, KernelFamily.SE, bounds, rng(25), n_starts=2)
        self.assertTrue(0.1 - 1e-12 <= spec.signal_variance <= 10.0 + 1e-9)
        self.assertTrue(np.all((spec.lengthscales >= 0.05 - 1e-12) & (spec.lengthscales <= 5.0 + 1e-9)))

    def test_recovers_lengthscales_of_a_sampled_gp(self):
        truth = KernelSpec(KernelFamily.SE, 1.0, [0.5, 1.0])
        recovered = 0
        for seed in range(10):
            generator = rng(100 + seed)
            Z = generator.uniform(-1, 1, (60, 2))
            K = kernel_matrix(truth, Z, Z) + 1e-6 * np.eye(60)
            Y = np.linalg.cholesky(K) @ generator.standard_normal(60)
            spec = fit_hyperparameters(Z, Y, KernelFamily.SE, rng=generator, n_starts=4, nugget=1e-6)
            error = np.abs(np.log(spec.lengthscales) - np.log(truth.lengthscales))
            recovered += int(np.all(error <= 1.0))
        self.assertGreaterEqual(recovered, 7)

    def test_deterministic(self):
        first = fit_hyperparameters(self.Z, self.Y, KernelFamily.MATERN, rng=rng(26), n_starts=2)
        second = fit_hyperparameters(self.Z, self.Y, KernelFamily.MATERN, rng=rng(26), n_starts=2)
        self.assertEqual(first.signal_variance, second.signal_variance)
        np.testing.assert_array_equal(first.lengthscales, second.lengthscales)


if __name__ == "__main__":
    unittest.main()
