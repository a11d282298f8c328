"""Tests for Gaussian-mixture EM."""

import numpy as np
import pytest

from src.exceptions import (
    ConfigError,
    DegenerateInputError,
    InsufficientDataError,
    InvalidInputError,
)
from src.models.gaussian_mixture import (
    fit_gaussian_mixture,
    log_gaussian_densities,
    mixture_log_likelihood,
    posteriors,
)


def two_clusters(rng, per_cluster=300, dim=3, gap=10.0):
    first = rng.standard_normal((per_cluster, dim))
    second = rng.standard_normal((per_cluster, dim)) + gap
    return np.vstack([first, second])


def is_monotone(trace):
    trace = np.asarray(trace)
    return bool(np.all(np.diff(trace) >= -1e-8 * np.abs(trace[:-1])))


class TestDensities:
    """Closed-form density and posterior helpers."""

    def test_spherical_matches_diagonal(self, rng):
        samples = rng.standard_normal((20, 3))
        means = rng.standard_normal((2, 3))
        variances = np.array([0.5, 2.0])
        spherical = log_gaussian_densities(samples, means, variances)
        diagonal = log_gaussian_densities(samples, means,
                                          np.repeat(variances[:, None], 3, axis=1))
        np.testing.assert_allclose(spherical, diagonal, rtol=1e-12)

    def test_posteriors_sum_to_one(self, rng):
        samples = rng.standard_normal((50, 4)) * 5
        gamma = posteriors(samples, np.array([0.2, 0.3, 0.5]),
                           rng.standard_normal((3, 4)), np.ones((3, 4)))
        np.testing.assert_allclose(gamma.sum(axis=1), 1.0, atol=1e-10)

    def test_log_likelihood_of_standard_normal(self):
        """log N(0 | 0, I_2) = -log(2 pi)."""
        value = mixture_log_likelihood(np.zeros((1, 2)), np.array([1.0]),
                                       np.zeros((1, 2)), np.array([1.0]))
        assert value == pytest.approx(-np.log(2 * np.pi), rel=1e-12)


class TestFitGaussianMixture:
    """EM fits from a k-means++ start."""

    def test_single_component_closed_form(self, rng):
        """K=1: mean is the sample mean, variance the mean per-dimension variance."""
        samples = rng.standard_normal((200, 3)) * np.array([1.0, 2.0, 3.0]) + 4.0
        fit = fit_gaussian_mixture(samples, 1)
        np.testing.assert_allclose(fit.means[0], samples.mean(axis=0), atol=1e-10)
        assert fit.variances[0] == pytest.approx(samples.var(axis=0).mean(), rel=1e-8)
        assert fit.weights[0] == pytest.approx(1.0)

    def test_diagonal_single_component(self, rng):
        samples = rng.standard_normal((200, 3)) * np.array([1.0, 2.0, 3.0])
        fit = fit_gaussian_mixture(samples, 1, covariance_type="diag")
        np.testing.assert_allclose(fit.variances[0], samples.var(axis=0), rtol=1e-8)

    def test_recovers_separated_clusters(self, rng):
        fit = fit_gaussian_mixture(two_clusters(rng, per_cluster=2000), 2, seed=1)
        order = np.argsort(fit.means[:, 0])
        np.testing.assert_allclose(fit.means[order[0]], 0.0, atol=0.1)
        np.testing.assert_allclose(fit.means[order[1]], 10.0, atol=0.1)
        np.testing.assert_allclose(fit.weights, 0.5, atol=0.05)

    @pytest.mark.parametrize("covariance_type", ["spherical", "diag"])
    @pytest.mark.parametrize("seed", range(10))
    def test_log_likelihood_monotone(self, covariance_type, seed):
        """EM never decreases the log-likelihood."""
        rng = np.random.default_rng(seed)
        samples = np.vstack([
            rng.standard_normal((150, 4)) * rng.uniform(0.5, 2.0, 4) + rng.normal(0, 3, 4)
            for _ in range(3)
        ])
        fit = fit_gaussian_mixture(samples, 4, covariance_type=covariance_type,
                                   seed=seed)
        assert len(fit.log_likelihood_trace) >= 2
        assert is_monotone(fit.log_likelihood_trace)

    def test_worker_count_does_not_change_result(self, rng):
        samples = two_clusters(rng, per_cluster=3000)
        serial = fit_gaussian_mixture(samples, 3, seed=5, workers=1)
        threaded = fit_gaussian_mixture(samples, 3, seed=5, workers=4)
        np.testing.assert_array_equal(serial.means, threaded.means)
        np.testing.assert_array_equal(serial.variances, threaded.variances)

    def test_seed_determinism(self, rng):
        samples = two_clusters(rng)
        first = fit_gaussian_mixture(samples, 3, seed=7)
        second = fit_gaussian_mixture(samples, 3, seed=7)
        assert first.log_likelihood_trace == second.log_likelihood_trace

    def test_too_few_samples(self, rng):
        with pytest.raises(InsufficientDataError):
            fit_gaussian_mixture(rng.standard_normal((19, 2)), 2)

    def test_zero_variance(self):
        with pytest.raises(DegenerateInputError):
            fit_gaussian_mixture(np.ones((50, 3)), 2)

    def test_unknown_covariance_type(self, rng):
        with pytest.raises(ConfigError):
            fit_gaussian_mixture(rng.standard_normal((50, 2)), 2, covariance_type="full")

    def test_non_finite_samples(self):
        samples = np.zeros((40, 2))
        samples[3, 1] = np.inf
        with pytest.raises(InvalidInputError):
            fit_gaussian_mixture(samples, 1)
