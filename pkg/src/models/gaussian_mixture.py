"""Gaussian Mixture EM

Expectation-Maximization for Gaussian mixtures with spherical (sigma^2 I)
or diagonal covariances. The universal alignment GMM uses the spherical
form on descriptors; the Riemannian GMM uses the diagonal form on
embedded mid-level words.

The E-step runs over fixed-size chunks of samples, optionally in parallel;
sufficient statistics are reduced in chunk order so fits are bit-identical
for any worker count.

Author: The Manifold-Words Team
License: MIT
"""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp
from sklearn.cluster import kmeans_plusplus

from src.exceptions import (
    ConfigError,
    ConvergenceError,
    DegenerateInputError,
    DimensionMismatchError,
    InsufficientDataError,
    InvalidInputError,
)
from src.parallel import parallel_map

logger = logging.getLogger(__name__)

CHUNK_SIZE = 4096
VARIANCE_FLOOR_RATIO = 1e-6
MIN_SAMPLES_PER_COMPONENT = 10
LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class MixtureFit:
    """Parameters and diagnostics of an EM fit.

    ``variances`` has shape (K,) for spherical fits and (K, D) for
    diagonal fits.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihood_trace: Tuple[float, ...]
    n_iter: int
    converged: bool

    @property
    def log_likelihood(self) -> float:
        return self.log_likelihood_trace[-1]


def log_gaussian_densities(
    samples: np.ndarray, means: np.ndarray, variances: np.ndarray
) -> np.ndarray:
    """Per-component log densities log G(x | mu_k, Sigma_k), shape (N, K).

    Args:
        samples: N x D sample matrix
        means: K x D component means
        variances: (K,) spherical variances or (K, D) diagonal variances
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    dim = means.shape[1]
    if samples.shape[1] != dim:
        raise DimensionMismatchError(
            f"Samples have dimension {samples.shape[1]}, mixture has {dim}"
        )
    if variances.ndim == 1:
        sq_dist = cdist(samples, means, "sqeuclidean")
        return -0.5 * (dim * (LOG_2PI + np.log(variances)) + sq_dist / variances)

    out = np.empty((samples.shape[0], means.shape[0]))
    log_norm = np.sum(LOG_2PI + np.log(variances), axis=1)
    for k in range(means.shape[0]):
        diff = samples - means[k]
        out[:, k] = -0.5 * (log_norm[k] + np.sum(diff * diff / variances[k], axis=1))
    return out


def log_weighted_densities(
    samples: np.ndarray,
    weights: np.ndarray,
    means: np.ndarray,
    variances: np.ndarray,
) -> np.ndarray:
    """log(w_k G(x | mu_k, Sigma_k)), shape (N, K)."""
    return np.log(weights) + log_gaussian_densities(samples, means, variances)


def posteriors(
    samples: np.ndarray,
    weights: np.ndarray,
    means: np.ndarray,
    variances: np.ndarray,
) -> np.ndarray:
    """Component posteriors via log-sum-exp; each row sums to one."""
    log_p = log_weighted_densities(samples, weights, means, variances)
    return np.exp(log_p - logsumexp(log_p, axis=1, keepdims=True))


def mixture_log_likelihood(
    samples: np.ndarray,
    weights: np.ndarray,
    means: np.ndarray,
    variances: np.ndarray,
) -> float:
    """Total log-likelihood of ``samples`` under the mixture."""
    log_p = log_weighted_densities(samples, weights, means, variances)
    return float(np.sum(logsumexp(log_p, axis=1)))


def _chunk_bounds(n_samples: int):
    return [(start, min(start + CHUNK_SIZE, n_samples))
            for start in range(0, n_samples, CHUNK_SIZE)]


def _chunk_statistics(bounds, samples, params, spherical):
    """E-step sufficient statistics for one chunk of samples."""
    start, stop = bounds
    chunk = samples[start:stop]
    weights, means, variances = params
    log_p = log_weighted_densities(chunk, weights, means, variances)
    log_norm = logsumexp(log_p, axis=1)
    resp = np.exp(log_p - log_norm[:, None])
    return _moments(chunk, resp, spherical) + (float(np.sum(log_norm)),)


def _hard_chunk_statistics(bounds, samples, labels, n_components, spherical):
    start, stop = bounds
    chunk = samples[start:stop]
    resp = np.zeros((stop - start, n_components))
    resp[np.arange(stop - start), labels[start:stop]] = 1.0
    return _moments(chunk, resp, spherical) + (0.0,)


def _moments(chunk, resp, spherical):
    s0 = resp.sum(axis=0)
    s1 = resp.T @ chunk
    if spherical:
        s2 = resp.T @ np.sum(chunk * chunk, axis=1)
    else:
        s2 = resp.T @ (chunk * chunk)
    return s0, s1, s2


def _reduce(chunk_stats):
    s0, s1, s2, ll = chunk_stats[0]
    s0, s1, s2 = s0.copy(), s1.copy(), s2.copy()
    for c0, c1, c2, cll in chunk_stats[1:]:
        s0 += c0
        s1 += c1
        s2 += c2
        ll += cll
    return s0, s1, s2, ll


def _m_step(stats, spherical, variance_floor):
    s0, s1, s2, _ = stats
    counts = s0 + 10 * np.finfo(np.float64).eps
    weights = counts / np.sum(counts)
    means = s1 / counts[:, None]
    if spherical:
        second = s2 / counts - np.sum(means * means, axis=1)
        variances = second / means.shape[1]
    else:
        variances = s2 / counts[:, None] - means * means
    variances = np.maximum(variances, variance_floor)
    return weights, means, variances


def fit_gaussian_mixture(
    samples: np.ndarray,
    n_components: int,
    covariance_type: str = "spherical",
    seed: Optional[int] = 0,
    max_iter: int = 200,
    tol: float = 1e-5,
    workers: Optional[int] = 1,
) -> MixtureFit:
    """Fit a Gaussian mixture by EM from a k-means++ initialization.

    The initial parameters come from a hard assignment of every sample to
    its nearest seeded k-means++ center. Iteration stops when the relative
    log-likelihood gain drops below ``tol`` or after ``max_iter`` M-steps.
    Variances are floored at 1e-6 of the data variance (per dimension for
    diagonal fits), which keeps EM monotone.

    Args:
        samples: N x D training matrix
        n_components: Number of components K
        covariance_type: 'spherical' or 'diag'
        seed: Seed for the k-means++ initialization
        max_iter: Maximum number of EM iterations
        tol: Relative log-likelihood gain threshold
        workers: Worker threads for the chunked E-step

    Returns:
        MixtureFit with parameters and the log-likelihood trace

    Raises:
        ConfigError: If n_components < 1 or covariance_type is unknown
        InsufficientDataError: If N < 10 K
        DegenerateInputError: If the data has zero variance
    """
    if covariance_type not in ("spherical", "diag"):
        raise ConfigError(f"Unknown covariance type: {covariance_type}")
    if n_components < 1:
        raise ConfigError("Mixture needs at least one component")
    data = np.asarray(samples, dtype=np.float64)
    if data.ndim != 2:
        raise InvalidInputError(f"Samples must be a 2-D matrix, got {data.shape}")
    if not np.all(np.isfinite(data)):
        raise InvalidInputError("Samples contain non-finite values")
    n_samples = data.shape[0]
    if n_samples < MIN_SAMPLES_PER_COMPONENT * n_components:
        raise InsufficientDataError(
            f"{n_components} components need at least "
            f"{MIN_SAMPLES_PER_COMPONENT * n_components} samples, got {n_samples}"
        )

    spherical = covariance_type == "spherical"
    center = data.mean(axis=0)
    data = data - center
    per_dim_var = data.var(axis=0)
    if not np.any(per_dim_var > 0):
        raise DegenerateInputError("Training data has zero variance")
    if spherical:
        variance_floor = VARIANCE_FLOOR_RATIO * float(np.mean(per_dim_var))
    else:
        variance_floor = VARIANCE_FLOOR_RATIO * np.maximum(
            per_dim_var, 1e-6 * float(np.mean(per_dim_var))
        )

    bounds = _chunk_bounds(n_samples)
    centers, _ = kmeans_plusplus(data, n_clusters=n_components, random_state=seed)
    labels = np.argmin(cdist(data, centers, "sqeuclidean"), axis=1)
    hard = partial(
        _hard_chunk_statistics,
        samples=data,
        labels=labels,
        n_components=n_components,
        spherical=spherical,
    )
    params = _m_step(_reduce(parallel_map(hard, bounds, workers)), spherical,
                     variance_floor)

    def e_step(current):
        step = partial(_chunk_statistics, samples=data, params=current,
                       spherical=spherical)
        return _reduce(parallel_map(step, bounds, workers))

    stats = e_step(params)
    trace = [stats[3]]
    converged = False
    n_iter = 0
    check_monotone = logger.isEnabledFor(logging.DEBUG)
    for n_iter in range(1, max_iter + 1):
        params = _m_step(stats, spherical, variance_floor)
        stats = e_step(params)
        previous, current = trace[-1], stats[3]
        trace.append(current)
        logger.debug("EM iteration %d: log-likelihood %.10g", n_iter, current)
        if check_monotone and current < previous - 1e-8 * abs(previous):
            raise ConvergenceError(
                f"EM log-likelihood decreased at iteration {n_iter}: "
                f"{previous:.10g} -> {current:.10g}"
            )
        if (current - previous) / max(abs(previous), 1e-300) < tol:
            converged = True
            break

    weights, means, variances = params
    logger.info(
        "Fitted %s GMM: K=%d, D=%d, %d iterations, log-likelihood %.6g%s",
        covariance_type,
        n_components,
        data.shape[1],
        n_iter,
        trace[-1],
        "" if converged else " (max_iter reached)",
    )
    return MixtureFit(
        weights=weights,
        means=means + center,
        variances=variances,
        log_likelihood_trace=tuple(trace),
        n_iter=n_iter,
        converged=converged,
    )
