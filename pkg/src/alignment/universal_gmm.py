"""Universal Alignment GMM

A spherical-covariance Gaussian mixture fit on the pooled descriptors of
all training videos. Its components act as shared anchors: descriptors
from different videos that score highest under the same component are
treated as corresponding.

Author: The Manifold-Words Team
License: MIT
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.exceptions import DimensionMismatchError, InvalidInputError
from src.models.gaussian_mixture import (
    fit_gaussian_mixture,
    log_weighted_densities,
    mixture_log_likelihood,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SphericalGmm:
    """Mixture of spherical Gaussians w_k G(f | mu_k, sigma_k^2 I).

    Attributes:
        weights: K mixture weights summing to one
        means: K x d component means
        variances: K scalar variances sigma_k^2
        log_likelihood_trace: EM trace of the fit (empty for loaded models)
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihood_trace: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64).ravel()
        means = np.array(self.means, dtype=np.float64, ndmin=2)
        variances = np.array(self.variances, dtype=np.float64).ravel()
        if means.shape[0] != weights.size or variances.size != weights.size:
            raise DimensionMismatchError(
                "GMM weights, means and variances disagree on the component count"
            )
        if np.any(weights <= 0) or abs(np.sum(weights) - 1.0) > 1e-10:
            raise InvalidInputError("GMM weights must be positive and sum to one")
        if np.any(variances <= 0):
            raise InvalidInputError("GMM variances must be positive")
        for array in (weights, means, variances):
            array.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    @property
    def n_components(self) -> int:
        return self.weights.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def log_component_probabilities(self, features: np.ndarray) -> np.ndarray:
        """log p_k(f) = log(w_k G(f | mu_k, sigma_k^2 I)) for each row, shape (L, K)."""
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if features.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"Feature dimension {features.shape[1]} != GMM dimension {self.dim}"
            )
        return log_weighted_densities(features, self.weights, self.means,
                                      self.variances)

    def log_likelihood(self, features: np.ndarray) -> float:
        return mixture_log_likelihood(np.atleast_2d(features), self.weights,
                                      self.means, self.variances)


def fit_spherical_gmm(
    training: np.ndarray,
    n_components: int,
    seed: Optional[int] = 0,
    max_iter: int = 200,
    tol: float = 1e-5,
    workers: Optional[int] = 1,
) -> SphericalGmm:
    """Fit the universal spherical GMM by EM.

    Args:
        training: Pooled training descriptors, one per row
        n_components: Number of components K
        seed: Seed for the k-means++ initialization
        max_iter: EM iteration cap
        tol: Relative log-likelihood gain at which EM stops
        workers: Worker threads for the E-step

    Returns:
        Fitted SphericalGmm with its log-likelihood trace

    Raises:
        InsufficientDataError: If fewer than 10 K descriptors are given
        DegenerateInputError: If the descriptors have zero variance
    """
    fit = fit_gaussian_mixture(
        training,
        n_components,
        covariance_type="spherical",
        seed=seed,
        max_iter=max_iter,
        tol=tol,
        workers=workers,
    )
    return SphericalGmm(
        weights=fit.weights,
        means=fit.means,
        variances=fit.variances,
        log_likelihood_trace=fit.log_likelihood_trace,
    )


def component_probabilities(gmm: SphericalGmm, feature: np.ndarray) -> np.ndarray:
    """Weighted component densities p_k(f) = w_k G(f | mu_k, sigma_k^2 I).

    Computed in log space and exponentiated; values can underflow to zero for
    high-dimensional features far from every component.

    Raises:
        DimensionMismatchError: If the feature length differs from the GMM's
    """
    feature = np.asarray(feature, dtype=np.float64)
    if feature.ndim != 1:
        raise InvalidInputError("component_probabilities expects a single vector")
    return np.exp(gmm.log_component_probabilities(feature[None, :])[0])
