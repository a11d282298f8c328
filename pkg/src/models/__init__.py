"""Euclidean models: PCA projections and Gaussian mixtures."""

from .gaussian_mixture import (
    MixtureFit,
    fit_gaussian_mixture,
    log_gaussian_densities,
    log_weighted_densities,
    mixture_log_likelihood,
    posteriors,
)
from .pca import PcaProjection, fit_pca

__all__ = [
    "MixtureFit",
    "PcaProjection",
    "fit_gaussian_mixture",
    "fit_pca",
    "log_gaussian_densities",
    "log_weighted_densities",
    "mixture_log_likelihood",
    "posteriors",
]
