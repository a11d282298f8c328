"""Riemannian GMM

A diagonal-covariance Gaussian mixture over mid-level words after their
explicit embedding into a vector space and a PCA reduction to D
dimensions. The PCA is fitted on training words only and frozen inside
the model, so encoding never refits anything.

Author: The Manifold-Words Team
License: MIT
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from src.codebook.embedding import embed_words, embedding_dim, fit_word_projection
from src.exceptions import (
    ConfigError,
    DegenerateInputError,
    DimensionMismatchError,
    InsufficientDataError,
    InvalidInputError,
    KindMismatchError,
)
from src.models.gaussian_mixture import (
    MIN_SAMPLES_PER_COMPONENT,
    VARIANCE_FLOOR_RATIO,
    fit_gaussian_mixture,
    mixture_log_likelihood,
    posteriors,
)
from src.models.pca import PcaProjection
from src.words.modeling import MidLevelWord, WordKind, check_same_kind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RiemannianGmm:
    """Diagonal GMM lambda = {w_m, mu_m, sigma_m^2} over projected word embeddings.

    Attributes:
        kind: Word kind the model was fitted on
        pca: Projection from the word-embedding space to D dimensions
        weights: M mixture weights summing to one
        means: M x D component means
        variances: M x D diagonal variances
        log_likelihood_trace: EM trace of the fit (empty for loaded models)
    """

    kind: WordKind
    pca: PcaProjection
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihood_trace: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64).ravel()
        means = np.array(self.means, dtype=np.float64, ndmin=2)
        variances = np.array(self.variances, dtype=np.float64, ndmin=2)
        if means.shape[0] != weights.size or variances.shape != means.shape:
            raise DimensionMismatchError("Riemannian GMM parameter shapes disagree")
        if means.shape[1] != self.pca.output_dim:
            raise DimensionMismatchError(
                f"GMM dimension {means.shape[1]} != PCA output {self.pca.output_dim}"
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

    def project(self, words: Sequence[MidLevelWord]) -> np.ndarray:
        """Phi(X) for each word: embedding followed by the frozen PCA."""
        kind = check_same_kind(words)
        if kind is not self.kind:
            raise KindMismatchError(
                f"{kind.name} words given to a {self.kind.name} Riemannian GMM"
            )
        return self.pca.transform(embed_words(words))

    def posteriors(self, words: Sequence[MidLevelWord]) -> np.ndarray:
        """Soft assignments gamma_k(m), shape (len(words), M)."""
        return posteriors(self.project(words), self.weights, self.means, self.variances)

    def log_likelihood(self, words: Sequence[MidLevelWord]) -> float:
        return mixture_log_likelihood(
            self.project(words), self.weights, self.means, self.variances
        )


def _single_component(projected: np.ndarray):
    """Closed-form M=1 fit: sample mean and unbiased per-dimension variance."""
    variances = projected.var(axis=0, ddof=1)
    if not np.any(variances > 0):
        raise DegenerateInputError("Projected words have zero variance")
    floor = VARIANCE_FLOOR_RATIO * np.maximum(
        variances, 1e-6 * float(np.mean(variances))
    )
    weights = np.ones(1)
    means = projected.mean(axis=0, keepdims=True)
    variances = np.maximum(variances, floor)[None, :]
    trace = (mixture_log_likelihood(projected, weights, means, variances),)
    return weights, means, variances, trace


def fit_riemannian_gmm(
    words: Sequence[MidLevelWord],
    n_components: int,
    output_dim: int,
    seed: Optional[int] = 0,
    max_iter: int = 200,
    tol: float = 1e-5,
    workers: Optional[int] = 1,
) -> RiemannianGmm:
    """Fit a Riemannian GMM on training words.

    Embeds the words, fits a PCA to ``output_dim`` dimensions, then runs
    diagonal-covariance EM from a seeded k-means++ start. With M=1 the fit
    is closed-form: the sample mean and the per-dimension sample variance
    (N - 1 denominator).

    Args:
        words: Training words of a single kind
        n_components: M
        output_dim: D, at most the embedding dimension
        seed: Seed for the EM initialization
        max_iter: EM iteration cap
        tol: Relative log-likelihood gain at which EM stops
        workers: Worker threads for the E-step

    Raises:
        ConfigError: If D exceeds the embedding dimension
        InsufficientDataError: If there are fewer than 10 M words
        KindMismatchError: If the words mix kinds
        DegenerateInputError: If M=1 and the projected words do not vary
    """
    kind = check_same_kind(words)
    available = embedding_dim(words[0])
    if not 1 <= output_dim <= available:
        raise ConfigError(
            f"Mid-level dimension D={output_dim} must lie in [1, {available}] for "
            f"{kind.name} words of shape {words[0].shape}"
        )
    if len(words) < MIN_SAMPLES_PER_COMPONENT * n_components:
        raise InsufficientDataError(
            f"Riemannian GMM with M={n_components} needs at least "
            f"{MIN_SAMPLES_PER_COMPONENT * n_components} words, got {len(words)}"
        )

    pca = fit_word_projection(words, output_dim)
    projected = pca.transform(embed_words(words))
    if n_components == 1:
        weights, means, variances, trace = _single_component(projected)
    else:
        fit = fit_gaussian_mixture(
            projected,
            n_components,
            covariance_type="diag",
            seed=seed,
            max_iter=max_iter,
            tol=tol,
            workers=workers,
        )
        weights, means, variances = fit.weights, fit.means, fit.variances
        trace = fit.log_likelihood_trace
    return RiemannianGmm(
        kind=kind,
        pca=pca,
        weights=weights,
        means=means,
        variances=variances,
        log_likelihood_trace=trace,
    )
