"""Mid-Level Word Modeling

Turns a feature group into a point on a Riemannian manifold using one of
three statistics:

- linear subspace (Grassmann point spanned by the leading eigenvectors
  of the scatter matrix),
- covariance matrix (SPD, d x d),
- Gaussian distribution embedded as a determinant-one SPD matrix of size
  (d+1) x (d+1).

Author: The Manifold-Words Team
License: MIT
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from src.alignment.descriptors import DescriptorSet
from src.alignment.grouping import FeatureGroup, build_feature_groups
from src.alignment.universal_gmm import SphericalGmm
from src.exceptions import (
    ConfigError,
    InsufficientDataError,
    InvalidInputError,
    KindMismatchError,
    RankDeficientError,
)
from src.manifolds.types import GrassmannPoint, ManifoldPoint, SymPosDef, point_matrix
from src.models.pca import PcaProjection

logger = logging.getLogger(__name__)

COVARIANCE_EPSILON = 1e-4
CONSTANT_GROUP_EPSILON = 1e-8
RANK_TOL = 1e-10


class WordKind(Enum):
    """Statistical model of a mid-level word."""

    SUBSPACE = "sub"
    COVARIANCE = "cov"
    GAUSSIAN = "gau"

    @classmethod
    def parse(cls, value) -> "WordKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(
                f"Unknown word kind '{value}' (expected one of: sub, cov, gau)"
            ) from None

    @property
    def is_spd(self) -> bool:
        return self is not WordKind.SUBSPACE


@dataclass(frozen=True, eq=False)
class MidLevelWord:
    """A tagged manifold point with its provenance.

    Attributes:
        kind: Which statistic produced the word
        payload: GrassmannPoint (SUBSPACE) or SymPosDef (COVARIANCE, GAUSSIAN)
        video_id: Source video
        component_index: Universal GMM component the group came from
    """

    kind: WordKind
    payload: ManifoldPoint
    video_id: str = ""
    component_index: int = -1

    def __post_init__(self):
        expected = SymPosDef if self.kind.is_spd else GrassmannPoint
        if not isinstance(self.payload, expected):
            raise KindMismatchError(
                f"{self.kind.name} word needs a {expected.__name__} payload, "
                f"got {type(self.payload).__name__}"
            )

    @property
    def matrix(self) -> np.ndarray:
        return point_matrix(self.payload)

    @property
    def shape(self):
        return self.matrix.shape


def check_same_kind(words: Sequence[MidLevelWord]) -> WordKind:
    """Return the common kind of ``words``.

    Raises:
        InsufficientDataError: If ``words`` is empty
        KindMismatchError: If kinds or payload shapes differ
    """
    if not words:
        raise InsufficientDataError("No mid-level words given")
    kind, shape = words[0].kind, words[0].shape
    for word in words[1:]:
        if word.kind is not kind:
            raise KindMismatchError(f"Mixed word kinds: {kind.name} and {word.kind.name}")
        if word.shape != shape:
            raise KindMismatchError(f"Mixed word shapes: {shape} and {word.shape}")
    return kind


def _sign_fixed(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def regularized_covariance(members: np.ndarray) -> np.ndarray:
    """Sample covariance plus a scaled identity that makes it SPD.

    C + 1e-4 * tr(C)/d * I, or C + 1e-8 * I when tr(C) = 0.
    """
    count, dim = members.shape
    if count < 2:
        raise InsufficientDataError(f"Covariance needs at least 2 features, got {count}")
    centered = members - members.mean(axis=0)
    cov = centered.T @ centered / (count - 1)
    cov = 0.5 * (cov + cov.T)
    trace = float(np.trace(cov))
    ridge = COVARIANCE_EPSILON * trace / dim if trace > 0 else CONSTANT_GROUP_EPSILON
    return cov + ridge * np.eye(dim)


def model_subspace(group: FeatureGroup, subspace_dim: int = 5) -> MidLevelWord:
    """Model a group by the span of its r leading scatter eigenvectors.

    Args:
        group: Feature group with T > r members
        subspace_dim: r

    Raises:
        ConfigError: If r is not in [1, min(d, T))
        RankDeficientError: If the centered data has rank below r
    """
    count, dim = group.members.shape
    if not 1 <= subspace_dim < min(dim, count):
        raise ConfigError(
            f"Subspace dimension r={subspace_dim} needs 1 <= r < d={dim} and r < T={count}"
        )
    centered = group.members - group.members.mean(axis=0)
    scatter = centered.T @ centered
    eigvals, eigvecs = scipy.linalg.eigh(0.5 * (scatter + scatter.T))
    eigvals, eigvecs = eigvals[::-1], eigvecs[:, ::-1]
    if eigvals[0] <= 0 or eigvals[subspace_dim - 1] <= RANK_TOL * eigvals[0]:
        raise RankDeficientError(
            f"Group ({group.video_id}, {group.component_index}) has rank below "
            f"r={subspace_dim}"
        )
    basis = _sign_fixed(eigvecs[:, :subspace_dim])
    return MidLevelWord(
        WordKind.SUBSPACE,
        GrassmannPoint(basis),
        group.video_id,
        group.component_index,
    )


def model_covariance(group: FeatureGroup) -> MidLevelWord:
    """Model a group by its regularized d x d sample covariance."""
    cov = regularized_covariance(group.members)
    return MidLevelWord(
        WordKind.COVARIANCE, SymPosDef(cov), group.video_id, group.component_index
    )


def gaussian_embedding(mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """Embed N(mean, cov) as |cov|^{-1/(d+1)} [[cov + mean mean^T, mean], [mean^T, 1]].

    The block-determinant identity makes the result determinant one.
    """
    mean = np.asarray(mean, dtype=np.float64).ravel()
    dim = mean.size
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise InvalidInputError("Gaussian covariance must have positive determinant")
    embedded = np.empty((dim + 1, dim + 1))
    embedded[:dim, :dim] = cov + np.outer(mean, mean)
    embedded[:dim, dim] = mean
    embedded[dim, :dim] = mean
    embedded[dim, dim] = 1.0
    embedded *= np.exp(-logdet / (dim + 1))
    return 0.5 * (embedded + embedded.T)


def model_gaussian_spd(group: FeatureGroup) -> MidLevelWord:
    """Model a group as a Gaussian embedded in the (d+1) x (d+1) SPD manifold."""
    cov = regularized_covariance(group.members)
    embedded = gaussian_embedding(group.members.mean(axis=0), cov)
    return MidLevelWord(
        WordKind.GAUSSIAN, SymPosDef(embedded), group.video_id, group.component_index
    )


def model_word(
    group: FeatureGroup, kind: WordKind, subspace_dim: int = 5
) -> MidLevelWord:
    """Dispatch to the model matching ``kind``."""
    if kind is WordKind.SUBSPACE:
        return model_subspace(group, subspace_dim)
    if kind is WordKind.COVARIANCE:
        return model_covariance(group)
    return model_gaussian_spd(group)


def build_video_words(
    gmm: SphericalGmm,
    pca: Optional[PcaProjection],
    video: DescriptorSet,
    kind: WordKind,
    group_size: int,
    subspace_dim: int = 5,
    pad: bool = False,
) -> List[MidLevelWord]:
    """Groups then words for one video, in universal-component order.

    Args:
        gmm: Universal GMM
        pca: Descriptor projection fitted before the GMM, or None when the
            video is already in the GMM's space
        video: Raw descriptors of the video
        kind: Word model
        group_size: T
        subspace_dim: r for subspace words
        pad: Allow padding of short videos
    """
    if pca is not None:
        video = video.project(pca)
    groups = build_feature_groups(gmm, video, group_size, pad=pad)
    words = [model_word(group, kind, subspace_dim) for group in groups]
    logger.debug("Video '%s': %d %s words", video.video_id, len(words), kind.value)
    return words
