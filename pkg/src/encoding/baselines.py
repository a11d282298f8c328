"""Low-level baselines.

Encodings built directly from a video's raw descriptors, without
mid-level words: the mean descriptor, hard-assignment BoVW and VLAD over a
k-means codebook of descriptors, and the Fisher vector of the descriptors
under the universal spherical GMM.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans

from src.alignment.descriptors import DescriptorSet
from src.alignment.universal_gmm import SphericalGmm
from src.encoding.fisher import fisher_vector_from_embeddings
from src.encoding.normalization import l2_normalize
from src.encoding.representation import EncodedVideo, EncodingMethod
from src.exceptions import (
    DimensionMismatchError,
    InsufficientDataError,
    InvalidInputError,
)
from src.models.pca import PcaProjection

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DescriptorCodebook:
    """k-means centers in descriptor space.

    Attributes:
        centers: M x d matrix of codewords
        pca: Projection applied to descriptors before assignment, if any
    """

    centers: np.ndarray
    pca: Optional[PcaProjection] = None

    def __post_init__(self):
        centers = np.array(self.centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[0] == 0:
            raise InvalidInputError(
                f"Codebook centers must be a non-empty M x d matrix, got "
                f"{centers.shape}"
            )
        if not np.all(np.isfinite(centers)):
            raise InvalidInputError("Codebook centers contain non-finite entries")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def project(self, video: DescriptorSet) -> np.ndarray:
        features = video.features
        if self.pca is not None:
            features = self.pca.transform(features)
        if features.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"Video '{video.video_id}' has d={features.shape[1]}, "
                f"codebook expects {self.dim}"
            )
        return features

    def assign(self, features: np.ndarray) -> np.ndarray:
        """Index of the nearest center for each row."""
        return np.argmin(cdist(features, self.centers, "sqeuclidean"), axis=1)


def fit_descriptor_codebook(
    features: np.ndarray,
    n_codewords: int,
    pca: Optional[PcaProjection] = None,
    seed: int = 0,
    max_iter: int = 100,
) -> DescriptorCodebook:
    """k-means over pooled training descriptors.

    Args:
        features: Pooled descriptors, already projected when ``pca`` is given
        n_codewords: M
        pca: Projection to store alongside the centers
        seed: k-means++ seed
        max_iter: Lloyd iterations

    Raises:
        InsufficientDataError: If there are fewer distinct descriptors than M
    """
    features = np.asarray(features, dtype=np.float64)
    distinct = np.unique(features, axis=0).shape[0]
    if distinct < n_codewords:
        raise InsufficientDataError(
            f"k-means with M={n_codewords} needs M distinct descriptors, got {distinct}"
        )
    kmeans = KMeans(
        n_clusters=n_codewords, n_init=1, max_iter=max_iter, random_state=seed
    )
    kmeans.fit(features)
    logger.info(
        "Descriptor codebook: M=%d over %d descriptors, inertia %.4g in %d iterations",
        n_codewords, features.shape[0], kmeans.inertia_, kmeans.n_iter_,
    )
    return DescriptorCodebook(kmeans.cluster_centers_, pca)


def encode_mean_baseline(
    video: DescriptorSet, pca: Optional[PcaProjection] = None
) -> EncodedVideo:
    """Mean descriptor of the video (first-order statistics only)."""
    if pca is not None:
        video = video.project(pca)
    return EncodedVideo(
        video_id=video.video_id,
        method=EncodingMethod.MEAN,
        vector=video.features.mean(axis=0),
        kind=None,
        n_codewords=0,
        dim=video.dim,
    )


def encode_low_level_bovw(
    codebook: DescriptorCodebook, video: DescriptorSet
) -> EncodedVideo:
    """Histogram of hard assignments, length M, summing to one."""
    labels = codebook.assign(codebook.project(video))
    histogram = np.bincount(labels, minlength=codebook.n_centers).astype(np.float64)
    return EncodedVideo(
        video_id=video.video_id,
        method=EncodingMethod.LOW_LEVEL_BOVW,
        vector=histogram / histogram.sum(),
        kind=None,
        n_codewords=codebook.n_centers,
        dim=codebook.dim,
    )


def encode_low_level_vlad(
    codebook: DescriptorCodebook, video: DescriptorSet
) -> EncodedVideo:
    """Accumulated descriptor residuals per center, L2-normalized, length M * d."""
    features = codebook.project(video)
    labels = codebook.assign(features)
    residuals = np.zeros_like(codebook.centers)
    np.add.at(residuals, labels, features - codebook.centers[labels])
    return EncodedVideo(
        video_id=video.video_id,
        method=EncodingMethod.LOW_LEVEL_VLAD,
        vector=l2_normalize(residuals.ravel()),
        kind=None,
        n_codewords=codebook.n_centers,
        dim=codebook.dim,
    )


def encode_low_level_fisher(
    gmm: SphericalGmm,
    video: DescriptorSet,
    pca: Optional[PcaProjection] = None,
    strict_paper: bool = False,
) -> EncodedVideo:
    """Fisher vector of the raw descriptors, length 2 * K * d.

    Args:
        gmm: Universal spherical GMM
        video: Raw descriptors
        pca: Descriptor projection fitted before the GMM, if any
        strict_paper: Omit the "- 1" correction of the variance block
    """
    if pca is not None:
        video = video.project(pca)
    variances = np.repeat(gmm.variances[:, None], gmm.dim, axis=1)
    vector = fisher_vector_from_embeddings(
        video.features, gmm.weights, gmm.means, variances, strict_paper=strict_paper
    )
    return EncodedVideo(
        video_id=video.video_id,
        method=EncodingMethod.LOW_LEVEL_FV,
        vector=vector,
        kind=None,
        n_codewords=gmm.n_components,
        dim=gmm.dim,
    )
