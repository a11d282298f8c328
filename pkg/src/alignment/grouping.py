"""Feature group construction.

Each video is decomposed into K feature groups, one per universal GMM
component: the T descriptors of the video with the highest weighted
density under that component.
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from src.alignment.descriptors import DescriptorSet
from src.alignment.universal_gmm import SphericalGmm
from src.exceptions import ConfigError, InsufficientDataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FeatureGroup:
    """The top-T descriptors of one video under one GMM component.

    Attributes:
        video_id: Source video
        component_index: Universal GMM component k
        members: T x d descriptors, highest probability first
        member_indices: Row indices of the members in the source video
        member_log_probabilities: log p_k of each member, non-increasing
    """

    video_id: str
    component_index: int
    members: np.ndarray
    member_indices: np.ndarray
    member_log_probabilities: np.ndarray

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @property
    def dim(self) -> int:
        return self.members.shape[1]

    @property
    def member_probabilities(self) -> np.ndarray:
        return np.exp(self.member_log_probabilities)


def build_feature_groups(
    gmm: SphericalGmm, video: DescriptorSet, group_size: int, pad: bool = False
) -> List[FeatureGroup]:
    """Split a video into one top-T feature group per GMM component.

    Ties in probability go to the lower feature index, so the result is
    deterministic. A feature may belong to several groups.

    Args:
        gmm: Universal spherical GMM
        video: Descriptors of one video, already in the GMM's space
        group_size: T, the number of features per group
        pad: When the video has fewer than T features, repeat its
            highest-probability features instead of failing

    Returns:
        K feature groups in component order

    Raises:
        InsufficientDataError: If L < T and padding is disabled
    """
    if group_size < 1:
        raise ConfigError("Group size T must be positive")
    n_features = video.num_features
    if n_features < group_size and not pad:
        raise InsufficientDataError(
            f"Video '{video.video_id}' has {n_features} features, fewer than "
            f"T={group_size}"
        )
    if n_features < group_size:
        logger.warning(
            "Padding groups of video '%s' from %d to %d features",
            video.video_id,
            n_features,
            group_size,
        )

    log_p = gmm.log_component_probabilities(video.features)
    positions = np.arange(n_features)
    groups = []
    for k in range(gmm.n_components):
        scores = log_p[:, k]
        order = np.lexsort((positions, -scores))
        if n_features >= group_size:
            chosen = order[:group_size]
        else:
            cycled = order[np.arange(group_size) % n_features]
            chosen = cycled[np.argsort(-scores[cycled], kind="stable")]
        groups.append(
            FeatureGroup(
                video_id=video.video_id,
                component_index=k,
                members=video.features[chosen],
                member_indices=chosen,
                member_log_probabilities=scores[chosen],
            )
        )
    return groups
