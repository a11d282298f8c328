"""Per-video sets of local descriptors."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.exceptions import InsufficientDataError, InvalidInputError


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    """One video's bag of d-dimensional local feature vectors.

    Attributes:
        video_id: Identifier of the video
        features: L x d matrix, one descriptor per row
        label: Optional class label (synthetic data and evaluation only)
    """

    video_id: str
    features: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64, ndmin=2)
        if features.ndim != 2:
            raise InvalidInputError(
                f"Descriptors of '{self.video_id}' must form an L x d matrix"
            )
        if features.shape[0] < 1 or features.shape[1] < 1:
            raise InsufficientDataError(f"Video '{self.video_id}' has no descriptors")
        if not np.all(np.isfinite(features)):
            raise InvalidInputError(
                f"Video '{self.video_id}' has non-finite descriptor entries"
            )
        features.setflags(write=False)
        object.__setattr__(self, "features", features)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_features(self) -> int:
        return self.features.shape[0]

    def project(self, projection) -> "DescriptorSet":
        """Return a copy with every descriptor mapped through ``projection``."""
        return DescriptorSet(self.video_id, projection.transform(self.features),
                             self.label)


def pool_features(videos: Sequence[DescriptorSet]) -> np.ndarray:
    """Stack the descriptors of several videos into one matrix."""
    if not videos:
        raise InsufficientDataError("No videos to pool")
    dims = {video.dim for video in videos}
    if len(dims) != 1:
        raise InvalidInputError(f"Videos have mixed descriptor dimensions: {dims}")
    return np.concatenate([video.features for video in videos], axis=0)
