"""PCA Projection

Linear dimensionality reduction used twice in the pipeline: on raw
descriptors before the universal GMM, and on embedded mid-level words
before VLAD / Fisher encoding.

Author: The Manifold-Words Team
License: MIT
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from sklearn.decomposition import PCA

from src.exceptions import (
    ConfigError,
    DimensionMismatchError,
    InsufficientDataError,
    InvalidInputError,
)

logger = logging.getLogger(__name__)

ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PcaProjection:
    """Frozen affine projection x -> P (x - mean).

    Attributes:
        mean: Training mean, length input_dim
        components: output_dim x input_dim matrix with orthonormal rows
    """

    mean: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).ravel()
        components = np.array(self.components, dtype=np.float64, ndmin=2)
        if components.shape[1] != mean.size:
            raise DimensionMismatchError(
                f"PCA components {components.shape} do not match mean length {mean.size}"
            )
        if components.shape[0] > components.shape[1]:
            raise ConfigError("PCA output_dim exceeds input_dim")
        gram = components @ components.T
        if np.max(np.abs(gram - np.eye(components.shape[0]))) > ORTHONORMAL_TOL:
            raise InvalidInputError("PCA projection rows are not orthonormal")
        mean.setflags(write=False)
        components.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "components", components)

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    @property
    def output_dim(self) -> int:
        return self.components.shape[0]

    def transform(self, vectors: np.ndarray) -> np.ndarray:
        """Project one vector or a stack of row vectors."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape[-1] != self.input_dim:
            raise DimensionMismatchError(
                f"Expected vectors of length {self.input_dim}, got {vectors.shape[-1]}"
            )
        return (vectors - self.mean) @ self.components.T

    def inverse_transform(self, projected: np.ndarray) -> np.ndarray:
        """Map projected coordinates back into the input space."""
        return np.asarray(projected, dtype=np.float64) @ self.components + self.mean

    def explained_variance(self, vectors: np.ndarray) -> float:
        """Total variance of ``vectors`` captured by the projection."""
        projected = self.transform(vectors)
        return float(np.sum(np.var(projected, axis=0, ddof=1)))


def fit_pca(
    vectors: Union[np.ndarray, Sequence[np.ndarray]], output_dim: int
) -> PcaProjection:
    """Fit a PCA projection onto the top principal directions.

    Rows follow a deterministic sign convention: the largest-magnitude entry
    of each row is positive.

    Args:
        vectors: Samples as rows
        output_dim: Number of principal directions kept

    Returns:
        Fitted PcaProjection

    Raises:
        ConfigError: If output_dim is not in [1, input_dim]
        InsufficientDataError: If there are fewer samples than output_dim
    """
    data = np.asarray(vectors, dtype=np.float64)
    if data.ndim != 2:
        raise InvalidInputError(f"PCA expects a 2-D sample matrix, got {data.shape}")
    n_samples, input_dim = data.shape
    if not 1 <= output_dim <= input_dim:
        raise ConfigError(
            f"PCA output_dim {output_dim} must lie in [1, input_dim={input_dim}]"
        )
    if n_samples < output_dim:
        raise InsufficientDataError(
            f"PCA to {output_dim} dimensions needs at least {output_dim} samples, "
            f"got {n_samples}"
        )
    if not np.all(np.isfinite(data)):
        raise InvalidInputError("PCA input has non-finite entries")

    pca = PCA(n_components=output_dim, svd_solver="full")
    pca.fit(data)
    components = pca.components_.copy()

    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(output_dim), pivots])
    signs[signs == 0] = 1.0
    components *= signs[:, None]

    logger.debug(
        "PCA %d -> %d retains %.4f of the variance",
        input_dim,
        output_dim,
        float(np.sum(pca.explained_variance_ratio_)),
    )
    return PcaProjection(mean=pca.mean_, components=components)
