"""Explicit vector-space embeddings of mid-level words."""

from typing import Sequence

import numpy as np

from src.manifolds.dispatch import embed_points
from src.models.pca import PcaProjection, fit_pca
from src.words.modeling import MidLevelWord, check_same_kind


def embed_words(words: Sequence[MidLevelWord]) -> np.ndarray:
    """Map same-kind words into Euclidean space, one row per word.

    Subspace words use the projection embedding sym_vec(U U^T); covariance
    and Gaussian words use sym_vec(log X). Rows have length d(d+1)/2, or
    (d+1)(d+2)/2 for Gaussian words.

    Raises:
        InsufficientDataError: If ``words`` is empty
        KindMismatchError: If the words mix kinds or shapes
    """
    check_same_kind(words)
    return embed_points([word.payload for word in words])


def embedding_dim(word: MidLevelWord) -> int:
    """Length of the embedding of ``word``."""
    side = word.shape[0]
    return side * (side + 1) // 2


def fit_word_projection(
    words: Sequence[MidLevelWord], output_dim: int
) -> PcaProjection:
    """Fit the PCA that reduces embedded training words to ``output_dim``."""
    return fit_pca(embed_words(words), output_dim)
