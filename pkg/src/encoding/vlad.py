"""VLAD over mid-level words.

Words are assigned to their nearest Karcher center on the manifold; the
residuals are then taken in the PCA-reduced embedding space

    a_m = sum_{NN(X) = X_m} (Phi(X) - Phi(X_m))

and the concatenation a_1 ... a_M is L2-normalized as a whole.
"""

from typing import Optional, Sequence

import numpy as np

from src.codebook.embedding import embed_words
from src.codebook.karcher import KarcherCodebook
from src.encoding.normalization import l2_normalize
from src.encoding.representation import EncodedVideo, EncodingMethod
from src.exceptions import ConfigError, InsufficientDataError
from src.models.pca import PcaProjection
from src.words.modeling import MidLevelWord


def vlad_residuals(
    codebook: KarcherCodebook,
    pca: PcaProjection,
    words: Sequence[MidLevelWord],
    workers: Optional[int] = 1,
) -> np.ndarray:
    """Unnormalized accumulated residuals, shape (M, D)."""
    if not words:
        raise InsufficientDataError("VLAD needs at least one word")
    labels = codebook.assign(words, workers)
    phi = pca.transform(embed_words(words))
    center_words = [MidLevelWord(codebook.kind, center) for center in codebook.centers]
    center_phi = pca.transform(embed_words(center_words))
    residuals = np.zeros((codebook.n_centers, pca.output_dim))
    np.add.at(residuals, labels, phi - center_phi[labels])
    return residuals


def encode_vlad(
    codebook: KarcherCodebook,
    pca: Optional[PcaProjection],
    words: Sequence[MidLevelWord],
    video_id: Optional[str] = None,
    workers: Optional[int] = 1,
) -> EncodedVideo:
    """Encode a video's words as an L2-normalized VLAD vector of length M * D.

    Args:
        codebook: Karcher codebook
        pca: Word-embedding projection; falls back to ``codebook.pca``
        words: The video's mid-level words
        video_id: Defaults to the provenance of the first word
        workers: Worker threads for the assignment

    Raises:
        ConfigError: If no projection is available
        KindMismatchError: If the words do not match the codebook
    """
    pca = pca if pca is not None else codebook.pca
    if pca is None:
        raise ConfigError("VLAD encoding needs a word-embedding PCA projection")
    residuals = vlad_residuals(codebook, pca, words, workers)
    return EncodedVideo(
        video_id=video_id if video_id is not None else words[0].video_id,
        method=EncodingMethod.VLAD,
        vector=l2_normalize(residuals.ravel()),
        kind=codebook.kind,
        n_codewords=codebook.n_centers,
        dim=pca.output_dim,
    )
