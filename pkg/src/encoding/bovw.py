"""Geodesic bag-of-visual-words encoding.

Keeps all M x K word-to-codeword geodesic distances of a video. Each
codeword's row is normalized to sum to one over the K words, which makes
rows comparable across videos; a row of zeros stays zero.
"""

from typing import Optional, Sequence

import numpy as np

from src.codebook.karcher import KarcherCodebook
from src.encoding.representation import EncodedVideo, EncodingMethod
from src.exceptions import InsufficientDataError
from src.words.modeling import MidLevelWord


def bovw_matrix(
    codebook: KarcherCodebook,
    words: Sequence[MidLevelWord],
    workers: Optional[int] = 1,
) -> np.ndarray:
    """Row-normalized M x K distance matrix."""
    if not words:
        raise InsufficientDataError("BoVW needs at least one word")
    distances = codebook.distances(words, workers).T
    row_sums = distances.sum(axis=1, keepdims=True)
    safe = np.where(row_sums > 0, row_sums, 1.0)
    return np.where(row_sums > 0, distances / safe, 0.0)


def encode_bovw(
    codebook: KarcherCodebook,
    words: Sequence[MidLevelWord],
    video_id: Optional[str] = None,
    workers: Optional[int] = 1,
) -> EncodedVideo:
    """Encode a video's K words against a Karcher codebook.

    Args:
        codebook: Karcher codebook with M centers
        words: The video's K mid-level words
        video_id: Defaults to the provenance of the first word
        workers: Worker threads for the distance computation

    Returns:
        EncodedVideo of length M * K

    Raises:
        InsufficientDataError: If ``words`` is empty
        KindMismatchError: If the words do not match the codebook
    """
    matrix = bovw_matrix(codebook, words, workers)
    return EncodedVideo(
        video_id=video_id if video_id is not None else words[0].video_id,
        method=EncodingMethod.BOVW,
        vector=matrix.ravel(),
        kind=codebook.kind,
        n_codewords=codebook.n_centers,
        dim=len(words),
    )
