"""Nearest-centroid evaluation of encodings.

A deliberately simple classifier: one centroid per class in encoding
space, each test vector goes to the nearest centroid by Euclidean
distance (ties to the lexicographically first class).
"""

import logging
from typing import Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from src.encoding.representation import EncodedVideo
from src.exceptions import DimensionMismatchError, InsufficientDataError

logger = logging.getLogger(__name__)

VectorsLike = Union[np.ndarray, Sequence[EncodedVideo]]


def _matrix(vectors: VectorsLike) -> np.ndarray:
    if len(vectors) and isinstance(vectors[0], EncodedVideo):
        vectors = [encoded.vector for encoded in vectors]
    return np.atleast_2d(np.asarray(vectors, dtype=np.float64))


def labels_for(encodings: Sequence[EncodedVideo], labels: Dict[str, str]) -> np.ndarray:
    """Look up the label of every encoding by video id."""
    missing = [e.video_id for e in encodings if e.video_id not in labels]
    if missing:
        raise InsufficientDataError(f"No label for videos: {', '.join(missing[:5])}")
    return np.array([labels[e.video_id] for e in encodings])


def nearest_centroid_predict(
    train_vectors: VectorsLike,
    train_labels: Sequence,
    test_vectors: VectorsLike,
    classes: Optional[Sequence] = None,
) -> np.ndarray:
    """Predict a label for each test vector.

    Args:
        train_vectors: Training encodings (rows or EncodedVideos)
        train_labels: One label per training encoding
        test_vectors: Test encodings
        classes: Expected classes; each must have a training vector

    Raises:
        InsufficientDataError: If there is no training data, or a class has
            no training vectors
        DimensionMismatchError: If train and test lengths differ
    """
    train = _matrix(train_vectors)
    test = _matrix(test_vectors)
    train_labels = np.asarray(train_labels)
    if train.shape[0] == 0 or train_labels.size != train.shape[0]:
        raise InsufficientDataError("Need one label per training vector")
    if test.shape[1] != train.shape[1]:
        raise DimensionMismatchError(
            f"Train encodings have length {train.shape[1]}, test {test.shape[1]}"
        )
    present = np.unique(train_labels)
    wanted = np.unique(np.asarray(classes)) if classes is not None else present
    empty = sorted(set(wanted.tolist()) - set(present.tolist()))
    if empty:
        raise InsufficientDataError(f"Classes without training vectors: {empty}")

    centroids = np.stack([train[train_labels == c].mean(axis=0) for c in wanted])
    distances = cdist(test, centroids, "euclidean")
    return wanted[np.argmin(distances, axis=1)]


def nearest_centroid_eval(
    train_vectors: VectorsLike,
    train_labels: Sequence,
    test_vectors: VectorsLike,
    test_labels: Sequence,
) -> float:
    """Nearest-centroid accuracy in [0, 1].

    Every test class must also appear in training.
    """
    test_labels = np.asarray(test_labels)
    if test_labels.size == 0:
        raise InsufficientDataError("No test vectors to evaluate")
    classes = np.union1d(np.unique(np.asarray(train_labels)), np.unique(test_labels))
    predicted = nearest_centroid_predict(train_vectors, train_labels, test_vectors,
                                         classes)
    accuracy = float(np.mean(predicted == test_labels))
    logger.info("Nearest-centroid accuracy %.4f on %d videos", accuracy, test_labels.size)
    return accuracy


def accuracy_report(results: pd.DataFrame, title: str = "Evaluation") -> str:
    """Render an accuracy table between '=' rules."""
    rule = "=" * 70
    body = results.to_markdown(index=False, floatfmt=".4f")
    return f"\n{rule}\n{title}\n{rule}\n{body}\n{rule}\n"
