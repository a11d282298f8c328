"""Mid-level word models over feature groups."""

from .modeling import (
    MidLevelWord,
    WordKind,
    build_video_words,
    check_same_kind,
    gaussian_embedding,
    model_covariance,
    model_gaussian_spd,
    model_subspace,
    model_word,
    regularized_covariance,
)

__all__ = [
    "MidLevelWord",
    "WordKind",
    "build_video_words",
    "check_same_kind",
    "gaussian_embedding",
    "model_covariance",
    "model_gaussian_spd",
    "model_subspace",
    "model_word",
    "regularized_covariance",
]
