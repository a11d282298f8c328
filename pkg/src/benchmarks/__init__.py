"""Synthetic benchmark data."""

from .synthetic import (
    SyntheticSpec,
    generate_covariance_only,
    generate_synthetic,
    label_table,
    split_videos,
)

__all__ = [
    "SyntheticSpec",
    "generate_covariance_only",
    "generate_synthetic",
    "label_table",
    "split_videos",
]
