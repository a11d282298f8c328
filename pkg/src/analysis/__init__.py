"""Accuracy statistics and parameter sweeps."""

from .parameter_sweep import parameter_sweep, sweep_report
from .statistical_analysis import (
    AccuracyStatistics,
    ConfidenceInterval,
    StatisticalTest,
    nearest_centroid_ci,
)

__all__ = [
    "AccuracyStatistics",
    "ConfidenceInterval",
    "StatisticalTest",
    "nearest_centroid_ci",
    "parameter_sweep",
    "sweep_report",
]
