"""Configuration, stage runner and evaluation."""

from .config import (
    PipelineConfig,
    config_hash,
    load_config,
    save_config,
    stage_seed,
)
from .evaluation import nearest_centroid_eval, nearest_centroid_predict
from .runner import PipelineResult, RunManifest, run_baseline, run_pipeline

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "RunManifest",
    "config_hash",
    "load_config",
    "nearest_centroid_eval",
    "nearest_centroid_predict",
    "run_baseline",
    "run_pipeline",
    "save_config",
    "stage_seed",
]
