"""Parameter Sweep

One-at-a-time sweeps of the mid-level dimension D or the codebook size M:
the full pipeline is refitted for every value and scored with the
nearest-centroid classifier.

Author: The Manifold-Words Team
License: MIT
"""

import logging
import time
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from src.alignment.descriptors import DescriptorSet
from src.exceptions import ConfigError, InsufficientDataError
from src.pipeline.config import PipelineConfig
from src.pipeline.runner import run_pipeline

from .statistical_analysis import nearest_centroid_ci

logger = logging.getLogger(__name__)

SWEEP_FIELDS = {"D": "embedding_dim", "M": "codebook_size"}


def parameter_sweep(
    config: PipelineConfig,
    parameter: str,
    values: Sequence[int],
    train_sets: Sequence[DescriptorSet],
    test_sets: Sequence[DescriptorSet],
) -> pd.DataFrame:
    """Accuracy for every value of D or M, all else held at ``config``.

    Args:
        config: Baseline configuration
        parameter: 'D' or 'M'
        values: Values to test
        train_sets: Labeled training videos
        test_sets: Labeled test videos

    Returns:
        DataFrame with columns parameter, value, length, accuracy,
        ci_lower, ci_upper (95% bootstrap interval) and seconds

    Raises:
        ConfigError: On an unknown parameter or an invalid value
    """
    if parameter not in SWEEP_FIELDS:
        raise ConfigError(f"Can only sweep {sorted(SWEEP_FIELDS)}, got '{parameter}'")
    if not values:
        raise ConfigError("Sweep needs at least one value")
    if not test_sets:
        raise InsufficientDataError("Sweep needs test videos")
    labels = {v.video_id: v.label for v in list(train_sets) + list(test_sets)}

    rows = []
    for value in values:
        swept = config.with_overrides(**{SWEEP_FIELDS[parameter]: int(value)})
        start = time.perf_counter()
        result = run_pipeline(swept, train_sets, test_sets)
        interval, _ = nearest_centroid_ci(result.train, result.test, labels)
        accuracy = interval.estimate
        rows.append({
            "parameter": parameter,
            "value": int(value),
            "length": result.train[0].length,
            "accuracy": accuracy,
            "ci_lower": interval.lower,
            "ci_upper": interval.upper,
            "seconds": time.perf_counter() - start,
        })
        logger.info("Sweep %s=%d: accuracy %.4f", parameter, value, accuracy)
    return pd.DataFrame(rows)


def sweep_report(table: pd.DataFrame, parameter: str) -> str:
    """Text report of a sweep with the rank correlation of accuracy and value."""
    report = []
    report.append("=" * 70)
    report.append(f"PARAMETER SWEEP: {parameter}")
    report.append("=" * 70)
    report.append(table.to_markdown(index=False, floatfmt=".4f"))
    report.append("")
    if len(table) >= 3 and table["accuracy"].nunique() > 1:
        corr, p_value = spearmanr(table["value"], table["accuracy"])
        report.append(f"Spearman correlation: {corr:.4f} (p={p_value:.4e})")
    best = table.loc[int(np.argmax(table["accuracy"].to_numpy()))]
    report.append(f"Best {parameter}: {int(best['value'])} "
                  f"(accuracy {best['accuracy']:.4f})")
    report.append("=" * 70)
    return "\n".join(report)
