"""Tests for accuracy statistics."""

import numpy as np
import pytest

from src.analysis import AccuracyStatistics, nearest_centroid_ci
from src.encoding import EncodingMethod
from src.exceptions import ConfigError, DimensionMismatchError, InsufficientDataError
from src.pipeline.config import PipelineConfig
from src.pipeline.evaluation import labels_for, nearest_centroid_eval
from src.pipeline.runner import run_baseline


class TestBootstrap:
    """Percentile bootstrap of an accuracy."""

    def test_all_correct(self):
        labels = ["a", "b", "c"] * 10
        ci = AccuracyStatistics.bootstrap_accuracy_ci(labels, labels, n_bootstrap=500)
        assert (ci.estimate, ci.lower, ci.upper) == (1.0, 1.0, 1.0)
        assert ci.n_samples == 30

    def test_interval_contains_estimate(self, rng):
        truth = rng.integers(0, 3, 100)
        predicted = np.where(rng.random(100) < 0.7, truth, (truth + 1) % 3)
        ci = AccuracyStatistics.bootstrap_accuracy_ci(predicted, truth, n_bootstrap=2000)
        assert ci.lower <= ci.estimate <= ci.upper
        assert ci.stderr > 0
        assert "95% CI" in str(ci)

    def test_seeded_resampling_is_deterministic(self, rng):
        truth = rng.integers(0, 2, 50)
        predicted = rng.integers(0, 2, 50)
        first = AccuracyStatistics.bootstrap_accuracy_ci(predicted, truth, seed=3)
        second = AccuracyStatistics.bootstrap_accuracy_ci(predicted, truth, seed=3)
        assert first == second

    @pytest.mark.parametrize("level", [0.0, 1.0, 1.5])
    def test_invalid_confidence(self, level):
        with pytest.raises(ConfigError):
            AccuracyStatistics.bootstrap_accuracy_ci([1], [1], confidence_level=level)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            AccuracyStatistics.bootstrap_accuracy_ci([1, 2], [1])

    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            AccuracyStatistics.bootstrap_accuracy_ci([], [])


class TestMcNemar:
    """Exact test on discordant pairs."""

    def test_identical_classifiers(self):
        truth = [0, 1, 0, 1]
        result = AccuracyStatistics.mcnemar_test([0, 1, 1, 1], [0, 1, 1, 1], truth)
        assert result.p_value == 1.0 and not result.reject_null
        assert result.statistic == 0.0

    def test_one_sided_disagreement(self):
        truth = np.zeros(40, dtype=int)
        strong = truth.copy()
        weak = truth.copy()
        weak[:20] = 1
        result = AccuracyStatistics.mcnemar_test(strong, weak, truth)
        assert result.statistic == 20.0
        assert result.reject_null
        assert result.p_value == pytest.approx(2 * 0.5 ** 20)


class TestCompareRuns:
    """Mann-Whitney comparison of repeated runs."""

    def test_separated_runs_differ(self):
        result = AccuracyStatistics.compare_runs([0.9, 0.91, 0.92, 0.93, 0.94],
                                                 [0.5, 0.51, 0.52, 0.53, 0.54])
        assert result.reject_null
        assert "REJECT" in str(result)

    def test_overlapping_runs(self):
        result = AccuracyStatistics.compare_runs([0.8, 0.9, 0.85], [0.82, 0.88, 0.86])
        assert not result.reject_null


class TestNearestCentroidInterval:
    """Accuracy of encodings with its interval."""

    def test_matches_point_accuracy(self, small_videos):
        train, test = small_videos
        encoded_train, encoded_test = run_baseline(
            PipelineConfig.desk(), EncodingMethod.MEAN, train, test
        )
        labels = {v.video_id: v.label for v in list(train) + list(test)}
        interval, predicted = nearest_centroid_ci(encoded_train, encoded_test, labels)
        expected = nearest_centroid_eval(
            encoded_train, labels_for(encoded_train, labels),
            encoded_test, labels_for(encoded_test, labels),
        )
        assert interval.estimate == pytest.approx(expected)
        assert interval.lower <= interval.estimate <= interval.upper
        assert len(predicted) == len(encoded_test)

    def test_missing_label(self, small_videos):
        train, test = small_videos
        encoded_train, encoded_test = run_baseline(
            PipelineConfig.desk(), EncodingMethod.MEAN, train, test
        )
        with pytest.raises(InsufficientDataError):
            nearest_centroid_ci(encoded_train, encoded_test, {})
