"""Statistical Analysis of Classification Results

Uncertainty of nearest-centroid accuracies and paired comparisons of two
encoders evaluated on the same test videos.

Author: The Manifold-Words Team
License: MIT
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.encoding.representation import EncodedVideo
from src.exceptions import ConfigError, DimensionMismatchError, InsufficientDataError
from src.pipeline.evaluation import labels_for, nearest_centroid_predict

logger = logging.getLogger(__name__)

REPORT_BOOTSTRAP = 2000


@dataclass
class ConfidenceInterval:
    """Confidence interval for an accuracy."""

    estimate: float
    lower: float
    upper: float
    confidence_level: float
    stderr: float
    n_samples: int

    def __str__(self) -> str:
        return (f"{self.estimate:.4f} "
                f"({self.confidence_level:.0%} CI: [{self.lower:.4f}, {self.upper:.4f}], "
                f"n={self.n_samples})")


@dataclass
class StatisticalTest:
    """Result of a hypothesis test."""

    test_name: str
    statistic: float
    p_value: float
    reject_null: bool
    alpha: float
    interpretation: str

    def __str__(self) -> str:
        decision = "REJECT" if self.reject_null else "FAIL TO REJECT"
        return (f"{self.test_name}: statistic={self.statistic:.4f}, "
                f"p-value={self.p_value:.4f} ({decision} at alpha={self.alpha})")


def _correctness(predicted: Sequence, truth: Sequence) -> np.ndarray:
    predicted, truth = np.asarray(predicted), np.asarray(truth)
    if predicted.shape != truth.shape:
        raise DimensionMismatchError(
            f"{predicted.size} predictions for {truth.size} labels"
        )
    if truth.size == 0:
        raise InsufficientDataError("No predictions to analyze")
    return predicted == truth


class AccuracyStatistics:
    """Statistics for classifier accuracies.

    Provides methods for:
    - Bootstrap confidence intervals of an accuracy
    - Exact McNemar test between two classifiers on the same videos
    - Comparing accuracy distributions over repeated seeded runs
    """

    @staticmethod
    def bootstrap_accuracy_ci(
        predicted: Sequence,
        truth: Sequence,
        confidence_level: float = 0.95,
        n_bootstrap: int = 10000,
        seed: Optional[int] = 0,
    ) -> ConfidenceInterval:
        """Percentile bootstrap interval of the accuracy.

        Args:
            predicted: Predicted labels
            truth: True labels
            confidence_level: Confidence level in (0, 1)
            n_bootstrap: Number of resamples
            seed: Seed of the resampling

        Returns:
            ConfidenceInterval around the observed accuracy
        """
        if not 0.0 < confidence_level < 1.0:
            raise ConfigError("confidence_level must lie in (0, 1)")
        correct = _correctness(predicted, truth).astype(np.float64)
        n = correct.size
        rng = np.random.default_rng(seed)
        resampled = correct[rng.integers(0, n, size=(n_bootstrap, n))].mean(axis=1)

        alpha = 1.0 - confidence_level
        lower, upper = np.percentile(resampled, [100 * alpha / 2, 100 * (1 - alpha / 2)])
        return ConfidenceInterval(
            estimate=float(correct.mean()),
            lower=float(lower),
            upper=float(upper),
            confidence_level=confidence_level,
            stderr=float(np.std(resampled, ddof=1)),
            n_samples=n,
        )

    @staticmethod
    def mcnemar_test(
        predicted_a: Sequence,
        predicted_b: Sequence,
        truth: Sequence,
        alpha: float = 0.05,
    ) -> StatisticalTest:
        """Exact McNemar test on the discordant pairs of two classifiers.

        Under the null hypothesis both classifiers err equally often, so the
        number of videos only A gets right is Binomial(n_discordant, 1/2).
        """
        correct_a = _correctness(predicted_a, truth)
        correct_b = _correctness(predicted_b, truth)
        only_a = int(np.sum(correct_a & ~correct_b))
        only_b = int(np.sum(~correct_a & correct_b))
        discordant = only_a + only_b
        if discordant == 0:
            p_value = 1.0
        else:
            p_value = float(stats.binomtest(only_a, discordant, 0.5).pvalue)
        reject = p_value < alpha
        return StatisticalTest(
            test_name="Exact McNemar test",
            statistic=float(only_a - only_b),
            p_value=p_value,
            reject_null=reject,
            alpha=alpha,
            interpretation=("Classifiers differ in accuracy" if reject
                            else "No significant accuracy difference"),
        )

    @staticmethod
    def compare_runs(
        accuracies_a: Sequence[float],
        accuracies_b: Sequence[float],
        alpha: float = 0.05,
    ) -> StatisticalTest:
        """Mann-Whitney U test between accuracies of repeated seeded runs."""
        statistic, p_value = stats.mannwhitneyu(
            accuracies_a, accuracies_b, alternative="two-sided"
        )
        reject = p_value < alpha
        return StatisticalTest(
            test_name="Mann-Whitney U test",
            statistic=float(statistic),
            p_value=float(p_value),
            reject_null=reject,
            alpha=alpha,
            interpretation=("Accuracy distributions differ" if reject
                            else "No significant difference between runs"),
        )


def nearest_centroid_ci(
    train: Sequence[EncodedVideo],
    test: Sequence[EncodedVideo],
    labels: Dict[str, str],
    confidence_level: float = 0.95,
    n_bootstrap: int = REPORT_BOOTSTRAP,
    seed: Optional[int] = 0,
) -> Tuple[ConfidenceInterval, np.ndarray]:
    """Nearest-centroid accuracy with its bootstrap interval.

    Returns:
        The interval and the predicted label of every test encoding
    """
    train_labels = labels_for(train, labels)
    truth = labels_for(test, labels)
    classes = np.union1d(np.unique(train_labels), np.unique(truth))
    predicted = nearest_centroid_predict(train, train_labels, test, classes)
    interval = AccuracyStatistics.bootstrap_accuracy_ci(
        predicted, truth, confidence_level, n_bootstrap, seed
    )
    logger.info("Nearest-centroid accuracy %s", interval)
    return interval, predicted


if __name__ == "__main__":
    rng = np.random.default_rng(42)
    truth = rng.integers(0, 4, 200)
    good = np.where(rng.random(200) < 0.9, truth, (truth + 1) % 4)
    weak = np.where(rng.random(200) < 0.6, truth, (truth + 1) % 4)

    print("Accuracy Statistics Examples")
    print("=" * 70)
    print(f"\nStrong encoder: {AccuracyStatistics.bootstrap_accuracy_ci(good, truth)}")
    print(f"Weak encoder:   {AccuracyStatistics.bootstrap_accuracy_ci(weak, truth)}")
    test = AccuracyStatistics.mcnemar_test(good, weak, truth)
    print(f"\n{test}")
    print(f"Interpretation: {test.interpretation}")
