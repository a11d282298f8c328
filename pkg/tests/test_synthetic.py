"""Tests for the synthetic descriptor generator."""

import numpy as np
import pytest

from src.benchmarks.synthetic import (
    SyntheticSpec,
    generate_covariance_only,
    generate_synthetic,
    label_table,
    split_videos,
)
from src.exceptions import ConfigError


class TestGenerateSynthetic:
    """Labeled descriptor bags."""

    def test_shape_and_ids(self):
        videos = generate_synthetic(SyntheticSpec(class_count=2, videos_per_class=3,
                                                  features_per_video=50, dim=5))
        assert len(videos) == 6
        assert videos[0].video_id == "c00_v000" and videos[0].label == "class0"
        assert videos[-1].video_id == "c01_v002" and videos[-1].label == "class1"
        assert all(v.features.shape == (50, 5) for v in videos)

    def test_same_seed_is_bit_identical(self):
        spec = SyntheticSpec(class_count=2, videos_per_class=2, seed=9)
        first, second = generate_synthetic(spec), generate_synthetic(spec)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.features, b.features)

    def test_different_seeds_differ(self):
        first = generate_synthetic(SyntheticSpec(class_count=1, videos_per_class=1, seed=1))
        second = generate_synthetic(SyntheticSpec(class_count=1, videos_per_class=1, seed=2))
        assert not np.array_equal(first[0].features, second[0].features)

    def test_values_are_float32_exact(self):
        video = generate_synthetic(SyntheticSpec(class_count=1, videos_per_class=1))[0]
        np.testing.assert_array_equal(
            video.features, video.features.astype(np.float32).astype(np.float64)
        )

    def test_covariance_only_classes_share_means(self):
        """Class mean descriptors coincide; orientations differ."""
        videos = generate_covariance_only(videos_per_class=10, features_per_video=400)
        by_class = {}
        for video in videos:
            by_class.setdefault(video.label, []).append(video.features)
        pooled = {label: np.concatenate(f) for label, f in by_class.items()}
        first, second = pooled["class0"], pooled["class1"]
        np.testing.assert_allclose(first.mean(axis=0), second.mean(axis=0), atol=0.3)
        gap = np.linalg.norm(np.cov(first.T) - np.cov(second.T))
        assert gap > 1.0

    @pytest.mark.parametrize("override", [
        {"class_count": 0},
        {"features_per_video": 0},
        {"anisotropy": 0.5},
        {"jitter": -1.0},
    ])
    def test_invalid_spec(self, override):
        with pytest.raises(ConfigError):
            generate_synthetic(SyntheticSpec(**override))


class TestSplitVideos:
    """Stratified train/test partition."""

    def test_half_split(self):
        videos = generate_synthetic(SyntheticSpec(class_count=3, videos_per_class=4,
                                                  features_per_video=10))
        train, test = split_videos(videos)
        assert len(train) == len(test) == 6
        assert {v.video_id for v in train}.isdisjoint(v.video_id for v in test)
        assert sorted(v.label for v in train) == sorted(v.label for v in test)

    @pytest.mark.parametrize("fraction", [0.0, 1.0])
    def test_invalid_fraction(self, fraction):
        with pytest.raises(ConfigError):
            split_videos([], fraction)

    def test_label_table(self):
        videos = generate_synthetic(SyntheticSpec(class_count=1, videos_per_class=2,
                                                  features_per_video=10))
        table = label_table(*split_videos(videos))
        assert list(table.columns) == ["video_id", "label", "split"]
        assert list(table["split"]) == ["train", "test"]
