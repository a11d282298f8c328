"""manifold-words: Mid-Level Manifold Words for Video Representation

Groups a video's local descriptors by a universal Gaussian mixture,
models each group as a point on a Riemannian manifold (a subspace, a
covariance matrix or an embedded Gaussian), learns intrinsic codebooks
over those points and encodes every video with BoVW, VLAD or Fisher
vectors.

Modules:
    manifolds: SPD and Grassmann geometry
    alignment: Universal GMM and feature groups
    words: Mid-level word models
    codebook: Karcher means, K-Karcher-means, Riemannian GMM
    encoding: BoVW, VLAD, Fisher vectors and low-level baselines
    serialization: Artifact files and text exports
    pipeline: Configuration, runner, evaluation and CLI
    benchmarks: Synthetic descriptors
    analysis: Accuracy statistics and parameter sweeps

Example:
    >>> from src.benchmarks.synthetic import SyntheticSpec, generate_synthetic, split_videos
    >>> from src.pipeline import PipelineConfig, run_pipeline
    >>>
    >>> train, test = split_videos(generate_synthetic(SyntheticSpec()))
    >>> result = run_pipeline(PipelineConfig.desk(), train, test)
    >>> result.manifest.report()

Author: The Manifold-Words Team
License: MIT
"""

from src.__version__ import __author__, __license__, __version__

from src.pipeline.config import PipelineConfig
from src.pipeline.runner import run_pipeline
from src.words.modeling import MidLevelWord, WordKind

__all__ = [
    "MidLevelWord",
    "PipelineConfig",
    "WordKind",
    "run_pipeline",
]
