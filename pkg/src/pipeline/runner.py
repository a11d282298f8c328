"""Pipeline Runner

Runs the stages in order:

    descriptor PCA -> universal GMM -> feature groups -> mid-level words
    -> codebook (Karcher codebook or Riemannian GMM) -> encodings

Every fit function takes training data only; test videos pass through the
frozen models. Each stage is timed, and an error escaping a stage carries
the stage's name.

Author: The Manifold-Words Team
License: MIT
"""

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src.alignment.descriptors import DescriptorSet, pool_features
from src.alignment.universal_gmm import SphericalGmm, fit_spherical_gmm
from src.codebook.embedding import fit_word_projection
from src.codebook.karcher import KarcherCodebook, k_karcher_means
from src.codebook.riemannian_gmm import RiemannianGmm, fit_riemannian_gmm
from src.encoding.baselines import (
    encode_low_level_bovw,
    encode_low_level_fisher,
    encode_low_level_vlad,
    encode_mean_baseline,
    fit_descriptor_codebook,
)
from src.encoding.bovw import encode_bovw
from src.encoding.fisher import encode_fisher
from src.encoding.representation import EncodedVideo, EncodingMethod
from src.encoding.vlad import encode_vlad
from src.exceptions import (
    ConfigError,
    DimensionMismatchError,
    InsufficientDataError,
    MidLevelError,
    NumericalError,
)
from src.models.pca import PcaProjection, fit_pca
from src.parallel import parallel_map
from src.pipeline.config import PipelineConfig, config_hash, stage_seed
from src.words.modeling import MidLevelWord, build_video_words

logger = logging.getLogger(__name__)

Codebook = Union[KarcherCodebook, RiemannianGmm]

GMM_SEED_LABEL = "universal-gmm"
CODEBOOK_SEED_LABEL = "codebook"
BASELINE_SEED_LABEL = "baseline-codebook"


@dataclass
class RunManifest:
    """Provenance of a pipeline run."""

    config_hash: str
    root_seed: int
    stage_seeds: Dict[str, int] = field(default_factory=dict)
    stage_timings: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "root_seed": self.root_seed,
            "stage_seeds": dict(self.stage_seeds),
            "stage_timings": dict(self.stage_timings),
        }

    def report(self):
        """Print the manifest."""
        print(f"\n{'='*70}")
        print("Pipeline Run Manifest")
        print(f"{'='*70}")
        print(f"  Config hash: {self.config_hash}")
        print(f"  Root seed:   {self.root_seed}")
        print("\nStage seeds:")
        for label, seed in self.stage_seeds.items():
            print(f"  {label:<16} {seed}")
        print("\nStage timings (s):")
        for stage, seconds in self.stage_timings.items():
            print(f"  {stage:<16} {seconds:8.3f}")
        print(f"\nTotal: {sum(self.stage_timings.values()):.3f} s")
        print(f"{'='*70}\n")


@dataclass
class FittedModels:
    """Everything fitted on the training split."""

    descriptor_pca: Optional[PcaProjection]
    gmm: SphericalGmm
    codebook: Codebook


@dataclass
class PipelineResult:
    train: List[EncodedVideo]
    test: List[EncodedVideo]
    models: FittedModels
    manifest: RunManifest


@contextmanager
def pipeline_stage(name: str, timings: Dict[str, float]):
    """Time a stage and tag escaping errors with its name."""
    logger.info("Stage '%s' started", name)
    start = time.perf_counter()
    try:
        yield
    except MidLevelError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc), stage=name) from exc
    finally:
        timings[name] = time.perf_counter() - start
    logger.info("Stage '%s' finished in %.3f s", name, timings[name])


def _check_videos(videos: Sequence[DescriptorSet], what: str) -> int:
    if not videos:
        raise InsufficientDataError(f"No {what} videos")
    dims = {video.dim for video in videos}
    if len(dims) != 1:
        raise DimensionMismatchError(f"{what} videos mix descriptor dimensions {dims}")
    return dims.pop()


def fit_descriptor_pca(
    train_sets: Sequence[DescriptorSet], config: PipelineConfig
) -> Optional[PcaProjection]:
    """PCA of pooled training descriptors; None when pca_factor is 1."""
    dim = _check_videos(train_sets, "training")
    if config.pca_factor >= 1.0:
        return None
    return fit_pca(pool_features(train_sets), config.reduced_dim(dim))


def fit_universal_gmm(
    train_sets: Sequence[DescriptorSet],
    pca: Optional[PcaProjection],
    config: PipelineConfig,
) -> SphericalGmm:
    pooled = pool_features(train_sets)
    if pca is not None:
        pooled = pca.transform(pooled)
    return fit_spherical_gmm(
        pooled,
        config.n_components,
        seed=stage_seed(config.seed, GMM_SEED_LABEL),
        max_iter=config.em_max_iter,
        tol=config.em_tol,
        workers=config.workers,
    )


def build_words(
    gmm: SphericalGmm,
    pca: Optional[PcaProjection],
    videos: Sequence[DescriptorSet],
    config: PipelineConfig,
) -> List[List[MidLevelWord]]:
    """K mid-level words per video, in video order."""
    build = partial(
        build_video_words,
        gmm,
        pca,
        kind=config.kind,
        group_size=config.group_size,
        subspace_dim=config.subspace_dim,
        pad=config.pad_groups,
    )
    return parallel_map(build, videos, config.workers)


def fit_codebook(train_words: Sequence[MidLevelWord], config: PipelineConfig) -> Codebook:
    """Karcher codebook (BoVW, VLAD) or Riemannian GMM (FV) from training words."""
    seed = stage_seed(config.seed, CODEBOOK_SEED_LABEL)
    method = config.method
    if method is EncodingMethod.FV:
        return fit_riemannian_gmm(
            train_words,
            config.resolved_codebook_size,
            config.embedding_dim,
            seed=seed,
            max_iter=config.em_max_iter,
            tol=config.em_tol,
            workers=config.workers,
        )
    codebook = k_karcher_means(
        train_words,
        config.resolved_codebook_size,
        seed=seed,
        max_iter=config.kmeans_max_iter,
        init=config.codebook_init,
        karcher_max_iter=config.karcher_max_iter,
        karcher_tol=config.karcher_tol,
        workers=config.workers,
    )
    if method is EncodingMethod.VLAD:
        pca = fit_word_projection(train_words, config.embedding_dim)
        codebook = KarcherCodebook(
            kind=codebook.kind,
            centers=codebook.centers,
            pca=pca,
            objective_trace=codebook.objective_trace,
            assignments=codebook.assignments,
        )
    return codebook


def encode_words(
    codebook: Codebook,
    words_per_video: Sequence[Sequence[MidLevelWord]],
    config: PipelineConfig,
) -> List[EncodedVideo]:
    """Encode every video with the configured encoder."""
    method = config.method
    if method is EncodingMethod.FV:
        if not isinstance(codebook, RiemannianGmm):
            raise ConfigError("Fisher encoding needs a Riemannian GMM")
        encode = partial(encode_fisher, codebook, strict_paper=config.strict_paper_fv)
    else:
        if not isinstance(codebook, KarcherCodebook):
            raise ConfigError(f"{method.name} encoding needs a Karcher codebook")
        if method is EncodingMethod.BOVW:
            encode = partial(encode_bovw, codebook)
        else:
            encode = partial(encode_vlad, codebook, None)
    return parallel_map(encode, words_per_video, config.workers)


def _flatten(words_per_video):
    return [word for words in words_per_video for word in words]


def run_pipeline(
    config: PipelineConfig,
    train_sets: Sequence[DescriptorSet],
    test_sets: Sequence[DescriptorSet],
) -> PipelineResult:
    """
    Fit every model on ``train_sets`` and encode both splits.

    Args:
        config: Pipeline hyperparameters
        train_sets: Training videos
        test_sets: Test videos (may be empty)

    Returns:
        PipelineResult with encodings, fitted models and a run manifest

    Raises:
        MidLevelError: Any stage failure, with ``stage`` set

    Example:
        >>> result = run_pipeline(PipelineConfig.desk(), train, test)
        >>> len(result.train[0].vector)  # 2 * M * D
        128
    """
    timings: Dict[str, float] = {}
    with pipeline_stage("validate", timings):
        dim = _check_videos(train_sets, "training")
        if test_sets:
            test_dim = _check_videos(test_sets, "test")
            if test_dim != dim:
                raise DimensionMismatchError(
                    f"Train descriptors have d={dim}, test d={test_dim}"
                )
        config.validate(dim)

    manifest = RunManifest(
        config_hash=config_hash(config),
        root_seed=config.seed,
        stage_seeds={
            GMM_SEED_LABEL: stage_seed(config.seed, GMM_SEED_LABEL),
            CODEBOOK_SEED_LABEL: stage_seed(config.seed, CODEBOOK_SEED_LABEL),
        },
        stage_timings=timings,
    )

    with pipeline_stage("descriptor-pca", timings):
        pca = fit_descriptor_pca(train_sets, config)
    with pipeline_stage("fit-gmm", timings):
        gmm = fit_universal_gmm(train_sets, pca, config)
    with pipeline_stage("build-words", timings):
        train_words = build_words(gmm, pca, train_sets, config)
        test_words = build_words(gmm, pca, test_sets, config)
    with pipeline_stage("fit-codebook", timings):
        codebook = fit_codebook(_flatten(train_words), config)
    with pipeline_stage("encode", timings):
        train_encoded = encode_words(codebook, train_words, config)
        test_encoded = encode_words(codebook, test_words, config)

    logger.info(
        "Pipeline finished: %s words, %s encoding of length %d",
        config.kind.value,
        config.method.value,
        train_encoded[0].length,
    )
    return PipelineResult(
        train=train_encoded,
        test=test_encoded,
        models=FittedModels(pca, gmm, codebook),
        manifest=manifest,
    )


def run_baseline(
    config: PipelineConfig,
    method: EncodingMethod,
    train_sets: Sequence[DescriptorSet],
    test_sets: Sequence[DescriptorSet],
):
    """Encode both splits with a low-level baseline.

    The mean baseline needs no model. BoVW and VLAD fit a k-means codebook
    on the pooled (PCA-reduced) training descriptors; the descriptor FV uses
    the universal spherical GMM.

    Returns:
        Tuple of (train encodings, test encodings)
    """
    timings: Dict[str, float] = {}
    with pipeline_stage("baseline", timings):
        if method is EncodingMethod.MEAN:
            encode = encode_mean_baseline
        elif method in (EncodingMethod.LOW_LEVEL_BOVW, EncodingMethod.LOW_LEVEL_VLAD):
            pca = fit_descriptor_pca(train_sets, config)
            pooled = pool_features(train_sets)
            if pca is not None:
                pooled = pca.transform(pooled)
            codebook = fit_descriptor_codebook(
                pooled,
                config.baseline_codebook_size_for(method),
                pca=pca,
                seed=stage_seed(config.seed, BASELINE_SEED_LABEL),
                max_iter=config.kmeans_max_iter,
            )
            encoder = (
                encode_low_level_bovw
                if method is EncodingMethod.LOW_LEVEL_BOVW
                else encode_low_level_vlad
            )
            encode = partial(encoder, codebook)
        elif method is EncodingMethod.LOW_LEVEL_FV:
            pca = fit_descriptor_pca(train_sets, config)
            gmm = fit_universal_gmm(train_sets, pca, config)
            encode = partial(encode_low_level_fisher, gmm, pca=pca,
                             strict_paper=config.strict_paper_fv)
        else:
            raise ConfigError(f"{method.name} is not a low-level baseline")
        train = parallel_map(encode, train_sets, config.workers)
        test = parallel_map(encode, test_sets, config.workers)
    return train, test
