"""Command-line interface.

Stage-wise subcommands exchange artifacts through explicit paths:

    synth         descriptors + labels.csv
    fit-gmm       descriptor PCA + universal GMM    (training split only)
    build-words   train.mwwd / test.mwwd
    fit-codebook  codebook.mwcb or riemannian_gmm.mwrg
    encode        train.mwev / test.mwev + text exports
    evaluate      nearest-centroid accuracy with a bootstrap interval
    baseline      low-level mean / BoVW / VLAD / FV encodings + accuracy
    run-all       every stage in one process
    sweep         accuracy over a range of D or M

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.__version__ import __version__
from src.analysis.parameter_sweep import parameter_sweep, sweep_report
from src.analysis.statistical_analysis import AccuracyStatistics, nearest_centroid_ci
from src.benchmarks.synthetic import (
    SyntheticSpec,
    generate_covariance_only,
    generate_synthetic,
    label_table,
    split_videos,
)
from src.encoding.representation import EncodingMethod
from src.exceptions import (
    ConfigError,
    DimensionMismatchError,
    FormatError,
    MidLevelError,
)
from src.pipeline.config import PipelineConfig, load_config, save_config
from src.pipeline.evaluation import accuracy_report, labels_for
from src.pipeline.runner import (
    build_words,
    encode_words,
    fit_codebook,
    fit_descriptor_pca,
    fit_universal_gmm,
    pipeline_stage,
    run_baseline,
    run_pipeline,
)
from src.serialization.artifacts import (
    load_codebook,
    load_descriptor_dir,
    load_encodings,
    load_gmm,
    load_pca,
    load_riemannian_gmm,
    load_words,
    save_codebook,
    save_descriptor_dir,
    save_encodings,
    save_gmm,
    save_pca,
    save_riemannian_gmm,
    save_words,
)
from src.serialization.tables import export_encodings_text, read_labels, write_labels

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

DESCRIPTOR_DIR = "descriptors"
LABELS_FILE = "labels.csv"
PCA_FILE = "descriptor_pca.mwpc"
GMM_FILE = "universal_gmm.mwgm"
CODEBOOK_FILE = "codebook.mwcb"
RIEMANNIAN_GMM_FILE = "riemannian_gmm.mwrg"
SPLITS = ("train", "test")
BASELINES = ("mean", "llbovw", "llvlad", "llfv")


# Argument parsing ----------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", type=Path, help="versioned JSON config file")
    parser.add_argument("--preset", choices=["paper", "desk"], default="desk",
                        help="base configuration when no --config is given")
    parser.add_argument("--seed", type=int, help="root seed")
    parser.add_argument("--workers", type=int, help="worker threads (default: all cores)")
    parser.add_argument("--word-kind", choices=["sub", "cov", "gau"])
    parser.add_argument("--encoder", choices=["bovw", "vlad", "fv"])
    parser.add_argument("--strict-paper-fv", action="store_true", default=None,
                        help="omit the '-1' term of the FV variance block")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manifold-words",
        description="Mid-level manifold words for video representation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="generate synthetic descriptors")
    synth.add_argument("--output", type=Path, required=True)
    synth.add_argument("--classes", type=int, default=4)
    synth.add_argument("--videos-per-class", type=int, default=20)
    synth.add_argument("--features", type=int, default=200)
    synth.add_argument("--dim", type=int, default=8)
    synth.add_argument("--covariance-only", action="store_true",
                       help="two classes that differ only in covariance")
    synth.add_argument("--test-fraction", type=float, default=0.5)

    fit_gmm = commands.add_parser("fit-gmm", help="fit descriptor PCA + universal GMM")
    fit_gmm.add_argument("--input", type=Path, required=True, help="dataset directory")
    fit_gmm.add_argument("--labels", type=Path)
    fit_gmm.add_argument("--output", type=Path, required=True, help="models directory")

    words = commands.add_parser("build-words", help="build mid-level words")
    words.add_argument("--input", type=Path, required=True, help="dataset directory")
    words.add_argument("--labels", type=Path)
    words.add_argument("--models", type=Path, required=True)
    words.add_argument("--output", type=Path, required=True, help="words directory")

    codebook = commands.add_parser("fit-codebook", help="fit the mid-level codebook")
    codebook.add_argument("--input", type=Path, required=True, help="words directory")
    codebook.add_argument("--output", type=Path, required=True, help="models directory")

    encode = commands.add_parser("encode", help="encode both splits")
    encode.add_argument("--input", type=Path, required=True, help="words directory")
    encode.add_argument("--models", type=Path, required=True)
    encode.add_argument("--output", type=Path, required=True)

    evaluate = commands.add_parser("evaluate", help="nearest-centroid accuracy")
    evaluate.add_argument("--input", type=Path, required=True, help="encodings directory")
    evaluate.add_argument("--labels", type=Path, required=True)
    evaluate.add_argument("--compare", type=Path,
                          help="second encodings directory for a McNemar test")

    baseline = commands.add_parser("baseline", help="low-level baseline encodings")
    baseline.add_argument("--input", type=Path, help="dataset directory (default: synth)")
    baseline.add_argument("--labels", type=Path)
    baseline.add_argument("--method", choices=BASELINES, required=True)
    baseline.add_argument("--output", type=Path, required=True, help="work directory")

    run_all = commands.add_parser("run-all", help="run every stage")
    run_all.add_argument("--input", type=Path, help="dataset directory (default: synth)")
    run_all.add_argument("--labels", type=Path)
    run_all.add_argument("--output", type=Path, required=True, help="work directory")

    sweep = commands.add_parser("sweep", help="accuracy over D or M")
    sweep.add_argument("--input", type=Path, help="dataset directory (default: synth)")
    sweep.add_argument("--labels", type=Path)
    sweep.add_argument("--param", choices=["D", "M"], required=True)
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--output", type=Path, help="CSV file for the table")

    for sub in commands.choices.values():
        _add_common(sub)
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Config file (or preset), then flag overrides."""
    if args.config is not None:
        base = load_config(args.config)
    elif args.preset == "paper":
        base = PipelineConfig.paper()
    else:
        base = PipelineConfig.desk()
    return base.with_overrides(
        seed=args.seed,
        workers=args.workers,
        word_kind=args.word_kind,
        encoder=args.encoder,
        strict_paper_fv=args.strict_paper_fv,
    ).validate()


# Dataset helpers -----------------------------------------------------------------

def _labels_path(args) -> Path:
    return args.labels if args.labels is not None else args.input / LABELS_FILE


def _load_split(directory: Path, table: pd.DataFrame, split: str):
    rows = table[table["split"] == split]
    labels = dict(zip(rows["video_id"], rows["label"]))
    return load_descriptor_dir(directory / DESCRIPTOR_DIR, list(rows["video_id"]), labels)


def _load_dataset(directory: Path, labels_path: Path):
    table = read_labels(labels_path)
    return _load_split(directory, table, "train"), _load_split(directory, table, "test")


def _group_by_video(words) -> List[list]:
    grouped: Dict[str, list] = {}
    for word in words:
        grouped.setdefault(word.video_id, []).append(word)
    return list(grouped.values())


def _load_codebook(models: Path, config: PipelineConfig):
    if config.method is EncodingMethod.FV:
        return load_riemannian_gmm(models / RIEMANNIAN_GMM_FILE)
    return load_codebook(models / CODEBOOK_FILE)


def _save_codebook(codebook, models: Path, config: PipelineConfig):
    if config.method is EncodingMethod.FV:
        save_riemannian_gmm(codebook, models / RIEMANNIAN_GMM_FILE)
    else:
        save_codebook(codebook, models / CODEBOOK_FILE)


def _synthesize(args, seed: int):
    if getattr(args, "covariance_only", False):
        videos = generate_covariance_only(
            videos_per_class=args.videos_per_class,
            features_per_video=args.features,
            dim=args.dim,
            seed=seed,
        )
    else:
        videos = generate_synthetic(
            SyntheticSpec(
                class_count=getattr(args, "classes", 4),
                videos_per_class=getattr(args, "videos_per_class", 20),
                features_per_video=getattr(args, "features", 200),
                dim=getattr(args, "dim", 8),
                seed=seed,
            )
        )
    return split_videos(videos, getattr(args, "test_fraction", 0.5))


def _write_dataset(directory: Path, train, test):
    save_descriptor_dir(list(train) + list(test), directory / DESCRIPTOR_DIR)
    write_labels(label_table(train, test), directory / LABELS_FILE)


def _videos_or_synth(args, config: PipelineConfig, work: Optional[Path] = None):
    """Load --input, or synthesize a dataset (written under ``work`` if given)."""
    if args.input is not None:
        return _load_dataset(args.input, _labels_path(args))
    train, test = _synthesize(args, config.seed)
    if work is not None:
        _write_dataset(work, train, test)
    return train, test


def _video_labels(train_sets, test_sets) -> Dict[str, str]:
    return {v.video_id: v.label for v in list(train_sets) + list(test_sets)}


def _scores(train, test, labels: Dict[str, str]):
    """Accuracy columns of a report row, and the test predictions."""
    interval, predicted = nearest_centroid_ci(train, test, labels)
    row = {"accuracy": interval.estimate, "ci_lower": interval.lower,
           "ci_upper": interval.upper}
    return row, predicted


def _save_split_encodings(encoded_by_split, directory: Path):
    for split, encoded in zip(SPLITS, encoded_by_split):
        if encoded:
            save_encodings(encoded, directory / f"{split}.mwev")
            export_encodings_text(encoded, directory / f"{split}.csv")


# Commands --------------------------------------------------------------------------

def cmd_synth(args, config: PipelineConfig) -> int:
    train, test = _synthesize(args, config.seed)
    _write_dataset(args.output, train, test)
    print(f"Wrote {len(train)} train / {len(test)} test videos to {args.output}")
    return 0


def cmd_fit_gmm(args, config: PipelineConfig) -> int:
    train, _ = _load_dataset(args.input, _labels_path(args))
    timings: Dict[str, float] = {}
    with pipeline_stage("validate", timings):
        config.validate(train[0].dim)
    with pipeline_stage("descriptor-pca", timings):
        pca = fit_descriptor_pca(train, config)
    with pipeline_stage("fit-gmm", timings):
        gmm = fit_universal_gmm(train, pca, config)
    if pca is not None:
        save_pca(pca, args.output / PCA_FILE)
    save_gmm(gmm, args.output / GMM_FILE)
    return 0


def cmd_build_words(args, config: PipelineConfig) -> int:
    train, test = _load_dataset(args.input, _labels_path(args))
    pca_path = args.models / PCA_FILE
    pca = load_pca(pca_path) if pca_path.exists() else None
    gmm = load_gmm(args.models / GMM_FILE)
    timings: Dict[str, float] = {}
    with pipeline_stage("build-words", timings):
        for split, videos in zip(SPLITS, (train, test)):
            words = [w for ws in build_words(gmm, pca, videos, config) for w in ws]
            if words:
                save_words(words, args.output / f"{split}.mwwd")
    return 0


def cmd_fit_codebook(args, config: PipelineConfig) -> int:
    words = load_words(args.input / "train.mwwd")
    timings: Dict[str, float] = {}
    with pipeline_stage("fit-codebook", timings):
        codebook = fit_codebook(words, config)
    _save_codebook(codebook, args.output, config)
    return 0


def cmd_encode(args, config: PipelineConfig) -> int:
    codebook = _load_codebook(args.models, config)
    timings: Dict[str, float] = {}
    for split in SPLITS:
        path = args.input / f"{split}.mwwd"
        if not path.exists():
            continue
        with pipeline_stage("encode", timings):
            encoded = encode_words(codebook, _group_by_video(load_words(path)), config)
        save_encodings(encoded, args.output / f"{split}.mwev")
        export_encodings_text(encoded, args.output / f"{split}.csv")
    return 0


def cmd_evaluate(args, config: PipelineConfig) -> int:
    table = read_labels(args.labels)
    labels = dict(zip(table["video_id"], table["label"]))
    train = load_encodings(args.input / "train.mwev")
    test = load_encodings(args.input / "test.mwev")
    scores, predicted = _scores(train, test, labels)
    rows = [{"encodings": str(args.input), "videos": len(test),
             "method": test[0].method.value, **scores}]
    comparison = None
    if args.compare is not None:
        other_train = load_encodings(args.compare / "train.mwev")
        other_test = load_encodings(args.compare / "test.mwev")
        if [e.video_id for e in other_test] != [e.video_id for e in test]:
            raise DimensionMismatchError(
                f"{args.compare} does not encode the same test videos as {args.input}"
            )
        other_scores, other_predicted = _scores(other_train, other_test, labels)
        rows.append({"encodings": str(args.compare), "videos": len(other_test),
                     "method": other_test[0].method.value, **other_scores})
        comparison = AccuracyStatistics.mcnemar_test(
            predicted, other_predicted, labels_for(test, labels)
        )
    print(accuracy_report(pd.DataFrame(rows), "Nearest-Centroid Evaluation"))
    if comparison is not None:
        print(comparison)
        print(f"Interpretation: {comparison.interpretation}")
    return 0


def cmd_baseline(args, config: PipelineConfig) -> int:
    work = args.output
    train, test = _videos_or_synth(args, config, work)
    method = EncodingMethod.parse(args.method)
    encoded = run_baseline(config, method, train, test)
    _save_split_encodings(encoded, work / "encodings")
    save_config(config, work / "config.json")

    train_encoded, test_encoded = encoded
    if test_encoded:
        scores, _ = _scores(train_encoded, test_encoded, _video_labels(train, test))
        results = pd.DataFrame([{"baseline": method.value,
                                 "length": train_encoded[0].length, **scores}])
        print(accuracy_report(results, "Low-Level Baseline Evaluation"))
    return 0


def cmd_run_all(args, config: PipelineConfig) -> int:
    work = args.output
    train, test = _videos_or_synth(args, config, work)

    result = run_pipeline(config, train, test)
    models = work / "models"
    if result.models.descriptor_pca is not None:
        save_pca(result.models.descriptor_pca, models / PCA_FILE)
    save_gmm(result.models.gmm, models / GMM_FILE)
    _save_codebook(result.models.codebook, models, config)
    _save_split_encodings((result.train, result.test), work / "encodings")
    save_config(config, work / "config.json")
    (work / "manifest.json").write_text(
        json.dumps(result.manifest.to_dict(), indent=2) + "\n"
    )
    result.manifest.report()

    if result.test:
        scores, _ = _scores(result.train, result.test, _video_labels(train, test))
        results = pd.DataFrame([{
            "word_kind": config.kind.value,
            "encoder": config.method.value,
            "length": result.train[0].length,
            **scores,
        }])
        print(accuracy_report(results, "Nearest-Centroid Evaluation"))
    return 0


def cmd_sweep(args, config: PipelineConfig) -> int:
    train, test = _videos_or_synth(args, config)
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated integers: {args.values}")
    table = parameter_sweep(config, args.param, values, train, test)
    if args.output is not None:
        table.to_csv(args.output, index=False)
    print(sweep_report(table, args.param))
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "fit-gmm": cmd_fit_gmm,
    "build-words": cmd_build_words,
    "fit-codebook": cmd_fit_codebook,
    "encode": cmd_encode,
    "evaluate": cmd_evaluate,
    "baseline": cmd_baseline,
    "run-all": cmd_run_all,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config)
    except MidLevelError as exc:
        if exc.stage is not None:
            logger.error("stage '%s' failed: %s", exc.stage, exc)
        else:
            logger.error("%s", exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("%s", exc)
        return FormatError.exit_code


if __name__ == "__main__":
    sys.exit(main())
