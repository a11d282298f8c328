"""Pipeline Configuration

Hyperparameters of the whole pipeline, two presets, a versioned JSON file
format and the per-stage seed derivation.

Author: The Manifold-Words Team
License: MIT
"""

import hashlib
import json
import zlib
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from src.encoding.representation import EncodingMethod
from src.exceptions import ConfigError
from src.words.modeling import WordKind

CONFIG_VERSION = 1

DEFAULT_CODEBOOK_SIZES = {"bovw": 64, "vlad": 32, "fv": 32}
BASELINE_CODEBOOK_SIZES = {"llbovw": 1024, "llvlad": 256}


@dataclass(frozen=True)
class PipelineConfig:
    """All pipeline hyperparameters.

    Attributes:
        descriptor_dim: d, checked against the data when given
        pca_factor: Fraction of descriptor dimensions kept before the
            universal GMM; 1.0 skips the projection
        n_components: K, universal GMM components (words per video)
        group_size: T, descriptors per feature group
        word_kind: 'sub', 'cov' or 'gau'
        subspace_dim: r, for subspace words
        codebook_size: M; None picks 64 for BoVW and 32 for VLAD / FV
        embedding_dim: D, PCA dimension of embedded words
        encoder: 'bovw', 'vlad' or 'fv'
        strict_paper_fv: Omit the "- 1" correction of the FV variance block
        seed: Root seed
        workers: Worker threads; None uses every available core
        pad_groups: Pad videos with fewer than T descriptors
        em_max_iter: EM iteration cap (both GMMs)
        em_tol: EM relative log-likelihood tolerance
        karcher_max_iter: Karcher mean iteration cap
        karcher_tol: Karcher mean tolerance on the squared mean tangent
        kmeans_max_iter: K-Karcher-means round cap
        codebook_init: 'kmeans++' or 'random'
        baseline_codebook_size: k-means centers for the low-level BoVW and
            VLAD baselines; None picks 1024 and 256
    """

    descriptor_dim: Optional[int] = None
    pca_factor: float = 0.5
    n_components: int = 256
    group_size: int = 64
    word_kind: str = "cov"
    subspace_dim: int = 5
    codebook_size: Optional[int] = None
    embedding_dim: int = 256
    encoder: str = "fv"
    strict_paper_fv: bool = False
    seed: int = 0
    workers: Optional[int] = None
    pad_groups: bool = False
    em_max_iter: int = 200
    em_tol: float = 1e-5
    karcher_max_iter: int = 50
    karcher_tol: float = 1e-10
    kmeans_max_iter: int = 100
    codebook_init: str = "kmeans++"
    baseline_codebook_size: Optional[int] = None

    @classmethod
    def paper(cls, **overrides) -> "PipelineConfig":
        """Full-scale defaults: K=256, T=64, D=256, M=32 (64 for BoVW)."""
        return replace(cls(), **overrides)

    @classmethod
    def desk(cls, **overrides) -> "PipelineConfig":
        """Small defaults for 8-dimensional synthetic descriptors."""
        base = cls(
            descriptor_dim=8,
            pca_factor=1.0,
            n_components=16,
            group_size=16,
            codebook_size=4,
            embedding_dim=16,
            baseline_codebook_size=16,
        )
        return replace(base, **overrides)

    @property
    def kind(self) -> WordKind:
        return WordKind.parse(self.word_kind)

    @property
    def method(self) -> EncodingMethod:
        method = EncodingMethod.parse(self.encoder)
        if method.value not in DEFAULT_CODEBOOK_SIZES:
            raise ConfigError(f"'{self.encoder}' is not a mid-level encoder")
        return method

    @property
    def resolved_codebook_size(self) -> int:
        if self.codebook_size is not None:
            return self.codebook_size
        return DEFAULT_CODEBOOK_SIZES[self.method.value]

    def baseline_codebook_size_for(self, method: EncodingMethod) -> int:
        """k-means codebook size of a low-level BoVW or VLAD baseline."""
        if self.baseline_codebook_size is not None:
            return self.baseline_codebook_size
        try:
            return BASELINE_CODEBOOK_SIZES[method.value]
        except KeyError:
            raise ConfigError(f"{method.name} has no descriptor codebook") from None

    def reduced_dim(self, descriptor_dim: int) -> int:
        """Descriptor dimension after the pre-GMM PCA."""
        return max(1, int(round(descriptor_dim * self.pca_factor)))

    def embedded_dim(self, descriptor_dim: int) -> int:
        """Length of an embedded word for descriptors of dimension d."""
        side = self.reduced_dim(descriptor_dim) + (self.kind is WordKind.GAUSSIAN)
        return side * (side + 1) // 2

    def validate(self, descriptor_dim: Optional[int] = None) -> "PipelineConfig":
        """Check every field; with a known d, also check D and r against it.

        Raises:
            ConfigError: On the first invalid value
        """
        kind, method = self.kind, self.method
        positive = {
            "n_components": self.n_components,
            "group_size": self.group_size,
            "subspace_dim": self.subspace_dim,
            "codebook_size": self.resolved_codebook_size,
            "embedding_dim": self.embedding_dim,
            "em_max_iter": self.em_max_iter,
            "karcher_max_iter": self.karcher_max_iter,
            "kmeans_max_iter": self.kmeans_max_iter,
        }
        for name, value in positive.items():
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if not 0.0 < self.pca_factor <= 1.0:
            raise ConfigError(f"pca_factor must lie in (0, 1], got {self.pca_factor}")
        if self.em_tol <= 0 or self.karcher_tol <= 0:
            raise ConfigError("Tolerances must be positive")
        if self.group_size <= self.subspace_dim:
            raise ConfigError(
                f"Group size T={self.group_size} must exceed r={self.subspace_dim}"
            )
        if self.codebook_init not in ("kmeans++", "random"):
            raise ConfigError(f"Unknown codebook_init '{self.codebook_init}'")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.baseline_codebook_size is not None and self.baseline_codebook_size < 1:
            raise ConfigError("baseline_codebook_size must be positive")

        dim = descriptor_dim if descriptor_dim is not None else self.descriptor_dim
        if self.descriptor_dim is not None and dim != self.descriptor_dim:
            raise ConfigError(
                f"Descriptors have d={dim}, configuration expects {self.descriptor_dim}"
            )
        if dim is not None:
            reduced = self.reduced_dim(dim)
            if kind is WordKind.SUBSPACE and self.subspace_dim >= reduced:
                raise ConfigError(
                    f"Subspace dimension r={self.subspace_dim} must be below the "
                    f"descriptor dimension {reduced}"
                )
            if method is not EncodingMethod.BOVW and self.embedding_dim > self.embedded_dim(dim):
                raise ConfigError(
                    f"D={self.embedding_dim} exceeds the embedding dimension "
                    f"{self.embedded_dim(dim)} of {kind.value} words"
                )
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {"version": CONFIG_VERSION, **asdict(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PipelineConfig":
        """Build a validated config from its versioned dictionary form."""
        data = dict(data)
        version = data.pop("version", None)
        if version != CONFIG_VERSION:
            raise ConfigError(
                f"Unsupported config version {version!r} (expected {CONFIG_VERSION})"
            )
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
        try:
            config = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        return config.validate()

    def with_overrides(self, **overrides) -> "PipelineConfig":
        """Copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def save_config(config: PipelineConfig, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Read a versioned JSON config file.

    Raises:
        ConfigError: If the file is missing, not JSON or invalid
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return PipelineConfig.from_dict(data)


def config_hash(config: PipelineConfig) -> str:
    """SHA-256 of the canonical JSON form."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def stage_seed(root_seed: int, label: str) -> int:
    """Seed of one stage, derived from the root seed and a fixed stage label."""
    sequence = np.random.SeedSequence([int(root_seed), zlib.crc32(label.encode())])
    return int(sequence.generate_state(1)[0])
