"""Artifact Files

Save/load pairs for every model and intermediate result of the pipeline:

    MWDS  descriptor set of one video (float32 payload)
    MWPC  PCA projection
    MWGM  universal spherical GMM
    MWWD  mid-level word set with provenance
    MWCB  Karcher codebook (optionally with its VLAD projection)
    MWRG  Riemannian GMM (with its PCA)
    MWEV  encoded videos

Loading re-validates every object, so a corrupted file fails with a
FormatError or a DataError rather than producing an invalid model. EM and
clustering traces are not stored.

Author: The Manifold-Words Team
License: MIT
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from src.alignment.descriptors import DescriptorSet
from src.alignment.universal_gmm import SphericalGmm
from src.codebook.karcher import KarcherCodebook
from src.codebook.riemannian_gmm import RiemannianGmm
from src.encoding.representation import EncodedVideo, EncodingMethod
from src.exceptions import ConfigError, FormatError
from src.manifolds.types import GrassmannPoint, SymPosDef, point_matrix
from src.models.pca import PcaProjection
from src.serialization.binary import BinaryReader, BinaryWriter, PathLike
from src.words.modeling import MidLevelWord, WordKind

logger = logging.getLogger(__name__)

DESCRIPTOR_MAGIC = b"MWDS"
PCA_MAGIC = b"MWPC"
GMM_MAGIC = b"MWGM"
WORDS_MAGIC = b"MWWD"
CODEBOOK_MAGIC = b"MWCB"
RIEMANNIAN_GMM_MAGIC = b"MWRG"
ENCODING_MAGIC = b"MWEV"

DESCRIPTOR_SUFFIX = ".mwds"

KIND_TAGS = {WordKind.SUBSPACE: 0, WordKind.COVARIANCE: 1, WordKind.GAUSSIAN: 2}
METHOD_TAGS = {
    EncodingMethod.BOVW: 0,
    EncodingMethod.VLAD: 1,
    EncodingMethod.FV: 2,
    EncodingMethod.MEAN: 3,
    EncodingMethod.LOW_LEVEL_FV: 4,
    EncodingMethod.LOW_LEVEL_BOVW: 5,
    EncodingMethod.LOW_LEVEL_VLAD: 6,
}
NO_KIND = 255


def _lookup(table: dict, tag: int, what: str, source: str):
    for key, value in table.items():
        if value == tag:
            return key
    raise FormatError(f"{source}: unknown {what} tag {tag}")


def _point(kind: WordKind, matrix: np.ndarray):
    return GrassmannPoint(matrix) if kind is WordKind.SUBSPACE else SymPosDef(matrix)


# Descriptors -----------------------------------------------------------------

def save_descriptors(video: DescriptorSet, path: PathLike):
    """Write one video's descriptors; values are stored as float32."""
    writer = BinaryWriter(DESCRIPTOR_MAGIC)
    writer.text(video.video_id)
    writer.u32(video.dim)
    writer.u64(video.num_features)
    writer.f32(video.features)
    writer.save(path)


def load_descriptors(path: PathLike, label: Optional[str] = None) -> DescriptorSet:
    reader = BinaryReader.open(path, DESCRIPTOR_MAGIC)
    video_id = reader.text()
    dim = reader.u32()
    count = reader.u64()
    features = reader.f32(count * dim, (count, dim))
    reader.finish()
    return DescriptorSet(video_id, features, label)


def descriptor_path(directory: PathLike, video_id: str) -> Path:
    """File of one video inside ``directory``.

    Raises:
        ConfigError: If the id would not name a file directly inside ``directory``
    """
    if (
        not video_id
        or video_id in (".", "..")
        or "/" in video_id
        or "\\" in video_id
        or "\0" in video_id
    ):
        raise ConfigError(f"Video id {video_id!r} cannot name a descriptor file")
    return Path(directory) / f"{video_id}{DESCRIPTOR_SUFFIX}"


def save_descriptor_dir(videos: Sequence[DescriptorSet], directory: PathLike):
    """Write each video to ``<directory>/<video_id>.mwds``."""
    for video in videos:
        save_descriptors(video, descriptor_path(directory, video.video_id))
    logger.info("Wrote %d descriptor files to %s", len(videos), directory)


def load_descriptor_dir(
    directory: PathLike, video_ids: Sequence[str], labels: Optional[dict] = None
) -> List[DescriptorSet]:
    """Load the named videos in the given order."""
    labels = labels or {}
    videos = []
    for video_id in video_ids:
        video = load_descriptors(descriptor_path(directory, video_id),
                                 labels.get(video_id))
        if video.video_id != video_id:
            raise FormatError(
                f"File for '{video_id}' holds video '{video.video_id}'"
            )
        videos.append(video)
    return videos


# PCA and universal GMM -------------------------------------------------------

def _write_pca(writer: BinaryWriter, pca: PcaProjection):
    writer.u32(pca.input_dim)
    writer.u32(pca.output_dim)
    writer.f64(pca.mean)
    writer.f64(pca.components)


def _read_pca(reader: BinaryReader) -> PcaProjection:
    input_dim = reader.u32()
    output_dim = reader.u32()
    mean = reader.f64(input_dim)
    components = reader.f64(output_dim * input_dim, (output_dim, input_dim))
    return PcaProjection(mean, components)


def save_pca(pca: PcaProjection, path: PathLike):
    writer = BinaryWriter(PCA_MAGIC)
    _write_pca(writer, pca)
    writer.save(path)


def load_pca(path: PathLike) -> PcaProjection:
    reader = BinaryReader.open(path, PCA_MAGIC)
    pca = _read_pca(reader)
    reader.finish()
    return pca


def save_gmm(gmm: SphericalGmm, path: PathLike):
    writer = BinaryWriter(GMM_MAGIC)
    writer.u32(gmm.n_components)
    writer.u32(gmm.dim)
    writer.f64(gmm.weights)
    writer.f64(gmm.means)
    writer.f64(gmm.variances)
    writer.save(path)


def load_gmm(path: PathLike) -> SphericalGmm:
    reader = BinaryReader.open(path, GMM_MAGIC)
    n_components = reader.u32()
    dim = reader.u32()
    weights = reader.f64(n_components)
    means = reader.f64(n_components * dim, (n_components, dim))
    variances = reader.f64(n_components)
    reader.finish()
    return SphericalGmm(weights, means, variances)


# Words -------------------------------------------------------------------------

def save_words(words: Sequence[MidLevelWord], path: PathLike):
    """Write a same-kind word set: header, payload matrices, provenance table."""
    if not words:
        raise FormatError("Refusing to write an empty word set")
    kind = words[0].kind
    rows, cols = words[0].shape
    writer = BinaryWriter(WORDS_MAGIC)
    writer.u8(KIND_TAGS[kind])
    writer.u32(rows)
    writer.u32(cols)
    writer.u64(len(words))
    for word in words:
        if word.kind is not kind or word.shape != (rows, cols):
            raise FormatError("Word set mixes kinds or shapes")
        writer.f64(word.matrix)
    for word in words:
        writer.text(word.video_id)
        writer.i32(word.component_index)
    writer.save(path)


def load_words(path: PathLike) -> List[MidLevelWord]:
    reader = BinaryReader.open(path, WORDS_MAGIC)
    kind = _lookup(KIND_TAGS, reader.u8(), "word kind", reader.source)
    rows = reader.u32()
    cols = reader.u32()
    count = reader.u64()
    matrices = reader.f64(count * rows * cols, (count, rows, cols))
    provenance = [(reader.text(), reader.i32()) for _ in range(count)]
    reader.finish()
    return [
        MidLevelWord(kind, _point(kind, matrix), video_id, component)
        for matrix, (video_id, component) in zip(matrices, provenance)
    ]


# Codebooks ---------------------------------------------------------------------

def save_codebook(codebook: KarcherCodebook, path: PathLike):
    rows, cols = codebook.centers[0].shape
    writer = BinaryWriter(CODEBOOK_MAGIC)
    writer.u8(KIND_TAGS[codebook.kind])
    writer.u32(rows)
    writer.u32(cols)
    writer.u32(codebook.n_centers)
    for center in codebook.centers:
        writer.f64(point_matrix(center))
    writer.u8(0 if codebook.pca is None else 1)
    if codebook.pca is not None:
        _write_pca(writer, codebook.pca)
    writer.save(path)


def load_codebook(path: PathLike) -> KarcherCodebook:
    reader = BinaryReader.open(path, CODEBOOK_MAGIC)
    kind = _lookup(KIND_TAGS, reader.u8(), "word kind", reader.source)
    rows = reader.u32()
    cols = reader.u32()
    n_centers = reader.u32()
    matrices = reader.f64(n_centers * rows * cols, (n_centers, rows, cols))
    pca = _read_pca(reader) if reader.u8() else None
    reader.finish()
    return KarcherCodebook(
        kind=kind, centers=tuple(_point(kind, m) for m in matrices), pca=pca
    )


def save_riemannian_gmm(gmm: RiemannianGmm, path: PathLike):
    writer = BinaryWriter(RIEMANNIAN_GMM_MAGIC)
    writer.u8(KIND_TAGS[gmm.kind])
    writer.u32(gmm.n_components)
    writer.u32(gmm.dim)
    _write_pca(writer, gmm.pca)
    writer.f64(gmm.weights)
    writer.f64(gmm.means)
    writer.f64(gmm.variances)
    writer.save(path)


def load_riemannian_gmm(path: PathLike) -> RiemannianGmm:
    reader = BinaryReader.open(path, RIEMANNIAN_GMM_MAGIC)
    kind = _lookup(KIND_TAGS, reader.u8(), "word kind", reader.source)
    n_components = reader.u32()
    dim = reader.u32()
    pca = _read_pca(reader)
    weights = reader.f64(n_components)
    means = reader.f64(n_components * dim, (n_components, dim))
    variances = reader.f64(n_components * dim, (n_components, dim))
    reader.finish()
    return RiemannianGmm(kind, pca, weights, means, variances)


# Encodings ---------------------------------------------------------------------

def save_encodings(encodings: Sequence[EncodedVideo], path: PathLike):
    writer = BinaryWriter(ENCODING_MAGIC)
    writer.u64(len(encodings))
    for encoded in encodings:
        writer.text(encoded.video_id)
        writer.u8(METHOD_TAGS[encoded.method])
        writer.u8(NO_KIND if encoded.kind is None else KIND_TAGS[encoded.kind])
        writer.u32(encoded.n_codewords)
        writer.u32(encoded.dim)
        writer.u64(encoded.length)
        writer.f64(encoded.vector)
    writer.save(path)


def load_encodings(path: PathLike) -> List[EncodedVideo]:
    reader = BinaryReader.open(path, ENCODING_MAGIC)
    encodings = []
    for _ in range(reader.u64()):
        video_id = reader.text()
        method = _lookup(METHOD_TAGS, reader.u8(), "encoding method", reader.source)
        kind_tag = reader.u8()
        kind = None if kind_tag == NO_KIND else _lookup(
            KIND_TAGS, kind_tag, "word kind", reader.source
        )
        n_codewords = reader.u32()
        dim = reader.u32()
        vector = reader.f64(reader.u64())
        encodings.append(EncodedVideo(video_id, method, vector, kind, n_codewords, dim))
    reader.finish()
    return encodings
