"""Artifact files, label tables and text exports."""

from .artifacts import (
    descriptor_path,
    load_codebook,
    load_descriptor_dir,
    load_descriptors,
    load_encodings,
    load_gmm,
    load_pca,
    load_riemannian_gmm,
    load_words,
    save_codebook,
    save_descriptor_dir,
    save_descriptors,
    save_encodings,
    save_gmm,
    save_pca,
    save_riemannian_gmm,
    save_words,
)
from .binary import FORMAT_VERSION, BinaryReader, BinaryWriter
from .tables import export_encodings_text, read_encodings_text, read_labels, write_labels

__all__ = [
    "FORMAT_VERSION",
    "BinaryReader",
    "BinaryWriter",
    "descriptor_path",
    "export_encodings_text",
    "load_codebook",
    "load_descriptor_dir",
    "load_descriptors",
    "load_encodings",
    "load_gmm",
    "load_pca",
    "load_riemannian_gmm",
    "load_words",
    "read_encodings_text",
    "read_labels",
    "save_codebook",
    "save_descriptor_dir",
    "save_descriptors",
    "save_encodings",
    "save_gmm",
    "save_pca",
    "save_riemannian_gmm",
    "save_words",
    "write_labels",
]
