"""Intrinsic codebooks over mid-level words."""

from .embedding import embed_words, embedding_dim, fit_word_projection
from .karcher import KarcherCodebook, KarcherInfo, k_karcher_means, karcher_mean
from .riemannian_gmm import RiemannianGmm, fit_riemannian_gmm

__all__ = [
    "KarcherCodebook",
    "KarcherInfo",
    "RiemannianGmm",
    "embed_words",
    "embedding_dim",
    "fit_riemannian_gmm",
    "fit_word_projection",
    "k_karcher_means",
    "karcher_mean",
]
