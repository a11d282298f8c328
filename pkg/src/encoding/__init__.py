"""Fixed-length video encodings from mid-level words."""

from .baselines import (
    DescriptorCodebook,
    encode_low_level_bovw,
    encode_low_level_fisher,
    encode_low_level_vlad,
    encode_mean_baseline,
    fit_descriptor_codebook,
)
from .bovw import bovw_matrix, encode_bovw
from .fisher import encode_fisher, fisher_blocks, fisher_vector_from_embeddings
from .normalization import l2_normalize, power_l2_normalize
from .representation import EncodedVideo, EncodingMethod
from .vlad import encode_vlad, vlad_residuals

__all__ = [
    "DescriptorCodebook",
    "EncodedVideo",
    "EncodingMethod",
    "bovw_matrix",
    "encode_bovw",
    "encode_fisher",
    "encode_low_level_bovw",
    "encode_low_level_fisher",
    "encode_low_level_vlad",
    "encode_mean_baseline",
    "encode_vlad",
    "fit_descriptor_codebook",
    "fisher_blocks",
    "fisher_vector_from_embeddings",
    "l2_normalize",
    "power_l2_normalize",
    "vlad_residuals",
]
