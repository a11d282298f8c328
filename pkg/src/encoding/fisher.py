"""Fisher Vector Encoding

Gradient of the log-likelihood of a video's embedded words under a
diagonal GMM, with respect to the component means and standard
deviations, scaled by the inverse square root of the Fisher information:

    mean block:     1/(K sqrt(w_m))    sum_k gamma_k(m) (x_k - mu_m) / sigma_m
    variance block: 1/(K sqrt(2 w_m))  sum_k gamma_k(m) ((x_k - mu_m)^2 / sigma_m^2 - 1)

All mean blocks come first, then all variance blocks. The "- 1" term
gives the variance block zero expectation under the model; ``strict_paper``
drops it to reproduce the uncorrected statistic. Power and L2
normalization follow.

Author: The Manifold-Words Team
License: MIT
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from src.codebook.riemannian_gmm import RiemannianGmm
from src.encoding.normalization import power_l2_normalize
from src.encoding.representation import EncodedVideo, EncodingMethod
from src.exceptions import DimensionMismatchError, InsufficientDataError
from src.models.gaussian_mixture import posteriors
from src.words.modeling import MidLevelWord


def fisher_blocks(
    samples: np.ndarray,
    weights: np.ndarray,
    means: np.ndarray,
    variances: np.ndarray,
    strict_paper: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """Raw (M, D) mean and variance gradient blocks.

    Args:
        samples: K x D embedded words (or descriptors)
        weights: M mixture weights
        means: M x D means
        variances: M x D diagonal variances
        strict_paper: Omit the "- 1" correction of the variance block
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    count = samples.shape[0]
    if count == 0:
        raise InsufficientDataError("Fisher vector of an empty set")
    if samples.shape[1] != means.shape[1]:
        raise DimensionMismatchError(
            f"Samples have dimension {samples.shape[1]}, GMM has {means.shape[1]}"
        )
    gamma = posteriors(samples, weights, means, variances)
    sigma = np.sqrt(variances)
    standardized = (samples[:, None, :] - means[None, :, :]) / sigma[None, :, :]
    weighted = gamma[:, :, None]
    mean_block = np.sum(weighted * standardized, axis=0)
    offset = 0.0 if strict_paper else 1.0
    var_block = np.sum(weighted * (standardized ** 2 - offset), axis=0)
    mean_block /= count * np.sqrt(weights)[:, None]
    var_block /= count * np.sqrt(2.0 * weights)[:, None]
    return mean_block, var_block


def fisher_vector_from_embeddings(
    samples: np.ndarray,
    weights: np.ndarray,
    means: np.ndarray,
    variances: np.ndarray,
    strict_paper: bool = False,
    normalize: bool = True,
) -> np.ndarray:
    """Concatenated Fisher vector of length 2 * M * D.

    With ``normalize`` off, the raw gradient statistics are returned.
    """
    mean_block, var_block = fisher_blocks(samples, weights, means, variances,
                                          strict_paper)
    vector = np.concatenate([mean_block.ravel(), var_block.ravel()])
    return power_l2_normalize(vector) if normalize else vector


def encode_fisher(
    gmm: RiemannianGmm,
    words: Sequence[MidLevelWord],
    video_id: Optional[str] = None,
    strict_paper: bool = False,
) -> EncodedVideo:
    """Fisher vector of a video's mid-level words under a Riemannian GMM.

    Args:
        gmm: Fitted Riemannian GMM
        words: The video's K mid-level words
        video_id: Defaults to the provenance of the first word
        strict_paper: Omit the "- 1" correction of the variance block

    Returns:
        Power- and L2-normalized EncodedVideo of length 2 * M * D

    Raises:
        InsufficientDataError: If ``words`` is empty
        KindMismatchError: If the words do not match the GMM's kind
    """
    if not words:
        raise InsufficientDataError("Fisher vector of an empty word set")
    phi = gmm.project(words)
    vector = fisher_vector_from_embeddings(
        phi, gmm.weights, gmm.means, gmm.variances, strict_paper=strict_paper
    )
    return EncodedVideo(
        video_id=video_id if video_id is not None else words[0].video_id,
        method=EncodingMethod.FV,
        vector=vector,
        kind=gmm.kind,
        n_codewords=gmm.n_components,
        dim=gmm.dim,
    )
