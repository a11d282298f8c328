"""Vector normalizations applied to VLAD and Fisher encodings."""

import numpy as np

from src.exceptions import InvalidInputError


def _finite(vector) -> np.ndarray:
    vector = np.asarray(vector, dtype=np.float64)
    if not np.all(np.isfinite(vector)):
        raise InvalidInputError("Cannot normalize a vector with non-finite entries")
    return vector


def l2_normalize(vector) -> np.ndarray:
    """Divide by the L2 norm; an all-zero vector is returned unchanged."""
    vector = _finite(vector)
    norm = np.linalg.norm(vector)
    if norm == 0:
        return vector.copy()
    return vector / norm


def power_l2_normalize(vector) -> np.ndarray:
    """Signed square root sign(z) sqrt(|z|) followed by L2 normalization.

    Example:
        >>> power_l2_normalize([4.0, 0.0, -4.0])
        array([ 0.70710678,  0.        , -0.70710678])
    """
    vector = _finite(vector)
    return l2_normalize(np.sign(vector) * np.sqrt(np.abs(vector)))
