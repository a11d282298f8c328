"""SPD Manifold Geometry

Affine-invariant Riemannian geometry on symmetric positive definite
matrices, plus the log-Euclidean embedding into the tangent space at the
identity used to vectorize covariance and Gaussian words.

All matrix functions go through a symmetrized eigendecomposition; inputs
whose smallest eigenvalue is at or below 1e-12 times the largest are
rejected rather than clamped.

Author: The Manifold-Words Team
License: MIT
"""

from typing import Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from src.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    NotPositiveDefiniteError,
)
from src.manifolds.types import SymPosDef, TangentVector
from src.manifolds.vectorize import sym_vec

EIGENVALUE_FLOOR = 1e-12

MatrixLike = Union[SymPosDef, np.ndarray]


def _symmetrized(matrix: MatrixLike) -> np.ndarray:
    values = matrix.entries if isinstance(matrix, SymPosDef) else matrix
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise InvalidInputError(f"Expected a square matrix, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("Matrix has non-finite entries")
    return 0.5 * (values + values.T)


def _spd_eigh(matrix: MatrixLike) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of an SPD matrix with the positivity floor check."""
    eigvals, eigvecs = scipy.linalg.eigh(_symmetrized(matrix))
    largest = eigvals[-1]
    if largest <= 0 or eigvals[0] <= EIGENVALUE_FLOOR * largest:
        raise NotPositiveDefiniteError(
            f"Matrix is not positive definite (eigenvalues in [{eigvals[0]:.3e}, "
            f"{largest:.3e}])"
        )
    return eigvals, eigvecs


def _from_eig(eigvals: np.ndarray, eigvecs: np.ndarray) -> np.ndarray:
    matrix = (eigvecs * eigvals) @ eigvecs.T
    return 0.5 * (matrix + matrix.T)


def _check_same_dim(first: SymPosDef, second: SymPosDef):
    if first.dim != second.dim:
        raise DimensionMismatchError(
            f"SPD dimension mismatch: {first.dim} vs {second.dim}"
        )


def spd_sqrt_pair(base: MatrixLike) -> Tuple[np.ndarray, np.ndarray]:
    """Return (base^{1/2}, base^{-1/2})."""
    eigvals, eigvecs = _spd_eigh(base)
    root = np.sqrt(eigvals)
    return _from_eig(root, eigvecs), _from_eig(1.0 / root, eigvecs)


def spd_matrix_log(matrix: MatrixLike) -> np.ndarray:
    """Principal matrix logarithm of an SPD matrix.

    Args:
        matrix: SPD matrix (a SymPosDef or a raw array)

    Returns:
        Symmetric matrix Q diag(ln lambda) Q^T

    Raises:
        InvalidInputError: If the matrix has non-finite entries
        NotPositiveDefiniteError: If an eigenvalue is not positive

    Example:
        >>> spd_matrix_log(np.diag([np.e ** 2, 1.0]))
        array([[2., 0.],
               [0., 0.]])
    """
    eigvals, eigvecs = _spd_eigh(matrix)
    return _from_eig(np.log(eigvals), eigvecs)


def spd_matrix_exp(matrix: np.ndarray) -> SymPosDef:
    """Matrix exponential of a symmetric matrix, an SPD matrix."""
    eigvals, eigvecs = scipy.linalg.eigh(_symmetrized(matrix))
    return SymPosDef(_from_eig(np.exp(eigvals), eigvecs))


def spd_log_map(base: SymPosDef, target: SymPosDef) -> TangentVector:
    """Affine-invariant logarithm map log_base(target).

    Computes base^{1/2} log(base^{-1/2} target base^{-1/2}) base^{1/2}.

    Raises:
        DimensionMismatchError: If base and target differ in dimension
        NotPositiveDefiniteError: If either matrix is not SPD
    """
    _check_same_dim(base, target)
    root, inv_root = spd_sqrt_pair(base)
    inner = spd_matrix_log(inv_root @ target.entries @ inv_root)
    coords = root @ inner @ root
    return TangentVector(base, 0.5 * (coords + coords.T))


def spd_exp_map(base: SymPosDef, tangent: TangentVector) -> SymPosDef:
    """Affine-invariant exponential map exp_base(tangent).

    Raises:
        DimensionMismatchError: If the tangent does not live at ``base``
    """
    if tangent.shape != base.shape:
        raise DimensionMismatchError(
            f"Tangent shape {tangent.shape} does not match base {base.shape}"
        )
    anchor = tangent.base_point
    if anchor is not base and not np.array_equal(
        getattr(anchor, "entries", None), base.entries
    ):
        raise InvalidInputError("Tangent vector is not attached to the given base")
    root, inv_root = spd_sqrt_pair(base)
    inner = spd_matrix_exp(inv_root @ tangent.coords @ inv_root).entries
    result = root @ inner @ root
    return SymPosDef(0.5 * (result + result.T))


def spd_tangent_norm(base: SymPosDef, tangent: TangentVector) -> float:
    """Riemannian norm of a tangent vector under the affine-invariant metric."""
    _, inv_root = spd_sqrt_pair(base)
    return float(np.linalg.norm(inv_root @ tangent.coords @ inv_root, "fro"))


def spd_geodesic_dist(first: SymPosDef, second: SymPosDef) -> float:
    """Affine-invariant geodesic distance ||log(X^{-1/2} Y X^{-1/2})||_F.

    Uses the generalized eigenvalues of (Y, X), which are the eigenvalues
    of X^{-1/2} Y X^{-1/2}.

    Example:
        >>> spd_geodesic_dist(SymPosDef.identity(2), SymPosDef(np.diag([np.e**2, 1])))
        2.0
    """
    _check_same_dim(first, second)
    try:
        eigvals = scipy.linalg.eigh(
            _symmetrized(second), _symmetrized(first), eigvals_only=True
        )
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    if eigvals[0] <= 0:
        raise NotPositiveDefiniteError("Generalized eigenvalue is not positive")
    return float(np.sqrt(np.sum(np.log(eigvals) ** 2)))


def spd_whitened_logs(
    base: SymPosDef, targets: Sequence[SymPosDef]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Log maps of many targets expressed in whitened coordinates.

    Returns:
        Tuple of (base^{1/2}, base^{-1/2}, stack of log(base^{-1/2} X base^{-1/2})).
        The Riemannian norm of each tangent is the Frobenius norm of its
        whitened log.
    """
    root, inv_root = spd_sqrt_pair(base)
    logs = np.stack(
        [spd_matrix_log(inv_root @ target.entries @ inv_root) for target in targets]
    )
    return root, inv_root, logs


def embed_spd(matrix: SymPosDef) -> np.ndarray:
    """Log-Euclidean embedding sym_vec(log C), length d(d+1)/2."""
    return sym_vec(spd_matrix_log(matrix))
