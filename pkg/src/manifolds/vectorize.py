"""Isometric half-vectorization of symmetric matrices."""

from typing import Optional

import numpy as np

from src.exceptions import DimensionMismatchError, InvalidInputError

SQRT2 = np.sqrt(2.0)


def triangular_dim(length: int) -> int:
    """Return n such that n(n+1)/2 == length.

    Raises:
        DimensionMismatchError: If length is not a triangular number
    """
    n = int(round((np.sqrt(8 * length + 1) - 1) / 2))
    if n < 1 or n * (n + 1) // 2 != length:
        raise DimensionMismatchError(f"Length {length} is not a triangular number")
    return n


def sym_vec(matrix: np.ndarray) -> np.ndarray:
    """Half-vectorize a symmetric matrix.

    Scans the upper triangle row by row and scales off-diagonal entries by
    sqrt(2), so <sym_vec(A), sym_vec(B)> equals the Frobenius inner product.

    Args:
        matrix: Symmetric n x n matrix

    Returns:
        Vector of length n(n+1)/2

    Example:
        >>> sym_vec(np.array([[1.0, 2.0], [2.0, 3.0]]))
        array([1.        , 2.82842712, 3.        ])
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"sym_vec needs a square matrix, got {matrix.shape}")
    rows, cols = np.triu_indices(matrix.shape[0])
    values = matrix[rows, cols].copy()
    values[rows != cols] *= SQRT2
    return values


def sym_unvec(vector: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    """Invert :func:`sym_vec`.

    Args:
        vector: Half-vectorized matrix
        dim: Expected matrix dimension; inferred from the length if None

    Raises:
        DimensionMismatchError: If the length is not triangular or does not
            match ``dim``
    """
    vector = np.asarray(vector, dtype=np.float64).ravel()
    n = triangular_dim(vector.size)
    if dim is not None and dim != n:
        raise DimensionMismatchError(
            f"Vector of length {vector.size} encodes a {n}x{n} matrix, not {dim}x{dim}"
        )
    rows, cols = np.triu_indices(n)
    values = vector.copy()
    values[rows != cols] /= SQRT2
    matrix = np.zeros((n, n))
    matrix[rows, cols] = values
    matrix[cols, rows] = values
    return matrix


def sym_vec_many(matrices: np.ndarray) -> np.ndarray:
    """Row-wise :func:`sym_vec` over a stack of n x n matrices."""
    matrices = np.asarray(matrices, dtype=np.float64)
    if matrices.ndim != 3 or matrices.shape[1] != matrices.shape[2]:
        raise InvalidInputError(
            f"sym_vec_many needs a stack of square matrices, got {matrices.shape}"
        )
    rows, cols = np.triu_indices(matrices.shape[-1])
    values = matrices[:, rows, cols].copy()
    values[:, rows != cols] *= SQRT2
    return values
