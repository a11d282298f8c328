"""Manifold point and tangent vector types.

Points are immutable: the wrapped arrays are copied to float64 and marked
read-only on construction, so they can be shared freely across threads.

Author: The Manifold-Words Team
License: MIT
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from src.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    NotPositiveDefiniteError,
)

SYMMETRY_RTOL = 1e-10
ORTHONORMAL_TOL = 1e-10
HORIZONTAL_TOL = 1e-8


def _frozen_copy(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


def is_symmetric(matrix: np.ndarray, rtol: float = SYMMETRY_RTOL) -> bool:
    """Check max|A - A^T| <= rtol * max|A|."""
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    return bool(np.max(np.abs(matrix - matrix.T), initial=0.0) <= rtol * scale)


@dataclass(frozen=True, eq=False)
class SymPosDef:
    """Symmetric positive definite matrix.

    Args:
        entries: Square, symmetric, positive definite matrix

    Raises:
        InvalidInputError: If the matrix is not square, not finite or not
            symmetric to tolerance
        NotPositiveDefiniteError: If the Cholesky factorization fails
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen_copy(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidInputError(f"SPD matrix must be square, got {entries.shape}")
        if entries.shape[0] == 0:
            raise InvalidInputError("SPD matrix must have positive dimension")
        if not np.all(np.isfinite(entries)):
            raise InvalidInputError("SPD matrix has non-finite entries")
        if not is_symmetric(entries):
            raise InvalidInputError("SPD matrix is not symmetric")
        try:
            np.linalg.cholesky(entries)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(
                "Cholesky factorization failed: matrix is not positive definite"
            ) from exc
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def shape(self):
        return self.entries.shape

    @classmethod
    def identity(cls, dim: int) -> "SymPosDef":
        return cls(np.eye(dim))


@dataclass(frozen=True, eq=False)
class GrassmannPoint:
    """Linear subspace of R^d represented by a d x r orthonormal basis.

    Args:
        basis: Matrix with orthonormal columns

    Raises:
        InvalidInputError: If the basis is malformed or not orthonormal
    """

    basis: np.ndarray

    def __post_init__(self):
        basis = _frozen_copy(self.basis)
        if basis.ndim != 2 or basis.shape[1] == 0 or basis.shape[1] > basis.shape[0]:
            raise InvalidInputError(
                f"Grassmann basis must be d x r with 1 <= r <= d, got {basis.shape}"
            )
        if not np.all(np.isfinite(basis)):
            raise InvalidInputError("Grassmann basis has non-finite entries")
        gram = basis.T @ basis
        deviation = np.max(np.abs(gram - np.eye(basis.shape[1])))
        if deviation > ORTHONORMAL_TOL:
            raise InvalidInputError(
                f"Grassmann basis columns are not orthonormal (deviation {deviation:.2e})"
            )
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def subspace_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def shape(self):
        return self.basis.shape

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "GrassmannPoint":
        """Orthonormalize an arbitrary full-column-rank matrix via QR."""
        q, _ = np.linalg.qr(np.asarray(matrix, dtype=np.float64))
        return cls(q)


ManifoldPoint = Union[SymPosDef, GrassmannPoint]


def point_matrix(point: ManifoldPoint) -> np.ndarray:
    """Return the array representing a manifold point."""
    if isinstance(point, SymPosDef):
        return point.entries
    return point.basis


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Tangent vector at a base point.

    SPD tangents must be symmetric; Grassmann tangents must be horizontal
    (orthogonal to the base subspace).
    """

    base_point: ManifoldPoint
    coords: np.ndarray

    def __post_init__(self):
        coords = _frozen_copy(self.coords)
        base = point_matrix(self.base_point)
        if coords.shape != base.shape:
            raise DimensionMismatchError(
                f"Tangent shape {coords.shape} does not match base {base.shape}"
            )
        if not np.all(np.isfinite(coords)):
            raise InvalidInputError("Tangent vector has non-finite entries")
        if isinstance(self.base_point, SymPosDef):
            if not is_symmetric(coords):
                raise InvalidInputError("SPD tangent vector is not symmetric")
        else:
            leak = np.max(np.abs(base.T @ coords), initial=0.0)
            if leak > HORIZONTAL_TOL:
                raise InvalidInputError(
                    f"Grassmann tangent is not horizontal (|U^T v| = {leak:.2e})"
                )
        object.__setattr__(self, "coords", coords)

    @property
    def shape(self):
        return self.coords.shape
