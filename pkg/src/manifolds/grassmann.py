"""Grassmann Manifold Geometry

Subspaces are represented by orthonormal bases; every function here is
invariant to the choice of basis (right-multiplication by an orthogonal
matrix).

Author: The Manifold-Words Team
License: MIT
"""

import numpy as np
import scipy.linalg

from src.exceptions import CutLocusError, DimensionMismatchError, InvalidInputError
from src.manifolds.types import GrassmannPoint, TangentVector
from src.manifolds.vectorize import sym_vec

CUT_LOCUS_TOL = 1e-12


def _check_same_shape(first: GrassmannPoint, second: GrassmannPoint):
    if first.shape != second.shape:
        raise DimensionMismatchError(
            f"Grassmann shape mismatch: {first.shape} vs {second.shape}"
        )


def principal_angles(first: GrassmannPoint, second: GrassmannPoint) -> np.ndarray:
    """Principal angles between two subspaces, ascending.

    The cosines are the singular values of U1^T U2 (clamped to [0, 1]). Each
    angle is recovered as atan2(sin, cos), with the sine measured from the
    component of the matching principal vector orthogonal to U1, which
    equals arccos(cos) but stays accurate for nearly identical subspaces.
    """
    _check_same_shape(first, second)
    u1, u2 = first.basis, second.basis
    left, cosines, right_t = scipy.linalg.svd(u1.T @ u2)
    cosines = np.clip(cosines, 0.0, 1.0)
    residual = u2 @ right_t.T - (u1 @ left) * cosines
    sines = np.linalg.norm(residual, axis=0)
    return np.arctan2(sines, cosines)


def grassmann_geodesic_dist(first: GrassmannPoint, second: GrassmannPoint) -> float:
    """Arc-length geodesic distance sqrt(sum theta_i^2).

    Example:
        >>> e1 = GrassmannPoint(np.array([[1.0], [0.0]]))
        >>> e2 = GrassmannPoint(np.array([[0.0], [1.0]]))
        >>> grassmann_geodesic_dist(e1, e2)  # pi / 2
        1.5707963267948966
    """
    return float(np.sqrt(np.sum(principal_angles(first, second) ** 2)))


def grassmann_projection_dist(first: GrassmannPoint, second: GrassmannPoint) -> float:
    """Projection-metric distance ||U1 U1^T - U2 U2^T||_F."""
    _check_same_shape(first, second)
    diff = first.basis @ first.basis.T - second.basis @ second.basis.T
    return float(np.linalg.norm(diff, "fro"))


def grassmann_log_map(base: GrassmannPoint, target: GrassmannPoint) -> TangentVector:
    """Logarithm map on the Grassmann manifold.

    With the thin SVD (I - U U^T) Y (U^T Y)^{-1} = Q S R^T, returns
    Q atan(S) R^T.

    Raises:
        DimensionMismatchError: If the shapes differ
        CutLocusError: If U^T Y is singular (a principal angle reaches pi/2)
    """
    _check_same_shape(base, target)
    u, y = base.basis, target.basis
    overlap = u.T @ y
    singular = scipy.linalg.svdvals(overlap)
    if singular[-1] <= CUT_LOCUS_TOL:
        raise CutLocusError(
            "Grassmann log map undefined: principal angle at pi/2 "
            f"(smallest cosine {singular[-1]:.2e})"
        )
    normal = y - u @ overlap
    direction = np.linalg.solve(overlap.T, normal.T).T
    q, s, r_t = scipy.linalg.svd(direction, full_matrices=False)
    coords = (q * np.arctan(s)) @ r_t
    coords -= u @ (u.T @ coords)
    return TangentVector(base, coords)


def grassmann_exp_map(base: GrassmannPoint, tangent: TangentVector) -> GrassmannPoint:
    """Exponential map on the Grassmann manifold.

    With the thin SVD v = Q S R^T, returns the orthonormalization of
    U R cos(S) R^T + Q sin(S) R^T.

    Raises:
        DimensionMismatchError: If the tangent shape does not match the base
    """
    if tangent.shape != base.shape:
        raise DimensionMismatchError(
            f"Tangent shape {tangent.shape} does not match base {base.shape}"
        )
    u = base.basis
    if np.max(np.abs(u.T @ tangent.coords), initial=0.0) > 1e-8:
        raise InvalidInputError("Tangent vector is not horizontal at the given base")
    q, s, r_t = scipy.linalg.svd(tangent.coords, full_matrices=False)
    moved = (u @ r_t.T) * np.cos(s) @ r_t + (q * np.sin(s)) @ r_t
    return GrassmannPoint.from_matrix(moved)


def grassmann_tangent_norm(tangent: TangentVector) -> float:
    """Canonical norm of a horizontal tangent (Frobenius norm)."""
    return float(np.linalg.norm(tangent.coords, "fro"))


def embed_grassmann(point: GrassmannPoint) -> np.ndarray:
    """Projection embedding sym_vec(U U^T), length d(d+1)/2.

    Euclidean distances between embeddings equal the projection-metric
    distance between the subspaces.
    """
    return sym_vec(point.basis @ point.basis.T)
