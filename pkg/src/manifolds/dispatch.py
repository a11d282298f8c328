"""Kind-dispatched geometry over SPD and Grassmann points."""

from typing import Sequence

import numpy as np

from src.exceptions import KindMismatchError
from src.manifolds.grassmann import (
    embed_grassmann,
    grassmann_exp_map,
    grassmann_geodesic_dist,
    grassmann_log_map,
    grassmann_tangent_norm,
)
from src.manifolds.spd import (
    embed_spd,
    spd_exp_map,
    spd_geodesic_dist,
    spd_log_map,
    spd_matrix_log,
    spd_tangent_norm,
)
from src.manifolds.types import GrassmannPoint, ManifoldPoint, SymPosDef, TangentVector
from src.manifolds.vectorize import sym_vec_many


def _same_manifold(first: ManifoldPoint, second: ManifoldPoint):
    if type(first) is not type(second):
        raise KindMismatchError(
            f"Cannot combine {type(first).__name__} with {type(second).__name__}"
        )


def log_map(base: ManifoldPoint, target: ManifoldPoint) -> TangentVector:
    _same_manifold(base, target)
    if isinstance(base, SymPosDef):
        return spd_log_map(base, target)
    return grassmann_log_map(base, target)


def exp_map(base: ManifoldPoint, tangent: TangentVector) -> ManifoldPoint:
    _same_manifold(base, tangent.base_point)
    if isinstance(base, SymPosDef):
        return spd_exp_map(base, tangent)
    return grassmann_exp_map(base, tangent)


def geodesic_distance(first: ManifoldPoint, second: ManifoldPoint) -> float:
    _same_manifold(first, second)
    if isinstance(first, SymPosDef):
        return spd_geodesic_dist(first, second)
    return grassmann_geodesic_dist(first, second)


def tangent_norm(tangent: TangentVector) -> float:
    """Riemannian norm of a tangent vector at its own base point."""
    if isinstance(tangent.base_point, SymPosDef):
        return spd_tangent_norm(tangent.base_point, tangent)
    return grassmann_tangent_norm(tangent)


def embed_point(point: ManifoldPoint) -> np.ndarray:
    """Vector-space embedding: log-Euclidean for SPD, projection for Grassmann."""
    if isinstance(point, GrassmannPoint):
        return embed_grassmann(point)
    return embed_spd(point)


def embedding_matrix(point: ManifoldPoint) -> np.ndarray:
    """Symmetric matrix behind :func:`embed_point`: log C or U U^T."""
    if isinstance(point, GrassmannPoint):
        return point.basis @ point.basis.T
    return spd_matrix_log(point)


def embed_points(points: Sequence[ManifoldPoint]) -> np.ndarray:
    """:func:`embed_point` for a same-shape batch, one row per point."""
    return sym_vec_many(np.stack([embedding_matrix(point) for point in points]))
