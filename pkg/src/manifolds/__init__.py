"""Geometry primitives for the SPD and Grassmann manifolds."""

from .dispatch import (
    embed_point,
    embed_points,
    embedding_matrix,
    exp_map,
    geodesic_distance,
    log_map,
    tangent_norm,
)
from .grassmann import (
    embed_grassmann,
    grassmann_exp_map,
    grassmann_geodesic_dist,
    grassmann_log_map,
    grassmann_projection_dist,
    principal_angles,
)
from .spd import (
    embed_spd,
    spd_exp_map,
    spd_geodesic_dist,
    spd_log_map,
    spd_matrix_exp,
    spd_matrix_log,
    spd_tangent_norm,
)
from .types import GrassmannPoint, ManifoldPoint, SymPosDef, TangentVector
from .vectorize import sym_unvec, sym_vec, sym_vec_many

__all__ = [
    "GrassmannPoint",
    "ManifoldPoint",
    "SymPosDef",
    "TangentVector",
    "embed_grassmann",
    "embed_point",
    "embed_points",
    "embed_spd",
    "embedding_matrix",
    "exp_map",
    "geodesic_distance",
    "grassmann_exp_map",
    "grassmann_geodesic_dist",
    "grassmann_log_map",
    "grassmann_projection_dist",
    "log_map",
    "principal_angles",
    "spd_exp_map",
    "spd_geodesic_dist",
    "spd_log_map",
    "spd_matrix_exp",
    "spd_matrix_log",
    "spd_tangent_norm",
    "sym_unvec",
    "sym_vec",
    "sym_vec_many",
    "tangent_norm",
]
