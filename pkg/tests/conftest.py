"""Shared fixtures: seeded generators and random manifold points."""

import numpy as np
import pytest

from src.alignment.grouping import FeatureGroup
from src.benchmarks.synthetic import SyntheticSpec, generate_synthetic, split_videos
from src.manifolds.types import GrassmannPoint, SymPosDef, TangentVector
from src.manifolds.grassmann import grassmann_exp_map


def make_spd(rng: np.random.Generator, dim: int, spread: float = 1.0) -> SymPosDef:
    """Random SPD matrix Q diag(exp(u)) Q^T with log-eigenvalues u ~ N(0, spread)."""
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigvals = np.exp(rng.normal(0.0, spread, dim))
    matrix = (q * eigvals) @ q.T
    return SymPosDef(0.5 * (matrix + matrix.T))


def make_grassmann(rng: np.random.Generator, dim: int, rank: int) -> GrassmannPoint:
    return GrassmannPoint.from_matrix(rng.standard_normal((dim, rank)))


def horizontal_tangent(
    rng: np.random.Generator, base: GrassmannPoint, norm: float
) -> TangentVector:
    """Random horizontal tangent at ``base`` with the given Frobenius norm."""
    raw = rng.standard_normal(base.shape)
    raw -= base.basis @ (base.basis.T @ raw)
    return TangentVector(base, norm * raw / np.linalg.norm(raw))


def grassmann_near(
    rng: np.random.Generator, base: GrassmannPoint, norm: float
) -> GrassmannPoint:
    return grassmann_exp_map(base, horizontal_tangent(rng, base, norm))


def make_group(members: np.ndarray, video_id: str = "v0", component: int = 0):
    members = np.asarray(members, dtype=np.float64)
    count = members.shape[0]
    return FeatureGroup(
        video_id=video_id,
        component_index=component,
        members=members,
        member_indices=np.arange(count),
        member_log_probabilities=np.zeros(count),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def spd_factory(rng):
    return lambda dim=3, spread=1.0: make_spd(rng, dim, spread)


@pytest.fixture
def grassmann_factory(rng):
    return lambda dim=5, rank=2: make_grassmann(rng, dim, rank)


@pytest.fixture(scope="session")
def desk_videos():
    """4 classes x 20 videos of 200 eight-dimensional descriptors, split 50/50."""
    return split_videos(generate_synthetic(SyntheticSpec()))


@pytest.fixture(scope="session")
def small_videos():
    """2 classes x 6 videos of 60 descriptors, split 50/50."""
    spec = SyntheticSpec(class_count=2, videos_per_class=6, features_per_video=60, seed=3)
    return split_videos(generate_synthetic(spec))
