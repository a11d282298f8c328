"""Karcher Means and K-Karcher-Means Clustering

Intrinsic codebook learning on the SPD and Grassmann manifolds. The
Karcher mean is found by fixed-step Riemannian gradient descent

    X <- exp_X( (1/N) sum_i log_X(X_i) )

and K-Karcher-means alternates nearest-center assignment under the
geodesic distance with Karcher-mean center updates.

Author: The Manifold-Words Team
License: MIT
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.exceptions import (
    ConfigError,
    CutLocusError,
    DegenerateInputError,
    InsufficientDataError,
    KindMismatchError,
)
from src.manifolds.dispatch import exp_map, geodesic_distance, log_map
from src.manifolds.spd import spd_matrix_exp, spd_whitened_logs
from src.manifolds.types import GrassmannPoint, ManifoldPoint, SymPosDef, TangentVector
from src.models.pca import PcaProjection
from src.parallel import parallel_map
from src.words.modeling import MidLevelWord, WordKind, check_same_kind

logger = logging.getLogger(__name__)

DISTINCT_TOL = 1e-8
SEEDING_METHODS = ("kmeans++", "random")

PointsLike = Sequence[Union[MidLevelWord, ManifoldPoint]]


@dataclass(frozen=True)
class KarcherInfo:
    """Diagnostics of a Karcher mean computation.

    Attributes:
        iterations: Number of mean-tangent evaluations
        residual: Riemannian norm of the last mean tangent
        converged: Whether residual^2 dropped below the tolerance
    """

    iterations: int
    residual: float
    converged: bool


def _as_points(items: PointsLike) -> List[ManifoldPoint]:
    if not items:
        raise InsufficientDataError("Karcher mean of an empty set")
    points = [item.payload if isinstance(item, MidLevelWord) else item for item in items]
    first = points[0]
    for point in points[1:]:
        if type(point) is not type(first) or point.shape != first.shape:
            raise KindMismatchError("Karcher mean needs points of one kind and shape")
    return points


def _spd_mean_step(base: SymPosDef, points: Sequence[SymPosDef]):
    root, _, logs = spd_whitened_logs(base, points)
    whitened = logs.mean(axis=0)
    residual = float(np.linalg.norm(whitened, "fro"))

    def advance():
        moved = root @ spd_matrix_exp(whitened).entries @ root
        return SymPosDef(0.5 * (moved + moved.T))

    return residual, advance


def _grassmann_mean_step(base: GrassmannPoint, points: Sequence[GrassmannPoint]):
    coords = np.mean([log_map(base, point).coords for point in points], axis=0)
    coords = coords - base.basis @ (base.basis.T @ coords)
    residual = float(np.linalg.norm(coords, "fro"))
    return residual, lambda: exp_map(base, TangentVector(base, coords))


def _extrinsic_grassmann_mean(points: Sequence[GrassmannPoint]) -> GrassmannPoint:
    """Leading eigenvectors of the averaged projection matrices."""
    projector = np.mean([p.basis @ p.basis.T for p in points], axis=0)
    _, eigvecs = np.linalg.eigh(0.5 * (projector + projector.T))
    return GrassmannPoint(eigvecs[:, ::-1][:, : points[0].subspace_dim])


def _descend(
    points: Sequence[ManifoldPoint],
    start: ManifoldPoint,
    max_iter: int,
    tol: float,
) -> Tuple[ManifoldPoint, KarcherInfo]:
    step = _spd_mean_step if isinstance(start, SymPosDef) else _grassmann_mean_step
    current = start
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        residual, advance = step(current, points)
        if residual * residual < tol:
            return current, KarcherInfo(iteration, residual, True)
        current = advance()
    return current, KarcherInfo(max_iter, residual, False)


def karcher_mean(
    words: PointsLike,
    max_iter: int = 50,
    tol: float = 1e-10,
    initial: Optional[ManifoldPoint] = None,
    return_info: bool = False,
):
    """Karcher (Frechet) mean of same-kind manifold points.

    Iterates X <- exp_X(mean_i log_X(X_i)) starting from ``initial`` or the
    first point, and stops once the squared Riemannian norm of the mean
    tangent is below ``tol``. At that point the summed log maps satisfy
    ||sum_i log_X(X_i)|| <= sqrt(tol) * N.

    Args:
        words: MidLevelWords or bare SymPosDef / GrassmannPoint values
        max_iter: Iteration cap
        tol: Threshold on the squared mean-tangent norm
        initial: Optional warm start
        return_info: Also return a KarcherInfo record

    Returns:
        The mean point, or (point, KarcherInfo) when ``return_info`` is set

    Raises:
        InsufficientDataError: If ``words`` is empty
        KindMismatchError: If the points differ in kind or shape
        CutLocusError: If a Grassmann log map stays undefined after restarting
            from the extrinsic mean

    Example:
        >>> a, b = SymPosDef(np.diag([1.0, 4.0])), SymPosDef(np.diag([4.0, 1.0]))
        >>> karcher_mean([a, b]).entries
        array([[2., 0.],
               [0., 2.]])
    """
    if max_iter < 1 or tol <= 0:
        raise ConfigError("karcher_mean needs max_iter >= 1 and tol > 0")
    points = _as_points(words)
    start = initial if initial is not None else points[0]
    try:
        mean, info = _descend(points, start, max_iter, tol)
    except CutLocusError:
        if not isinstance(start, GrassmannPoint):
            raise
        logger.warning("Karcher mean hit the Grassmann cut locus; restarting from "
                       "the extrinsic mean")
        mean, info = _descend(points, _extrinsic_grassmann_mean(points), max_iter, tol)

    if not info.converged:
        logger.warning(
            "Karcher mean did not converge in %d iterations (residual %.3e)",
            info.iterations,
            info.residual,
        )
    return (mean, info) if return_info else mean


@dataclass(frozen=True, eq=False)
class KarcherCodebook:
    """M Karcher cluster centers of one word kind.

    Attributes:
        kind: Word kind the codebook was learned on
        centers: Cluster centers, pairwise distinct
        pca: Projection of embedded words used by VLAD, if fitted
        objective_trace: Within-cluster sum of squared distances per iteration
        assignments: Final training-word assignments
    """

    kind: WordKind
    centers: Tuple[ManifoldPoint, ...]
    pca: Optional[PcaProjection] = None
    objective_trace: Tuple[float, ...] = field(default=())
    assignments: Optional[np.ndarray] = None

    def __post_init__(self):
        centers = tuple(self.centers)
        if not centers:
            raise ConfigError("A codebook needs at least one center")
        words = [MidLevelWord(self.kind, center) for center in centers]
        check_same_kind(words)
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                if geodesic_distance(centers[i], centers[j]) <= DISTINCT_TOL:
                    raise DegenerateInputError(
                        f"Codebook centers {i} and {j} coincide"
                    )
        object.__setattr__(self, "centers", centers)

    @property
    def n_centers(self) -> int:
        return len(self.centers)

    def check_words(self, words: Sequence[MidLevelWord]):
        """Raise KindMismatchError unless ``words`` match the codebook."""
        kind = check_same_kind(words)
        if kind is not self.kind or words[0].payload.shape != self.centers[0].shape:
            raise KindMismatchError(
                f"Words of kind {kind.name} {words[0].shape} do not match a "
                f"{self.kind.name} codebook {self.centers[0].shape}"
            )

    def distances(self, words: Sequence[MidLevelWord], workers: Optional[int] = 1):
        """Geodesic distances, shape (len(words), M)."""
        self.check_words(words)
        return _distance_matrix([w.payload for w in words], self.centers, workers)

    def assign(self, words: Sequence[MidLevelWord], workers: Optional[int] = 1):
        """Nearest center per word; ties go to the lower center index."""
        return np.argmin(self.distances(words, workers), axis=1)


def _distance_row(point, centers):
    return [geodesic_distance(point, center) for center in centers]


def _distance_matrix(points, centers, workers) -> np.ndarray:
    rows = parallel_map(partial(_distance_row, centers=centers), points, workers)
    return np.asarray(rows, dtype=np.float64).reshape(len(points), len(centers))


def _seed_centers(points, n_centers, rng, init) -> List[int]:
    count = len(points)
    if init == "random":
        return sorted(int(i) for i in rng.choice(count, size=n_centers, replace=False))

    chosen = [int(rng.integers(count))]
    closest = np.array(_distance_row(points[chosen[0]], points)) ** 2
    while len(chosen) < n_centers:
        total = float(np.sum(closest))
        if total > 0:
            pick = int(rng.choice(count, p=closest / total))
        else:
            pick = next(i for i in range(count) if i not in chosen)
        chosen.append(pick)
        update = np.array(_distance_row(points[pick], points)) ** 2
        closest = np.minimum(closest, update)
    return chosen


def _repair_empty(labels, distances, n_centers, centers, points):
    """Move the globally farthest word into each empty cluster."""
    counts = np.bincount(labels, minlength=n_centers)
    own = distances[np.arange(len(labels)), labels]
    for m in np.flatnonzero(counts == 0):
        movable = np.flatnonzero(counts[labels] > 1)
        far = int(movable[np.argmax(own[movable])])
        logger.warning("Cluster %d is empty; reseeding it with word %d", m, far)
        counts[labels[far]] -= 1
        counts[m] = 1
        labels[far] = m
        own[far] = 0.0
        centers[m] = points[far]


def _update_center(members_and_start, max_iter, tol):
    members, start = members_and_start
    return karcher_mean(members, max_iter=max_iter, tol=tol, initial=start)


def k_karcher_means(
    words: Sequence[MidLevelWord],
    n_centers: int,
    seed: Optional[int] = 0,
    max_iter: int = 100,
    init: str = "kmeans++",
    karcher_max_iter: int = 50,
    karcher_tol: float = 1e-10,
    workers: Optional[int] = 1,
) -> KarcherCodebook:
    """Cluster mid-level words into M intrinsic Karcher centers.

    Args:
        words: Training words of a single kind
        n_centers: Codebook size M
        seed: Seed for the center selection
        max_iter: Cap on assignment/update rounds
        init: 'kmeans++' (seeding over geodesic distances) or 'random'
        karcher_max_iter: Iteration cap of each center update
        karcher_tol: Tolerance of each center update
        workers: Worker threads for distances and center updates

    Returns:
        KarcherCodebook with its objective trace and final assignments

    Raises:
        ConfigError: If n_centers < 1 or init is unknown
        InsufficientDataError: If there are fewer words than centers
        DegenerateInputError: If fewer than M distinct words exist
    """
    if n_centers < 1:
        raise ConfigError("Codebook size M must be positive")
    if init not in SEEDING_METHODS:
        raise ConfigError(f"Unknown seeding method '{init}'")
    kind = check_same_kind(words)
    points = [word.payload for word in words]
    if len(points) < n_centers:
        raise InsufficientDataError(
            f"{len(points)} words cannot form {n_centers} clusters"
        )

    rng = np.random.default_rng(seed)
    centers = [points[i] for i in _seed_centers(points, n_centers, rng, init)]
    update = partial(_update_center, max_iter=karcher_max_iter, tol=karcher_tol)

    trace: List[float] = []
    labels = None
    for iteration in range(1, max_iter + 1):
        distances = _distance_matrix(points, centers, workers)
        new_labels = np.argmin(distances, axis=1)
        objective = float(np.sum(distances[np.arange(len(points)), new_labels] ** 2))
        trace.append(objective)
        logger.debug("K-Karcher-means iteration %d: objective %.10g", iteration, objective)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        _repair_empty(labels, distances, n_centers, centers, points)
        jobs = [
            ([points[i] for i in np.flatnonzero(labels == m)], centers[m])
            for m in range(n_centers)
        ]
        centers = parallel_map(update, jobs, workers)
    else:
        distances = _distance_matrix(points, centers, workers)
        labels = np.argmin(distances, axis=1)

    logger.info(
        "K-Karcher-means: %s words, M=%d, %d iterations, objective %.6g",
        kind.value,
        n_centers,
        len(trace),
        trace[-1],
    )
    return KarcherCodebook(
        kind=kind,
        centers=tuple(centers),
        objective_trace=tuple(trace),
        assignments=np.asarray(labels),
    )
