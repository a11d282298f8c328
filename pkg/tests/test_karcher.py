"""Tests for Karcher means, K-Karcher-means codebooks and word embeddings."""

import numpy as np
import pytest

from conftest import grassmann_near, make_grassmann, make_spd
from src.codebook import (
    KarcherCodebook,
    embed_words,
    embedding_dim,
    k_karcher_means,
    karcher_mean,
)
from src.exceptions import (
    ConfigError,
    DegenerateInputError,
    InsufficientDataError,
    KindMismatchError,
)
from src.manifolds.grassmann import embed_grassmann, grassmann_log_map
from src.manifolds.spd import embed_spd, spd_log_map, spd_matrix_exp, spd_tangent_norm
from src.manifolds.types import GrassmannPoint, SymPosDef, TangentVector
from src.words import MidLevelWord, WordKind

BASE_EIGENVALUES = [
    np.zeros(3),
    np.array([4.0, 0.0, -4.0]),
    np.array([-4.0, 4.0, 0.0]),
]


def eigen_sqrt(matrix):
    eigvals, eigvecs = np.linalg.eigh(matrix)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def eigen_log(matrix):
    eigvals, eigvecs = np.linalg.eigh(matrix)
    return (eigvecs * np.log(eigvals)) @ eigvecs.T


def perturbed_spd(rng, log_eigenvalues, std=0.05):
    """B^{1/2} exp(S) B^{1/2} for B = diag(exp(log_eigenvalues)), S symmetric noise."""
    root = np.diag(np.exp(0.5 * log_eigenvalues))
    noise = rng.normal(0.0, std, (3, 3))
    moved = root @ spd_matrix_exp(0.5 * (noise + noise.T)).entries @ root
    return SymPosDef(0.5 * (moved + moved.T))


def cov_words(points):
    return [MidLevelWord(WordKind.COVARIANCE, point) for point in points]


def clustered_words(rng, per_cluster=30):
    points, labels = [], []
    for label, log_eigs in enumerate(BASE_EIGENVALUES):
        points += [perturbed_spd(rng, log_eigs) for _ in range(per_cluster)]
        labels += [label] * per_cluster
    return cov_words(points), np.array(labels)


def purity(assignments, labels):
    hits = 0
    for cluster in np.unique(assignments):
        members = labels[assignments == cluster]
        hits += np.bincount(members).max()
    return hits / labels.size


class TestKarcherMean:
    """Fixed-step Riemannian gradient descent for the Frechet mean."""

    def test_identical_inputs(self, spd_factory):
        point = spd_factory(4)
        mean, info = karcher_mean([point] * 5, return_info=True)
        assert info.iterations == 1 and info.converged
        np.testing.assert_array_equal(mean.entries, point.entries)

    def test_two_point_geodesic_midpoint(self, rng):
        for _ in range(10):
            x, y = make_spd(rng, 4), make_spd(rng, 4)
            root = eigen_sqrt(x.entries)
            inv_root = np.linalg.inv(root)
            midpoint = root @ eigen_sqrt(inv_root @ y.entries @ inv_root) @ root
            mean = karcher_mean([x, y], max_iter=200, tol=1e-24)
            np.testing.assert_allclose(mean.entries, midpoint,
                                       atol=1e-8 * np.abs(midpoint).max())

    def test_commuting_diagonal_set(self, rng):
        """The mean of diagonal matrices is the diagonal of geometric means."""
        diagonals = np.exp(rng.normal(0.0, 1.5, (6, 4)))
        mean = karcher_mean([SymPosDef(np.diag(d)) for d in diagonals])
        expected = np.exp(np.log(diagonals).mean(axis=0))
        np.testing.assert_allclose(np.diag(mean.entries), expected, rtol=1e-10)
        np.testing.assert_allclose(mean.entries - np.diag(np.diag(mean.entries)), 0.0,
                                   atol=1e-10 * expected.max())

    def test_spd_stationarity(self, rng):
        """Summed log maps vanish at the returned mean."""
        for _ in range(100):
            points = [make_spd(rng, 3) for _ in range(5)]
            mean = karcher_mean(points, max_iter=200, tol=1e-14)
            total = sum(spd_log_map(mean, p).coords for p in points)
            assert spd_tangent_norm(mean, TangentVector(mean, total)) < 1e-5

    def test_grassmann_stationarity(self, rng):
        for _ in range(100):
            center = make_grassmann(rng, 5, 2)
            points = [grassmann_near(rng, center, 0.4) for _ in range(5)]
            mean = karcher_mean(points, max_iter=200, tol=1e-14)
            total = sum(grassmann_log_map(mean, p).coords for p in points)
            assert np.linalg.norm(total) < 1e-5

    def test_congruence_equivariance(self, rng):
        """mean(A X_i A^T) = A mean(X_i) A^T."""
        for _ in range(10):
            points = [make_spd(rng, 3) for _ in range(5)]
            congruence = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
            moved = [SymPosDef(congruence @ p.entries @ congruence.T) for p in points]
            expected = congruence @ karcher_mean(points, max_iter=200,
                                                 tol=1e-20).entries @ congruence.T
            actual = karcher_mean(moved, max_iter=200, tol=1e-20).entries
            np.testing.assert_allclose(actual, expected,
                                       atol=1e-6 * np.abs(expected).max())

    def test_cut_locus_retry(self, caplog):
        """Orthogonal lines restart from the extrinsic mean."""
        points = [
            GrassmannPoint(np.array([[1.0], [0.0]])),
            GrassmannPoint(np.array([[0.0], [1.0]])),
            GrassmannPoint(np.array([[1.0], [1.0]]) / np.sqrt(2.0)),
        ]
        mean = karcher_mean(points)
        np.testing.assert_allclose(np.abs(mean.basis[:, 0]), [2 ** -0.5, 2 ** -0.5],
                                   atol=1e-10)
        assert "cut locus" in caplog.text

    def test_accepts_words(self, spd_factory):
        points = [spd_factory(3) for _ in range(4)]
        from_words = karcher_mean(cov_words(points))
        from_points = karcher_mean(points)
        np.testing.assert_array_equal(from_words.entries, from_points.entries)

    def test_rejects_empty_and_mixed(self, spd_factory, grassmann_factory):
        with pytest.raises(InsufficientDataError):
            karcher_mean([])
        with pytest.raises(KindMismatchError):
            karcher_mean([spd_factory(3), grassmann_factory(3, 1)])
        with pytest.raises(KindMismatchError):
            karcher_mean([spd_factory(3), spd_factory(4)])

    @pytest.mark.parametrize("max_iter,tol", [(0, 1e-10), (10, 0.0)])
    def test_invalid_settings(self, spd_factory, max_iter, tol):
        with pytest.raises(ConfigError):
            karcher_mean([spd_factory(3)], max_iter=max_iter, tol=tol)


class TestKKarcherMeans:
    """Intrinsic clustering of words."""

    @pytest.mark.parametrize("seed", range(20))
    def test_recovers_separated_clusters(self, seed):
        rng = np.random.default_rng(seed)
        words, labels = clustered_words(rng)
        codebook = k_karcher_means(words, 3, seed=seed)
        assert purity(codebook.assignments, labels) >= 0.95

    @pytest.mark.parametrize("init", ["kmeans++", "random"])
    def test_objective_non_increasing(self, rng, init):
        words = cov_words([make_spd(rng, 3) for _ in range(40)])
        codebook = k_karcher_means(words, 4, seed=1, init=init)
        trace = np.asarray(codebook.objective_trace)
        assert np.all(np.diff(trace) <= 1e-9 * trace[:-1])

    def test_final_assignment_is_fixed_point(self, rng):
        words = cov_words([make_spd(rng, 3) for _ in range(40)])
        codebook = k_karcher_means(words, 4, seed=2)
        np.testing.assert_array_equal(codebook.assign(words), codebook.assignments)

    def test_one_center_per_word(self, rng):
        words = cov_words([make_spd(rng, 3) for _ in range(6)])
        codebook = k_karcher_means(words, 6)
        assert codebook.objective_trace[-1] == pytest.approx(0.0, abs=1e-20)
        assert sorted(codebook.assignments.tolist()) == list(range(6))

    def test_grassmann_words(self, rng):
        centers = [make_grassmann(rng, 6, 2) for _ in range(2)]
        words = [
            MidLevelWord(WordKind.SUBSPACE, grassmann_near(rng, center, 0.05))
            for center in centers for _ in range(15)
        ]
        codebook = k_karcher_means(words, 2, seed=0)
        assert purity(codebook.assignments, np.repeat([0, 1], 15)) == 1.0

    def test_deterministic_across_workers(self, rng):
        words, _ = clustered_words(rng, per_cluster=10)
        serial = k_karcher_means(words, 3, seed=4, workers=1)
        threaded = k_karcher_means(words, 3, seed=4, workers=4)
        assert serial.objective_trace == threaded.objective_trace
        for a, b in zip(serial.centers, threaded.centers):
            np.testing.assert_array_equal(a.entries, b.entries)

    def test_too_few_words(self, rng):
        with pytest.raises(InsufficientDataError):
            k_karcher_means(cov_words([make_spd(rng, 3) for _ in range(3)]), 4)

    @pytest.mark.parametrize("kwargs", [{"n_centers": 0}, {"n_centers": 2, "init": "grid"}])
    def test_invalid_settings(self, rng, kwargs):
        with pytest.raises(ConfigError):
            k_karcher_means(cov_words([make_spd(rng, 3) for _ in range(5)]), **kwargs)


class TestKarcherCodebook:
    """Codebook validation and assignment."""

    def test_coinciding_centers(self, spd_factory):
        point = spd_factory(3)
        with pytest.raises(DegenerateInputError):
            KarcherCodebook(WordKind.COVARIANCE, (point, SymPosDef(point.entries.copy())))

    def test_rejects_other_kinds(self, spd_factory):
        codebook = KarcherCodebook(WordKind.COVARIANCE, (spd_factory(3), spd_factory(3)))
        gaussian = [MidLevelWord(WordKind.GAUSSIAN, spd_factory(3))]
        with pytest.raises(KindMismatchError):
            codebook.distances(gaussian)
        with pytest.raises(KindMismatchError):
            codebook.distances(cov_words([spd_factory(4)]))

    def test_assigns_nearest(self):
        centers = (SymPosDef(np.eye(2)), SymPosDef(np.diag([100.0, 100.0])))
        codebook = KarcherCodebook(WordKind.COVARIANCE, centers)
        words = cov_words([SymPosDef(np.diag([2.0, 1.0])), SymPosDef(np.diag([90.0, 80.0]))])
        np.testing.assert_array_equal(codebook.assign(words), [0, 1])
        assert codebook.distances(words).shape == (2, 2)


class TestEmbedWords:
    """Kind-wise dispatch to the explicit embeddings."""

    def test_spd_words(self, spd_factory):
        points = [spd_factory(3) for _ in range(4)]
        expected = np.stack([embed_spd(p) for p in points])
        np.testing.assert_array_equal(embed_words(cov_words(points)), expected)

    def test_subspace_words(self, grassmann_factory):
        points = [grassmann_factory(5, 2) for _ in range(4)]
        words = [MidLevelWord(WordKind.SUBSPACE, p) for p in points]
        expected = np.stack([embed_grassmann(p) for p in points])
        np.testing.assert_array_equal(embed_words(words), expected)

    def test_identity_covariance_is_zero(self):
        embedded = embed_words(cov_words([SymPosDef.identity(4)]))
        np.testing.assert_array_equal(embedded, np.zeros((1, 10)))

    def test_log_euclidean_isometry(self, spd_factory):
        a, b = spd_factory(3), spd_factory(3)
        embedded = embed_words(cov_words([a, b]))
        expected = np.linalg.norm(
            eigen_log(a.entries) - eigen_log(b.entries), "fro"
        )
        assert np.linalg.norm(embedded[0] - embedded[1]) == pytest.approx(expected,
                                                                          rel=1e-10)

    @pytest.mark.parametrize("kind,point,length", [
        (WordKind.COVARIANCE, SymPosDef.identity(3), 6),
        (WordKind.GAUSSIAN, SymPosDef.identity(4), 10),
        (WordKind.SUBSPACE, GrassmannPoint(np.eye(5, 2)), 15),
    ])
    def test_embedding_dim(self, kind, point, length):
        word = MidLevelWord(kind, point)
        assert embedding_dim(word) == length == embed_words([word]).shape[1]

    def test_mixed_kinds_rejected(self, spd_factory):
        words = [MidLevelWord(WordKind.COVARIANCE, spd_factory(3)),
                 MidLevelWord(WordKind.GAUSSIAN, spd_factory(3))]
        with pytest.raises(KindMismatchError):
            embed_words(words)
