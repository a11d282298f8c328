"""Tests for SPD and Grassmann geometry."""

import numpy as np
import pytest

from conftest import grassmann_near, horizontal_tangent, make_grassmann, make_spd
from src.exceptions import (
    CutLocusError,
    DimensionMismatchError,
    InvalidInputError,
    KindMismatchError,
    NotPositiveDefiniteError,
)
from src.manifolds import (
    GrassmannPoint,
    SymPosDef,
    TangentVector,
    embed_grassmann,
    embed_point,
    embed_points,
    embed_spd,
    embedding_matrix,
    exp_map,
    geodesic_distance,
    grassmann_exp_map,
    grassmann_geodesic_dist,
    grassmann_log_map,
    grassmann_projection_dist,
    log_map,
    principal_angles,
    spd_exp_map,
    spd_geodesic_dist,
    spd_log_map,
    spd_matrix_exp,
    spd_matrix_log,
    spd_tangent_norm,
    sym_unvec,
    sym_vec,
    sym_vec_many,
    tangent_norm,
)
from src.manifolds.grassmann import grassmann_tangent_norm
from src.manifolds.vectorize import triangular_dim

E2 = np.e ** 2


def rel_err(actual, expected):
    return np.linalg.norm(actual - expected) / max(np.linalg.norm(expected), 1e-300)


def random_invertible(rng, dim):
    return rng.standard_normal((dim, dim)) + 3.0 * np.eye(dim)


def congruence(a, point):
    moved = a @ point.entries @ a.T
    return SymPosDef(0.5 * (moved + moved.T))


class TestPointTypes:
    """Construction invariants of the manifold types."""

    def test_spd_rejects_asymmetric(self):
        """A visibly asymmetric matrix is not an SPD point."""
        with pytest.raises(InvalidInputError):
            SymPosDef(np.array([[2.0, 1.0], [0.0, 2.0]]))

    def test_spd_rejects_indefinite(self):
        """Cholesky failure maps to NotPositiveDefiniteError."""
        with pytest.raises(NotPositiveDefiniteError):
            SymPosDef(np.diag([1.0, -1.0]))

    def test_spd_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            SymPosDef(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_spd_entries_are_read_only(self):
        """Points are immutable after construction."""
        point = SymPosDef.identity(3)
        with pytest.raises(ValueError):
            point.entries[0, 0] = 5.0

    def test_grassmann_rejects_non_orthonormal(self):
        with pytest.raises(InvalidInputError):
            GrassmannPoint(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))

    def test_grassmann_rejects_wide_basis(self):
        """r must not exceed d."""
        with pytest.raises(InvalidInputError):
            GrassmannPoint(np.eye(2, 3))

    def test_grassmann_from_matrix(self, rng):
        """QR orthonormalization yields a valid basis of the same span."""
        raw = rng.standard_normal((6, 3))
        point = GrassmannPoint.from_matrix(raw)
        assert point.ambient_dim == 6 and point.subspace_dim == 3
        residual = raw - point.basis @ (point.basis.T @ raw)
        assert np.max(np.abs(residual)) < 1e-10

    def test_tangent_must_be_symmetric_at_spd(self):
        with pytest.raises(InvalidInputError):
            TangentVector(SymPosDef.identity(2), np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_tangent_must_be_horizontal_at_grassmann(self):
        base = GrassmannPoint(np.array([[1.0], [0.0]]))
        with pytest.raises(InvalidInputError):
            TangentVector(base, np.array([[1.0], [0.0]]))

    def test_tangent_shape_must_match(self):
        with pytest.raises(DimensionMismatchError):
            TangentVector(SymPosDef.identity(2), np.zeros((3, 3)))


class TestSymVec:
    """Isometric half-vectorization."""

    def test_two_by_two_layout(self):
        """[[a, b], [b, c]] maps to (a, sqrt(2) b, c)."""
        vector = sym_vec(np.array([[1.0, 2.0], [2.0, 3.0]]))
        np.testing.assert_allclose(vector, [1.0, 2.0 * np.sqrt(2.0), 3.0], rtol=1e-15)

    def test_round_trip_is_exact(self, rng):
        a = rng.standard_normal((5, 5))
        sym = a + a.T
        np.testing.assert_allclose(sym_unvec(sym_vec(sym)), sym, rtol=1e-15, atol=1e-15)

    def test_inner_product_preserved(self, rng):
        """<sym_vec(A), sym_vec(B)> equals the Frobenius inner product."""
        for _ in range(100):
            a, b = rng.standard_normal((2, 6, 6))
            a, b = a + a.T, b + b.T
            frobenius = float(np.sum(a * b))
            assert abs(sym_vec(a) @ sym_vec(b) - frobenius) <= 1e-12 * max(
                1.0, abs(frobenius)
            )

    @pytest.mark.parametrize("length", [2, 4, 5, 7, 11])
    def test_non_triangular_length_rejected(self, length):
        with pytest.raises(DimensionMismatchError):
            sym_unvec(np.zeros(length))

    def test_triangular_dim(self):
        assert triangular_dim(36) == 8
        assert triangular_dim(1) == 1

    def test_dim_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            sym_unvec(np.zeros(6), dim=4)

    def test_many_matches_single(self, rng):
        stack = rng.standard_normal((4, 5, 5))
        stack = stack + stack.transpose(0, 2, 1)
        expected = np.stack([sym_vec(matrix) for matrix in stack])
        np.testing.assert_array_equal(sym_vec_many(stack), expected)

    def test_many_needs_square_stack(self):
        with pytest.raises(InvalidInputError):
            sym_vec_many(np.zeros((3, 2, 4)))
        with pytest.raises(InvalidInputError):
            sym_vec_many(np.eye(3))


class TestSpdGeometry:
    """Affine-invariant SPD operations."""

    def test_log_of_identity_is_zero(self):
        np.testing.assert_array_equal(spd_matrix_log(np.eye(4)), np.zeros((4, 4)))

    def test_log_of_diagonal(self):
        """log diag(e^2, 1) = diag(2, 0)."""
        np.testing.assert_allclose(
            spd_matrix_log(SymPosDef(np.diag([E2, 1.0]))), np.diag([2.0, 0.0]),
            atol=1e-12,
        )

    def test_exp_inverts_log(self, spd_factory):
        for _ in range(50):
            point = spd_factory(5)
            restored = spd_matrix_exp(spd_matrix_log(point))
            assert rel_err(restored.entries, point.entries) < 1e-8

    def test_log_rejects_indefinite_array(self):
        with pytest.raises(NotPositiveDefiniteError):
            spd_matrix_log(np.diag([1.0, 0.0]))

    def test_log_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            spd_matrix_log(np.array([[np.inf, 0.0], [0.0, 1.0]]))

    def test_log_map_at_itself_is_zero(self, spd_factory):
        point = spd_factory(4)
        assert np.max(np.abs(spd_log_map(point, point).coords)) < 1e-10

    def test_log_map_at_identity_is_matrix_log(self, spd_factory):
        target = spd_factory(4)
        tangent = spd_log_map(SymPosDef.identity(4), target)
        np.testing.assert_allclose(tangent.coords, spd_matrix_log(target), atol=1e-12)

    def test_log_map_commuting_closed_form(self, rng):
        """For diagonal X, Y the log map is diag(x ln(y / x))."""
        x = np.exp(rng.normal(size=4))
        y = np.exp(rng.normal(size=4))
        tangent = spd_log_map(SymPosDef(np.diag(x)), SymPosDef(np.diag(y)))
        np.testing.assert_allclose(tangent.coords, np.diag(x * np.log(y / x)),
                                   atol=1e-12)

    def test_exp_map_of_zero_tangent(self, spd_factory):
        base = spd_factory(3)
        moved = spd_exp_map(base, TangentVector(base, np.zeros((3, 3))))
        assert rel_err(moved.entries, base.entries) < 1e-12

    def test_exp_map_diagonal(self):
        """exp_I(diag(2, 0)) = diag(e^2, 1)."""
        identity = SymPosDef.identity(2)
        moved = spd_exp_map(identity, TangentVector(identity, np.diag([2.0, 0.0])))
        np.testing.assert_allclose(moved.entries, np.diag([E2, 1.0]), rtol=1e-12,
                                   atol=1e-12)

    def test_exp_log_round_trip(self, spd_factory):
        for _ in range(50):
            base, target = spd_factory(4), spd_factory(4)
            restored = spd_exp_map(base, spd_log_map(base, target))
            assert rel_err(restored.entries, target.entries) < 1e-7

    def test_log_exp_round_trip(self, rng, spd_factory):
        for _ in range(20):
            base = spd_factory(4)
            raw = rng.standard_normal((4, 4))
            tangent = TangentVector(base, 0.5 * (raw + raw.T))
            restored = spd_log_map(base, spd_exp_map(base, tangent))
            assert rel_err(restored.coords, tangent.coords) < 1e-7

    def test_exp_map_needs_matching_base(self, spd_factory):
        base, other = spd_factory(3), spd_factory(3)
        with pytest.raises(InvalidInputError):
            spd_exp_map(base, TangentVector(other, np.eye(3)))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            spd_log_map(SymPosDef.identity(2), SymPosDef.identity(3))

    def test_distance_to_itself(self, spd_factory):
        point = spd_factory(5)
        assert spd_geodesic_dist(point, point) < 1e-10

    def test_distance_closed_form(self):
        """d(I, diag(e^2, 1)) = 2."""
        distance = spd_geodesic_dist(SymPosDef.identity(2), SymPosDef(np.diag([E2, 1.0])))
        assert distance == pytest.approx(2.0, rel=1e-12)

    def test_affine_invariance(self, rng, spd_factory):
        """d(A X A^T, A Y A^T) = d(X, Y)."""
        for _ in range(100):
            x, y = spd_factory(4), spd_factory(4)
            a = random_invertible(rng, 4)
            expected = spd_geodesic_dist(x, y)
            moved = spd_geodesic_dist(congruence(a, x), congruence(a, y))
            assert moved == pytest.approx(expected, rel=1e-8)

    def test_tangent_norm_equals_distance(self, spd_factory):
        base, target = spd_factory(4), spd_factory(4)
        norm = spd_tangent_norm(base, spd_log_map(base, target))
        assert norm == pytest.approx(spd_geodesic_dist(base, target), rel=1e-9)

    def test_metric_axioms(self, rng):
        """Non-negativity, symmetry and the triangle inequality on 1000 triples."""
        for _ in range(1000):
            x, y, z = (make_spd(rng, 3) for _ in range(3))
            dxy, dyx = spd_geodesic_dist(x, y), spd_geodesic_dist(y, x)
            dyz, dxz = spd_geodesic_dist(y, z), spd_geodesic_dist(x, z)
            assert dxy >= 0
            assert abs(dxy - dyx) <= 1e-10 * max(1.0, dxy)
            assert dxz <= dxy + dyz + 1e-10

    def test_embedding_of_identity(self):
        np.testing.assert_array_equal(embed_spd(SymPosDef.identity(3)), np.zeros(6))

    def test_embedding_of_diagonal(self):
        np.testing.assert_allclose(embed_spd(SymPosDef(np.diag([E2, 1.0]))),
                                   [2.0, 0.0, 0.0], atol=1e-12)

    def test_embedding_isometry(self, spd_factory):
        """||embed(A) - embed(B)|| = ||log A - log B||_F."""
        a, b = spd_factory(4), spd_factory(4)
        expected = np.linalg.norm(spd_matrix_log(a) - spd_matrix_log(b), "fro")
        assert np.linalg.norm(embed_spd(a) - embed_spd(b)) == pytest.approx(
            expected, rel=1e-12
        )


class TestGrassmannGeometry:
    """Grassmann operations on orthonormal bases."""

    def test_distance_basis_invariant(self, rng, grassmann_factory):
        """d(U, U R) = 0 for orthogonal R."""
        point = grassmann_factory(6, 3)
        rotation, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        rotated = GrassmannPoint(point.basis @ rotation)
        assert grassmann_geodesic_dist(point, rotated) < 1e-7

    def test_orthogonal_lines(self):
        """span(e1) and span(e2) are pi/2 apart."""
        e1 = GrassmannPoint(np.array([[1.0], [0.0]]))
        e2 = GrassmannPoint(np.array([[0.0], [1.0]]))
        assert grassmann_geodesic_dist(e1, e2) == pytest.approx(np.pi / 2, rel=1e-12)

    def test_principal_angles_ascending(self, grassmann_factory):
        angles = principal_angles(grassmann_factory(7, 3), grassmann_factory(7, 3))
        assert np.all(np.diff(angles) >= -1e-12)
        assert np.all((angles >= 0) & (angles <= np.pi / 2 + 1e-12))

    def test_metric_axioms(self, rng):
        for _ in range(1000):
            x, y, z = (make_grassmann(rng, 5, 2) for _ in range(3))
            dxy, dyx = grassmann_geodesic_dist(x, y), grassmann_geodesic_dist(y, x)
            dyz, dxz = grassmann_geodesic_dist(y, z), grassmann_geodesic_dist(x, z)
            assert dxy >= 0
            assert abs(dxy - dyx) <= 1e-10 * max(1.0, dxy)
            assert dxz <= dxy + dyz + 1e-10

    def test_log_map_at_itself_is_zero(self, grassmann_factory):
        point = grassmann_factory(6, 2)
        assert np.max(np.abs(grassmann_log_map(point, point).coords)) < 1e-12

    @pytest.mark.parametrize("alpha", [0.1, 0.7, 1.3])
    def test_single_angle_tangent_norm(self, alpha):
        """Between two lines in R^2 the tangent norm is the angle."""
        base = GrassmannPoint(np.array([[1.0], [0.0]]))
        target = GrassmannPoint(np.array([[np.cos(alpha)], [np.sin(alpha)]]))
        tangent = grassmann_log_map(base, target)
        assert grassmann_tangent_norm(tangent) == pytest.approx(alpha, rel=1e-12)
        restored = grassmann_exp_map(base, tangent)
        assert grassmann_projection_dist(restored, target) < 1e-12

    def test_exp_log_round_trip(self, rng):
        """Round trip for principal angles below pi/2 - 0.1."""
        for _ in range(50):
            base = make_grassmann(rng, 6, 3)
            target = grassmann_near(rng, base, 1.2)
            restored = grassmann_exp_map(base, grassmann_log_map(base, target))
            assert grassmann_projection_dist(restored, target) < 1e-7

    def test_log_exp_round_trip(self, rng):
        base = make_grassmann(rng, 6, 2)
        tangent = horizontal_tangent(rng, base, 0.8)
        restored = grassmann_log_map(base, grassmann_exp_map(base, tangent))
        assert rel_err(restored.coords, tangent.coords) < 1e-7

    def test_distance_equals_log_norm(self, rng):
        for _ in range(50):
            base = make_grassmann(rng, 7, 3)
            target = grassmann_near(rng, base, 1.0)
            norm = grassmann_tangent_norm(grassmann_log_map(base, target))
            assert abs(norm - grassmann_geodesic_dist(base, target)) < 1e-8

    def test_exp_of_zero_tangent(self, grassmann_factory):
        base = grassmann_factory(5, 2)
        moved = grassmann_exp_map(base, TangentVector(base, np.zeros((5, 2))))
        assert grassmann_projection_dist(moved, base) < 1e-12

    def test_exp_result_is_orthonormal(self, rng):
        base = make_grassmann(rng, 8, 4)
        moved = grassmann_exp_map(base, horizontal_tangent(rng, base, 2.0))
        np.testing.assert_allclose(moved.basis.T @ moved.basis, np.eye(4), atol=1e-10)

    def test_cut_locus_raises(self):
        base = GrassmannPoint(np.array([[1.0], [0.0]]))
        with pytest.raises(CutLocusError):
            grassmann_log_map(base, GrassmannPoint(np.array([[0.0], [1.0]])))

    def test_shape_mismatch(self, grassmann_factory):
        with pytest.raises(DimensionMismatchError):
            grassmann_geodesic_dist(grassmann_factory(5, 2), grassmann_factory(5, 3))

    def test_embedding_of_line(self):
        """span(e1) in R^2 embeds to (1, 0, 0)."""
        line = GrassmannPoint(np.array([[1.0], [0.0]]))
        np.testing.assert_array_equal(embed_grassmann(line), [1.0, 0.0, 0.0])

    def test_embedding_basis_invariant(self, rng, grassmann_factory):
        point = grassmann_factory(5, 2)
        rotation, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        rotated = GrassmannPoint(point.basis @ rotation)
        np.testing.assert_allclose(embed_grassmann(point), embed_grassmann(rotated),
                                   atol=1e-12)

    def test_embedding_isometry(self, grassmann_factory):
        """Embedding distance equals the projection-metric distance."""
        for _ in range(20):
            a, b = grassmann_factory(6, 3), grassmann_factory(6, 3)
            assert np.linalg.norm(embed_grassmann(a) - embed_grassmann(b)) == (
                pytest.approx(grassmann_projection_dist(a, b), rel=1e-12)
            )


class TestDispatch:
    """Kind-dispatched geometry."""

    def test_routes_by_type(self, spd_factory, grassmann_factory):
        x, y = spd_factory(3), spd_factory(3)
        u, v = grassmann_factory(4, 2), grassmann_factory(4, 2)
        assert geodesic_distance(x, y) == spd_geodesic_dist(x, y)
        assert geodesic_distance(u, v) == grassmann_geodesic_dist(u, v)
        np.testing.assert_array_equal(embed_point(x), embed_spd(x))
        np.testing.assert_array_equal(embed_point(u), embed_grassmann(u))

    def test_tangent_norm_dispatch(self, spd_factory):
        x, y = spd_factory(3), spd_factory(3)
        assert tangent_norm(log_map(x, y)) == pytest.approx(spd_geodesic_dist(x, y),
                                                            rel=1e-9)

    def test_mixed_manifolds_rejected(self, spd_factory, grassmann_factory):
        with pytest.raises(KindMismatchError):
            geodesic_distance(spd_factory(3), grassmann_factory(3, 1))

    def test_exp_map_inverts_log_map(self, rng, spd_factory, grassmann_factory):
        x, y = spd_factory(3), spd_factory(3)
        assert spd_geodesic_dist(exp_map(x, log_map(x, y)), y) < 1e-9
        u = grassmann_factory(5, 2)
        v = grassmann_near(rng, u, 0.4)
        assert grassmann_geodesic_dist(exp_map(u, log_map(u, v)), v) < 1e-6

    def test_exp_map_matches_kind_specific(self, rng, spd_factory):
        x = spd_factory(3)
        tangent = spd_log_map(x, spd_factory(3))
        np.testing.assert_array_equal(exp_map(x, tangent).entries,
                                      spd_exp_map(x, tangent).entries)
        u = make_grassmann(rng, 5, 2)
        step = horizontal_tangent(rng, u, 0.3)
        np.testing.assert_array_equal(exp_map(u, step).basis,
                                      grassmann_exp_map(u, step).basis)

    def test_exp_map_rejects_foreign_tangent(self, spd_factory, grassmann_factory):
        u = grassmann_factory(3, 1)
        tangent = spd_log_map(spd_factory(3), spd_factory(3))
        with pytest.raises(KindMismatchError):
            exp_map(u, tangent)

    def test_batched_embedding_matches_points(self, spd_factory, grassmann_factory):
        spd = [spd_factory(3) for _ in range(4)]
        subspaces = [grassmann_factory(5, 2) for _ in range(4)]
        for points in (spd, subspaces):
            expected = np.stack([embed_point(point) for point in points])
            np.testing.assert_array_equal(embed_points(points), expected)
        np.testing.assert_allclose(embedding_matrix(spd[0]), spd_matrix_log(spd[0]))
