"""Tests for the POD background space and G-orthogonal projections."""

import numpy as np
import pytest

from reduction import g_norm, pod, project, projection_error
from reduction.pod import g_orthonormal_factor
from utils.exceptions import RankDeficient, SingularProjectionGram


@pytest.fixture
def snapshots(mesh, rng):
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    modes = np.vstack([np.ones_like(x), x, y * x, np.cos(x + y)])
    amplitudes = rng.standard_normal((8, 4)) * np.array([10.0, 1.0, 0.1, 0.01])
    return amplitudes @ modes + 1e-4 * rng.standard_normal((8, mesh.node_count))


def graded_snapshots(mesh, gram, rng, singular):
    """Snapshots Q diag(singular) V^T with G-orthonormal Q and orthonormal V."""
    Q, _ = g_orthonormal_factor(rng.standard_normal((mesh.node_count, len(singular))), gram)
    V, _ = np.linalg.qr(rng.standard_normal((10, len(singular))))
    return ((Q * np.asarray(singular)) @ V.T).T


class TestOrthonormalFactor:
    def test_factor_reproduces_snapshots(self, snapshots, gram):
        W, R = g_orthonormal_factor(snapshots.T, gram)
        np.testing.assert_allclose(W.T @ (gram @ W), np.eye(W.shape[1]), atol=1e-12)
        np.testing.assert_allclose(W @ R, snapshots.T, atol=1e-10)

    def test_dependent_columns_are_dropped(self, mesh, gram):
        field = 300.0 + mesh.nodes[:, 0]
        W, R = g_orthonormal_factor(np.column_stack([field, 2 * field, -field]), gram)
        assert W.shape[1] == 1
        assert R.shape == (1, 3)


class TestPOD:
    def test_basis_is_g_orthonormal(self, snapshots, gram):
        space = pod(snapshots, gram, 3)
        Z = space.basis
        np.testing.assert_allclose(Z.T @ (gram @ Z), np.eye(3), atol=1e-10)
        assert np.all(np.diff(space.eigenvalues) <= 0)

    def test_eigenvalues_match_the_snapshot_correlation(self, snapshots, gram):
        correlation = snapshots @ (gram @ snapshots.T)
        expected = np.sort(np.linalg.eigvalsh(0.5 * (correlation + correlation.T)))[::-1]
        space = pod(snapshots, gram, 3)
        np.testing.assert_allclose(space.eigenvalues, expected[:3], rtol=1e-8)

    def test_discarded_energy_equals_projection_error(self, snapshots, gram):
        space = pod(snapshots, gram, 2)
        energy = sum(projection_error(u, space.basis, gram) ** 2 for u in snapshots)
        assert energy == pytest.approx(space.discarded_energy, rel=1e-8)
        assert space.discarded_energy == pytest.approx(space.discarded_eigenvalues.sum(), rel=1e-12)

    def test_spectrum_accounts_for_all_energy(self, snapshots, gram):
        space = pod(snapshots, gram, 3)
        total = sum(g_norm(u, gram) ** 2 for u in snapshots)
        assert space.eigenvalues.sum() + space.discarded_energy == pytest.approx(total, rel=1e-8)
        assert len(space.discarded_eigenvalues) == len(snapshots) - 3

    def test_known_spectrum(self, mesh, gram, rng):
        singular = [3.0, 2.0, 1.0, 0.5]
        space = pod(graded_snapshots(mesh, gram, rng, singular), gram, 2)
        np.testing.assert_allclose(space.eigenvalues, [9.0, 4.0], rtol=1e-10)
        np.testing.assert_allclose(space.discarded_eigenvalues[:2], [1.0, 0.25], rtol=1e-10)
        np.testing.assert_allclose(space.discarded_eigenvalues[2:], 0.0, atol=1e-20)

    def test_graded_spectrum_keeps_small_modes(self, mesh, gram, rng):
        # eigenvalue ratio 1e-16, beyond what the correlation eigenproblem resolves
        singular = [1e4, 1e2, 1.0, 1e-4]
        space = pod(graded_snapshots(mesh, gram, rng, singular), gram, 4)
        np.testing.assert_allclose(space.eigenvalues, np.square(singular), rtol=1e-6)

    def test_modes_are_nested(self, snapshots, gram):
        small = pod(snapshots, gram, 2).basis
        large = pod(snapshots, gram, 4).basis
        np.testing.assert_allclose(small, large[:, :2], atol=1e-10)

    def test_background_error_does_not_grow_with_n(self, snapshots, gram):
        field = snapshots[3] + 0.5 * snapshots[5]
        errors = [projection_error(field, pod(snapshots, gram, N).basis, gram) for N in range(1, 6)]
        assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))

    def test_eigenvalue_frame(self, snapshots, gram):
        frame = pod(snapshots, gram, 2).eigenvalue_frame()
        assert list(frame.columns) == ["mode", "eigenvalue", "retained"]
        assert frame["retained"].sum() == 2

    def test_too_many_modes(self, snapshots, gram):
        with pytest.raises(RankDeficient):
            pod(snapshots, gram, 9)

    def test_rank_deficient_snapshots(self, mesh, gram):
        field = 300.0 + mesh.nodes[:, 0]
        with pytest.raises(RankDeficient):
            pod(np.vstack([field, 2 * field, 3 * field]), gram, 2)

    def test_exact_rank_four_rejects_a_fifth_mode(self, mesh, gram, rng):
        x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
        modes = np.vstack([np.ones_like(x), x, y * x, np.cos(x + y)])
        with pytest.raises(RankDeficient):
            pod(rng.standard_normal((8, 4)) @ modes, gram, 5)


class TestProjection:
    def test_field_in_span_is_fixed(self, snapshots, gram):
        space = pod(snapshots, gram, 3)
        field = space.basis @ np.array([1.0, -2.0, 0.5])
        np.testing.assert_allclose(project(field, space.basis, gram), field, atol=1e-10)
        assert projection_error(field, space.basis, gram) < 1e-9

    def test_residual_is_g_orthogonal(self, snapshots, gram, rng):
        space = pod(snapshots, gram, 3)
        field = rng.standard_normal(gram.shape[0])
        residual = field - project(field, space.basis, gram)
        np.testing.assert_allclose(space.basis.T @ (gram @ residual), 0.0, atol=1e-10)

    def test_pythagoras(self, snapshots, gram, rng):
        space = pod(snapshots, gram, 3)
        field = rng.standard_normal(gram.shape[0])
        projected = project(field, space.basis, gram)
        total = g_norm(field, gram) ** 2
        parts = g_norm(projected, gram) ** 2 + projection_error(field, space.basis, gram) ** 2
        assert parts == pytest.approx(total, rel=1e-10)

    def test_non_orthonormal_basis(self, mesh, gram):
        basis = np.column_stack([np.ones(mesh.node_count), 1.0 + mesh.nodes[:, 0]])
        field = 3.0 - 2.0 * mesh.nodes[:, 0]
        np.testing.assert_allclose(project(field, basis, gram), field, atol=1e-10)

    def test_singular_basis(self, mesh, gram):
        basis = np.column_stack([np.ones(mesh.node_count), np.zeros(mesh.node_count)])
        with pytest.raises(SingularProjectionGram):
            project(np.ones(mesh.node_count), basis, gram)
