"""Tests for the plate mesh."""

import numpy as np
import pytest

from fem import build_mesh


class TestBuildMesh:
    def test_counts(self):
        mesh = build_mesh(4, 3)
        assert mesh.node_count == 20
        assert mesh.triangle_count == 24
        assert mesh.boundary_edges.shape == (14, 2)
        assert len(mesh.boundary_sides) == 14

    def test_areas_tile_the_plate(self):
        mesh = build_mesh(5, 7)
        areas = mesh.triangle_areas()
        assert np.all(areas > 0)
        assert areas.sum() == pytest.approx(16.0)

    def test_boundary_length_is_perimeter(self):
        mesh = build_mesh(6, 6)
        ends = mesh.nodes[mesh.boundary_edges]
        assert np.linalg.norm(ends[:, 1] - ends[:, 0], axis=1).sum() == pytest.approx(16.0)

    def test_corner_coordinates(self):
        mesh = build_mesh(4, 4)
        np.testing.assert_allclose(mesh.nodes[0], [-2.0, -2.0])
        np.testing.assert_allclose(mesh.nodes[-1], [2.0, 2.0])
        assert mesh.hx == pytest.approx(1.0)

    def test_arrays_are_read_only(self):
        mesh = build_mesh(2, 2)
        with pytest.raises(ValueError):
            mesh.nodes[0, 0] = 1.0

    def test_rejects_empty_mesh(self):
        with pytest.raises(ValueError):
            build_mesh(0, 3)


class TestEvaluate:
    def test_linear_fields_are_reproduced(self, rng):
        mesh = build_mesh(5, 4)
        values = 3.0 * mesh.nodes[:, 0] - 2.0 * mesh.nodes[:, 1] + 1.0
        points = rng.uniform(-2.0, 2.0, (50, 2))
        expected = 3.0 * points[:, 0] - 2.0 * points[:, 1] + 1.0
        np.testing.assert_allclose(mesh.evaluate(values, points), expected, atol=1e-12)

    def test_barycentric_weights_sum_to_one(self, rng):
        mesh = build_mesh(3, 3)
        _, weights = mesh.locate(rng.uniform(-2.0, 2.0, (20, 2)))
        np.testing.assert_allclose(weights.sum(axis=1), 1.0)
        assert np.all(weights >= -1e-12)
