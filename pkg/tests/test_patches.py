"""Tests for sensor patches and patch averages."""

import numpy as np
import pytest

from observation import build_patch_grid, make_patch, observe
from observation.patches import clip_triangle, polygon_area_centroid
from utils.exceptions import DimensionMismatch, PatchOutsideDomain


class TestClipping:
    def test_triangle_inside_rectangle_is_unchanged(self):
        vertices = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        area, centroid = polygon_area_centroid(clip_triangle(vertices, -1, 2, -1, 2))
        assert area == pytest.approx(0.5)
        np.testing.assert_allclose(centroid, [1 / 3, 1 / 3])

    def test_disjoint_rectangle_gives_empty_overlap(self):
        vertices = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        area, _ = polygon_area_centroid(clip_triangle(vertices, 2, 3, 2, 3))
        assert area == 0.0


class TestMakePatch:
    @pytest.mark.parametrize("center", [(0.0, 0.0), (0.13, -0.71), (-1.5, 1.5)])
    def test_overlaps_cover_the_patch(self, mesh, center):
        patch = make_patch(center, 0.2, mesh)
        assert patch.overlap_areas.sum() == pytest.approx(patch.area, rel=1e-12)

    def test_outside_plate(self, mesh):
        with pytest.raises(PatchOutsideDomain):
            make_patch((1.95, 0.0), 0.1, mesh)

    def test_average_of_constant_and_linear_fields(self, mesh):
        patch = make_patch((0.37, -0.52), 0.05, mesh)
        assert observe(np.full(mesh.node_count, 300.0), patch) == pytest.approx(300.0)
        linear = 2.0 * mesh.nodes[:, 0] + mesh.nodes[:, 1]
        assert observe(linear, patch) == pytest.approx(2.0 * 0.37 - 0.52)

    def test_field_from_another_mesh(self, mesh):
        patch = make_patch((0.0, 0.0), 0.1, mesh)
        with pytest.raises(DimensionMismatch):
            observe(np.ones(4), patch)


class TestPatchGrid:
    def test_lattice_layout(self, mesh):
        patches = build_patch_grid(3, 0.2, mesh, margin=0.5)
        assert len(patches) == 9
        np.testing.assert_allclose(patches[0].center, (-1.5, -1.5))
        np.testing.assert_allclose(patches[1].center, (0.0, -1.5))
        np.testing.assert_allclose(patches[-1].center, (1.5, 1.5))

    def test_patches_are_disjoint(self, mesh):
        patches = build_patch_grid(11, 0.05, mesh)
        assert len(patches) == 121
        assert all(a.disjoint_from(b) for i, a in enumerate(patches) for b in patches[i + 1:])

    def test_single_patch_sits_at_origin(self, mesh):
        (patch,) = build_patch_grid(1, 0.3, mesh)
        assert patch.center == (0.0, 0.0)
