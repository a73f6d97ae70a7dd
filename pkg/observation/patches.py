"""
Square sensor patches R_m and their exact overlap with mesh triangles.
"""

from dataclasses import dataclass

import numpy as np

from fem.mesh import HALF_SIDE
from utils.exceptions import PatchOutsideDomain

DEFAULT_HALFWIDTH = 0.05
DEFAULT_MARGIN = 0.2
_GEOMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Patch:
    """
    Axis-aligned square sensor footprint clipped against the mesh.

    Attributes:
        center: (x, y) of the patch center
        halfwidth: Half side length (m)
        triangles: Indices of triangles with nonzero overlap
        overlap_areas: Area of each triangle/patch intersection
        shape_weights: (n, 3) P1 shape values at each intersection centroid,
            ordered like the triangle's node triple
        mesh: Mesh the overlap was computed on
    """

    center: tuple
    halfwidth: float
    triangles: np.ndarray
    overlap_areas: np.ndarray
    shape_weights: np.ndarray
    mesh: object

    @property
    def area(self):
        return (2.0 * self.halfwidth) ** 2

    @property
    def bounds(self):
        cx, cy = self.center
        h = self.halfwidth
        return cx - h, cx + h, cy - h, cy + h

    def disjoint_from(self, other):
        ax0, ax1, ay0, ay1 = self.bounds
        bx0, bx1, by0, by1 = other.bounds
        return ax1 <= bx0 or bx1 <= ax0 or ay1 <= by0 or by1 <= ay0


def _clip(polygon, axis, value, keep_below):
    """Sutherland-Hodgman clip of a polygon against x_axis <= value (or >=)."""
    if not polygon:
        return polygon
    sign = 1.0 if keep_below else -1.0
    out = []
    for idx, current in enumerate(polygon):
        previous = polygon[idx - 1]
        cur_in = sign * (current[axis] - value) <= 0
        prev_in = sign * (previous[axis] - value) <= 0
        if cur_in != prev_in:
            t = (value - previous[axis]) / (current[axis] - previous[axis])
            out.append(previous + t * (current - previous))
        if cur_in:
            out.append(current)
    return out


def clip_triangle(vertices, xmin, xmax, ymin, ymax):
    """Intersection polygon of a triangle with a rectangle (list of points)."""
    polygon = [np.asarray(v, dtype=float) for v in vertices]
    polygon = _clip(polygon, 0, xmin, keep_below=False)
    polygon = _clip(polygon, 0, xmax, keep_below=True)
    polygon = _clip(polygon, 1, ymin, keep_below=False)
    polygon = _clip(polygon, 1, ymax, keep_below=True)
    return polygon


def polygon_area_centroid(polygon):
    """Shoelace area and centroid of a simple polygon."""
    if len(polygon) < 3:
        return 0.0, np.zeros(2)
    p = np.asarray(polygon)
    q = np.roll(p, -1, axis=0)
    cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    area = 0.5 * cross.sum()
    if abs(area) < _GEOMETRY_TOL ** 2:
        return 0.0, p.mean(axis=0)
    centroid = ((p + q) * cross[:, None]).sum(axis=0) / (6.0 * area)
    return abs(area), centroid


def barycentric(vertices, point):
    """Barycentric coordinates of a point with respect to a triangle."""
    a, b, c = np.asarray(vertices, dtype=float)
    T = np.column_stack([b - a, c - a])
    l1, l2 = np.linalg.solve(T, np.asarray(point, dtype=float) - a)
    return np.array([1.0 - l1 - l2, l1, l2])


def make_patch(center, halfwidth, mesh):
    """
    Build one patch and its exact triangle overlaps.

    Raises:
        PatchOutsideDomain: if the square is not contained in the plate
    """
    if halfwidth <= 0:
        raise PatchOutsideDomain(f"patch halfwidth must be positive, got {halfwidth}")
    cx, cy = float(center[0]), float(center[1])
    xmin, xmax, ymin, ymax = cx - halfwidth, cx + halfwidth, cy - halfwidth, cy + halfwidth
    if min(xmin, ymin) < -HALF_SIDE - _GEOMETRY_TOL or max(xmax, ymax) > HALF_SIDE + _GEOMETRY_TOL:
        raise PatchOutsideDomain(f"patch centered at ({cx}, {cy}) leaves the plate")

    i0 = max(int(np.floor((xmin + HALF_SIDE) / mesh.hx)), 0)
    i1 = min(int(np.ceil((xmax + HALF_SIDE) / mesh.hx)), mesh.nx)
    j0 = max(int(np.floor((ymin + HALF_SIDE) / mesh.hy)), 0)
    j1 = min(int(np.ceil((ymax + HALF_SIDE) / mesh.hy)), mesh.ny)

    triangles, areas, weights = [], [], []
    for j in range(j0, j1):
        for i in range(i0, i1):
            cell = j * mesh.nx + i
            for tri in (2 * cell, 2 * cell + 1):
                vertices = mesh.nodes[mesh.triangles[tri]]
                area, centroid = polygon_area_centroid(clip_triangle(vertices, xmin, xmax, ymin, ymax))
                if area <= 0.0:
                    continue
                triangles.append(tri)
                areas.append(area)
                weights.append(barycentric(vertices, centroid))

    return Patch(
        center=(cx, cy),
        halfwidth=float(halfwidth),
        triangles=np.asarray(triangles, dtype=np.int64),
        overlap_areas=np.asarray(areas),
        shape_weights=np.asarray(weights).reshape(-1, 3),
        mesh=mesh,
    )


def build_patch_grid(side_count, halfwidth, mesh, margin=DEFAULT_MARGIN):
    """
    Uniform side_count x side_count lattice of patches with centers spanning
    [-2 + margin, 2 - margin]^2 (a single patch sits at the origin).

    Args:
        side_count: Patches per axis (M = side_count^2)
        halfwidth: Patch half side (m)
        mesh: Mesh to clip against
        margin: Distance from the plate edge to the outermost centers

    Returns:
        List of Patch, x varying fastest
    """
    if side_count < 1:
        raise PatchOutsideDomain(f"side_count must be positive, got {side_count}")
    if side_count == 1:
        coords = np.array([0.0])
    else:
        coords = np.linspace(-HALF_SIDE + margin, HALF_SIDE - margin, side_count)
    return [make_patch((x, y), halfwidth, mesh) for y in coords for x in coords]
