"""
Uniform triangular mesh of the square plate (-2, 2)^2.
"""

from dataclasses import dataclass

import numpy as np

from utils.lattice import create_node_lattice, get_boundary_edges

HALF_SIDE = 2.0


def _frozen(array):
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    P1 triangulation of the plate.

    Attributes:
        nodes: (n_nodes, 2) coordinates in meters
        triangles: (n_triangles, 3) counter-clockwise node indices
        boundary_edges: (n_edges, 2) node index pairs on the outer boundary
        boundary_sides: side tag ("bottom", "right", "top", "left") per edge
        nx, ny: cells per axis
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_sides: tuple
    nx: int
    ny: int

    @property
    def node_count(self):
        return self.nodes.shape[0]

    @property
    def triangle_count(self):
        return self.triangles.shape[0]

    @property
    def hx(self):
        return 2.0 * HALF_SIDE / self.nx

    @property
    def hy(self):
        return 2.0 * HALF_SIDE / self.ny

    def triangle_areas(self):
        """Signed areas of all triangles (positive for valid meshes)."""
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def triangle_centroids(self):
        return self.nodes[self.triangles].mean(axis=1)

    def locate(self, points):
        """
        Find the containing triangle and barycentric coordinates of points.

        Args:
            points: (n, 2) array of coordinates inside the closed plate

        Returns:
            Tuple (triangle indices, (n, 3) barycentric weights ordered like
            the triangle's node triple)
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        gx = (points[:, 0] + HALF_SIDE) / self.hx
        gy = (points[:, 1] + HALF_SIDE) / self.hy
        i = np.clip(np.floor(gx).astype(int), 0, self.nx - 1)
        j = np.clip(np.floor(gy).astype(int), 0, self.ny - 1)
        s = gx - i
        t = gy - j
        lower = s >= t
        cell = j * self.nx + i
        tri = 2 * cell + np.where(lower, 0, 1)
        weights = np.where(
            lower[:, None],
            np.column_stack([1.0 - s, s - t, t]),
            np.column_stack([1.0 - t, s, t - s]),
        )
        return tri, weights

    def evaluate(self, values, points):
        """Evaluate the P1 interpolant of nodal ``values`` at points."""
        tri, weights = self.locate(points)
        return np.einsum("ij,ij->i", weights, np.asarray(values)[self.triangles[tri]])


def build_mesh(nx, ny):
    """
    Build the uniform grid of (-2, 2)^2 split along the (i, j)-(i+1, j+1)
    diagonal of every cell.

    Args:
        nx: Cells along x (>= 1)
        ny: Cells along y (>= 1)

    Returns:
        Mesh with (nx+1)(ny+1) nodes and 2 nx ny triangles
    """
    nx = int(nx)
    ny = int(ny)
    if nx < 1 or ny < 1:
        raise ValueError(f"mesh needs at least one cell per axis, got ({nx}, {ny})")

    lattice = create_node_lattice(nx, ny)
    nodes = np.empty((lattice.number_of_nodes(), 2))
    for (i, j), data in lattice.nodes(data=True):
        nodes[data["index"]] = (-HALF_SIDE + 2.0 * HALF_SIDE * i / nx,
                                -HALF_SIDE + 2.0 * HALF_SIDE * j / ny)

    triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
    for j in range(ny):
        for i in range(nx):
            n0 = lattice.nodes[(i, j)]["index"]
            n1 = lattice.nodes[(i + 1, j)]["index"]
            n2 = lattice.nodes[(i + 1, j + 1)]["index"]
            n3 = lattice.nodes[(i, j + 1)]["index"]
            cell = j * nx + i
            triangles[2 * cell] = (n0, n1, n2)
            triangles[2 * cell + 1] = (n0, n2, n3)

    boundary = get_boundary_edges(lattice, nx, ny)
    edges = np.array([(a, b) for a, b, _ in boundary], dtype=np.int64)
    sides = tuple(side for _, _, side in boundary)

    return Mesh(
        nodes=_frozen(nodes),
        triangles=_frozen(triangles),
        boundary_edges=_frozen(edges),
        boundary_sides=sides,
        nx=nx,
        ny=ny,
    )
