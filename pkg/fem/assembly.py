"""
Sparse P1 assembly: mass, stiffness, H1 Gram and the boundary radiation
term.
"""

import numpy as np
import scipy.sparse as sp

# 2-point Gauss rule on [0, 1]
_GAUSS_POINTS = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])
_GAUSS_WEIGHTS = np.array([0.5, 0.5])


def element_gradients(coords):
    """
    Gradient coefficients of the three P1 shape functions.

    Args:
        coords: (..., 3, 2) vertex coordinates

    Returns:
        Tuple (b, c, area) where grad(phi_i) = (b_i, c_i) / (2 area)
    """
    x = coords[..., 0]
    y = coords[..., 1]
    b = np.stack([y[..., 1] - y[..., 2], y[..., 2] - y[..., 0], y[..., 0] - y[..., 1]], axis=-1)
    c = np.stack([x[..., 2] - x[..., 1], x[..., 0] - x[..., 2], x[..., 1] - x[..., 0]], axis=-1)
    area = 0.5 * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0])
    return b, c, area


def element_mass(coords):
    """Exact 3x3 P1 mass matrix: area/6 on the diagonal, area/12 off it."""
    _, _, area = element_gradients(np.asarray(coords, dtype=float))
    return np.asarray(area / 12.0)[..., None, None] * (np.ones((3, 3)) + np.eye(3))


def element_stiffness(coords, d=1.0):
    """3x3 P1 stiffness matrix d * (b b^T + c c^T) / (4 area)."""
    b, c, area = element_gradients(np.asarray(coords, dtype=float))
    outer = b[..., :, None] * b[..., None, :] + c[..., :, None] * c[..., None, :]
    return np.asarray(np.asarray(d, dtype=float) / (4.0 * area))[..., None, None] * outer


def _scatter(mesh, local):
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.node_count
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble_mass(mesh):
    """Global mass matrix M_ij = int phi_i phi_j."""
    return _scatter(mesh, element_mass(mesh.nodes[mesh.triangles]))


def assemble_stiffness(mesh, diffusivity):
    """Global stiffness matrix K_ij = int D grad(phi_i) . grad(phi_j)."""
    if diffusivity.values.shape[0] != mesh.triangle_count:
        raise ValueError("diffusivity is defined on a different mesh")
    return _scatter(mesh, element_stiffness(mesh.nodes[mesh.triangles], diffusivity.values))


def h1_gram(mesh):
    """Full H1 inner product matrix G = mass + stiffness with unit weights."""
    local = element_mass(mesh.nodes[mesh.triangles]) + element_stiffness(mesh.nodes[mesh.triangles])
    return _scatter(mesh, local)


class BoundaryRadiation:
    """
    Residual and Jacobian of sigma*eps * int_{boundary} (u^4 - u_r^4) phi_i,
    integrated with 2-point Gauss on each boundary edge from the P1 trace.
    """

    def __init__(self, mesh, bc):
        self.mesh = mesh
        self.bc = bc
        self.edges = mesh.boundary_edges
        ends = mesh.nodes[self.edges]
        self.lengths = np.linalg.norm(ends[:, 1] - ends[:, 0], axis=1)
        # shape values at the Gauss points, (2 points, 2 edge nodes)
        self.shape = np.column_stack([1.0 - _GAUSS_POINTS, _GAUSS_POINTS])
        rows = np.repeat(self.edges, 2, axis=1).ravel()
        cols = np.tile(self.edges, (1, 2)).ravel()
        self._pattern = (rows, cols)

    def _trace(self, u):
        return np.asarray(u)[self.edges] @ self.shape.T

    def residual(self, u):
        """Vector r_i(u) of length n_nodes."""
        trace = self._trace(u)
        flux = self.bc.coefficient * (trace ** 4 - self.bc.u_r ** 4)
        local = (flux * _GAUSS_WEIGHTS * self.lengths[:, None]) @ self.shape
        return np.bincount(self.edges.ravel(), weights=local.ravel(), minlength=self.mesh.node_count)

    def jacobian(self, u):
        """Sparse matrix dr_i/du_j = sigma*eps * int 4 u^3 phi_j phi_i."""
        trace = self._trace(u)
        slope = 4.0 * self.bc.coefficient * trace ** 3 * _GAUSS_WEIGHTS * self.lengths[:, None]
        local = np.einsum("eq,qa,qb->eab", slope, self.shape, self.shape)
        n = self.mesh.node_count
        return sp.coo_matrix((local.ravel(), self._pattern), shape=(n, n)).tocsr()
