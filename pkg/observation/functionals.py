"""
Patch-average observation functionals, their Riesz representers in the H1
inner product, and observation series.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.sparse.linalg as spla

from utils.exceptions import DimensionMismatch, FormatError, SingularGram

logger = logging.getLogger(__name__)


def load_vector(patch):
    """
    Values l(phi_i) of the patch average on every P1 basis function.

    The average of a P1 field over each triangle/patch intersection equals
    its value at the intersection centroid, so the result is exact.
    """
    mesh = patch.mesh
    nodes = mesh.triangles[patch.triangles]
    contributions = patch.shape_weights * patch.overlap_areas[:, None] / patch.area
    return np.bincount(nodes.ravel(), weights=contributions.ravel(), minlength=mesh.node_count)


def observe(field, patch):
    """Exact patch average (1/|R|) int_R u of a P1 field."""
    field = np.asarray(field, dtype=float)
    if field.shape[0] != patch.mesh.node_count:
        raise DimensionMismatch("field and patch live on different meshes")
    nodes = patch.mesh.triangles[patch.triangles]
    values = np.einsum("ij,ij->i", patch.shape_weights, field[nodes])
    return float(values @ patch.overlap_areas / patch.area)


class GramSolver:
    """Sparse LU factorization of the Gram matrix, computed once and reused."""

    def __init__(self, G):
        try:
            self._lu = spla.splu(G.tocsc())
        except RuntimeError as exc:
            raise SingularGram(f"Gram matrix factorization failed: {exc}") from exc

    def solve(self, rhs):
        solution = self._lu.solve(np.asarray(rhs, dtype=float))
        if not np.all(np.isfinite(solution)):
            raise SingularGram("Gram solve produced non-finite values")
        return solution


def riesz_representer(patch, G, mesh, solver=None):
    """
    Riesz representer q of the patch average: G q = b, b_i = l(phi_i).

    Args:
        patch: Sensor patch
        G: H1 Gram matrix
        mesh: Mesh of G (must be the patch's mesh)
        solver: Optional prebuilt GramSolver to reuse a factorization

    Returns:
        Nodal vector q with (q, v)_G = l(v) for all FE fields v
    """
    if patch.mesh.node_count != mesh.node_count:
        raise DimensionMismatch("patch was built on a different mesh")
    solver = solver or GramSolver(G)
    return solver.solve(load_vector(patch))


@dataclass(frozen=True, eq=False)
class ObservableSpace:
    """
    U_M = span{q_1, ..., q_M}.

    Attributes:
        patches: The M sensor patches
        loads: (M, n_nodes) rows l_m(phi_i)
        representers: (n_nodes, M) Riesz representers as columns
        gram_A: (M, M) matrix (q_m', q_m)_G
    """

    patches: tuple
    loads: np.ndarray
    representers: np.ndarray
    gram_A: np.ndarray

    @property
    def size(self):
        return len(self.patches)

    def observe(self, field):
        """Observation vector (l_1(u), ..., l_M(u))."""
        return self.loads @ np.asarray(field, dtype=float)

    def observe_fields(self, fields):
        """Observations of each row of a (records, n_nodes) array."""
        return np.asarray(fields, dtype=float) @ self.loads.T

    def riesz_observe(self, field, G):
        """Observations computed as (u, q_m)_G."""
        return self.representers.T @ (G @ np.asarray(field, dtype=float))

    def subset(self, indices):
        """Observable space of a subset of the sensors (no re-solve needed)."""
        indices = list(indices)
        return ObservableSpace(
            patches=tuple(self.patches[i] for i in indices),
            loads=self.loads[indices],
            representers=self.representers[:, indices],
            gram_A=self.gram_A[np.ix_(indices, indices)],
        )


def build_observable_space(patches, G, mesh):
    """Representers of all patches from a single factorization of G."""
    solver = GramSolver(G)
    loads = np.vstack([load_vector(p) for p in patches])
    representers = solver.solve(loads.T)
    representers = representers.reshape(mesh.node_count, len(patches))
    gram = representers.T @ (G @ representers)
    gram = 0.5 * (gram + gram.T)
    logger.info("observable space: M=%d representers, cond(A)=%.3e",
                len(patches), np.linalg.cond(gram))
    return ObservableSpace(tuple(patches), loads, representers, gram)


@dataclass(frozen=True, eq=False)
class ObservationSeries:
    """
    Observation vectors over time.

    Attributes:
        values: (n_rows, M) array; row i holds time index first_index + i
        times: (n_rows,) times (s)
        first_index: Time index of row 0
    """

    values: np.ndarray
    times: np.ndarray
    first_index: int = 0

    @property
    def sensor_count(self):
        return self.values.shape[1]

    def row(self, k):
        return self.values[k - self.first_index]

    def head(self, rows):
        """Series restricted to its first ``rows`` rows."""
        return ObservationSeries(self.values[:rows], self.times[:rows], self.first_index)

    def to_frame(self):
        df = pd.DataFrame(self.values, columns=[f"l_{m + 1}" for m in range(self.sensor_count)])
        df.insert(0, 't', self.times)
        df.insert(0, 'k', np.arange(self.first_index, self.first_index + len(self.times)))
        return df

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path):
        df = pd.read_csv(path)
        if 'k' not in df.columns or 't' not in df.columns:
            raise FormatError(f"{path}: observation CSV needs k and t columns")
        sensor_columns = [c for c in df.columns if c.startswith('l_')]
        if not sensor_columns:
            raise FormatError(f"{path}: no observation columns")
        sensor_columns.sort(key=lambda c: int(c[2:]))
        return cls(
            values=df[sensor_columns].to_numpy(dtype=float),
            times=df['t'].to_numpy(dtype=float),
            first_index=int(df['k'].iloc[0]),
        )


def observe_trajectory(trajectory, space):
    """Observation series of every snapshot of a trajectory."""
    values = space.observe_fields(trajectory.fields)
    return ObservationSeries(values, np.asarray(trajectory.times), trajectory.first_index)
