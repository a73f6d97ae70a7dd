"""
Proper orthogonal decomposition in the H1 inner product and G-orthogonal
projections.

The snapshot correlation S^T G S squares the condition number of the snapshot
set, so its eigenvalues below eps x largest are lost to roundoff. POD here
G-orthonormalizes the snapshots first (S = W R) and reads the spectrum off the
singular values of the small factor R.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.linalg as sla

from utils.exceptions import RankDeficient, SingularProjectionGram

logger = logging.getLogger(__name__)

# relative to the largest singular value of the snapshot set
RANK_TOLERANCE = 1e-14
# snapshot residuals below this fraction of the snapshot norm are roundoff
DROP_TOLERANCE = 1e-13


@dataclass(frozen=True, eq=False)
class BackgroundSpace:
    """
    Z_N spanned by G-orthonormal POD modes.

    Attributes:
        basis: (n_nodes, N) modes zeta_n as columns
        eigenvalues: (N,) retained POD eigenvalues, descending
        discarded_energy: Sum of the discarded eigenvalues
        discarded_eigenvalues: The discarded eigenvalues, descending
    """

    basis: np.ndarray
    eigenvalues: np.ndarray
    discarded_energy: float
    discarded_eigenvalues: np.ndarray

    @property
    def size(self):
        return self.basis.shape[1]

    def eigenvalue_frame(self):
        values = np.concatenate([self.eigenvalues, self.discarded_eigenvalues])
        return pd.DataFrame({
            'mode': np.arange(1, values.shape[0] + 1),
            'eigenvalue': values,
            'retained': np.arange(values.shape[0]) < self.size,
        })


def g_orthonormal_factor(S, G):
    """
    Classical Gram-Schmidt, applied twice per column, in the G inner product.

    Args:
        S: (n_nodes, count) snapshot columns
        G: H1 Gram matrix

    Returns:
        (W, R) with W^T G W = I and S = W R; columns whose residual is at
        roundoff level add no row to R
    """
    count = S.shape[1]
    W = np.zeros((S.shape[0], 0))
    R = np.zeros((0, count))
    for j in range(count):
        v = S[:, j].copy()
        norm0 = np.sqrt(max(v @ (G @ v), 0.0))
        coefficients = np.zeros(W.shape[1])
        for _ in range(2):
            h = W.T @ (G @ v)
            v -= W @ h
            coefficients += h
        R[:coefficients.shape[0], j] = coefficients
        norm = np.sqrt(max(v @ (G @ v), 0.0))
        if norm0 == 0.0 or norm <= DROP_TOLERANCE * norm0:
            continue
        W = np.column_stack([W, v / norm])
        R = np.vstack([R, np.zeros(count)])
        R[-1, j] = norm
    return W, R


def _fix_signs(basis):
    for n in range(basis.shape[1]):
        column = basis[:, n]
        scale = np.max(np.abs(column))
        first = np.flatnonzero(np.abs(column) > 1e-12 * scale)[0]
        if column[first] < 0:
            basis[:, n] = -column
    return basis


def pod(snapshots, G, N):
    """
    Method of snapshots: eigenpairs of S_ij = (u_i, u_j)_G.

    With S = W R the correlation is R^T R, so its eigenvalues are the squared
    singular values of R and the modes are W times the left singular vectors.

    Args:
        snapshots: (n_snapshots, n_nodes) array or sequence of nodal fields
        G: H1 Gram matrix
        N: Number of modes to keep

    Returns:
        BackgroundSpace with N G-orthonormal modes

    Raises:
        RankDeficient: if the N-th singular value is at most RANK_TOLERANCE
            times the largest
    """
    S = np.atleast_2d(np.asarray(snapshots, dtype=float)).T
    count = S.shape[1]
    if not 1 <= N <= count:
        raise RankDeficient(f"cannot extract {N} modes from {count} snapshots")
    W, R = g_orthonormal_factor(S, G)
    if R.shape[0] < N:
        raise RankDeficient(f"snapshots span {R.shape[0]} directions, {N} modes requested")
    U, singular, _ = np.linalg.svd(R, full_matrices=False)
    if singular[N - 1] <= RANK_TOLERANCE * singular[0]:
        raise RankDeficient(
            f"POD singular value {N} is {singular[N - 1]:.3e}, below "
            f"{RANK_TOLERANCE:g} x {singular[0]:.3e}"
        )

    basis = _fix_signs(W @ U[:, :N])
    eigenvalues = singular ** 2
    tail = np.zeros(count - N)
    tail[:eigenvalues.shape[0] - N] = eigenvalues[N:]

    logger.info("POD: kept %d of %d modes, eigenvalues %s, discarded energy %.3e",
                N, count, np.array2string(eigenvalues[:N], precision=3), tail.sum())
    return BackgroundSpace(basis, eigenvalues[:N].copy(), float(tail.sum()), tail)


def project(field, basis, G):
    """
    G-orthogonal projection of a field onto span(basis).

    Solves the normal system (B^T G B) c = B^T G f, so the basis need not be
    orthonormal.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float).T).T
    field = np.asarray(field, dtype=float)
    GB = G @ basis
    normal = basis.T @ GB
    try:
        factor = sla.cho_factor(0.5 * (normal + normal.T))
    except np.linalg.LinAlgError as exc:
        raise SingularProjectionGram(f"projection Gram matrix is singular: {exc}") from exc
    coefficients = sla.cho_solve(factor, GB.T @ field)
    return basis @ coefficients


def g_norm(field, G):
    field = np.asarray(field, dtype=float)
    return float(np.sqrt(max(field @ (G @ field), 0.0)))


def projection_error(field, basis, G):
    """||f - Pi f||_G, the background error eps_bk^N when basis spans Z_N."""
    return g_norm(np.asarray(field, dtype=float) - project(field, basis, G), G)
