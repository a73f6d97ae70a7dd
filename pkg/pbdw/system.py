"""
Limited-observations PBDW saddle-point system

    [ A   B ] [eta]   [obs]
    [ B^T 0 ] [ z ] = [ 0 ]

with A_mm' = (q_m', q_m)_G and B_mn = (zeta_n, q_m)_G.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from utils.exceptions import DimensionMismatch, SingularKKT, StabilityViolation

logger = logging.getLogger(__name__)

STABILITY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class PBDWSystem:
    """
    Assembled and factorized PBDW system.

    Attributes:
        A: (M, M) representer Gram matrix
        B: (M, N) cross Gram matrix
        kkt_lu: LU factorization (with partial pivoting) of the block matrix
        beta: Stability constant beta_{N,M}
    """

    A: np.ndarray
    B: np.ndarray
    kkt_lu: tuple
    beta: float

    @property
    def M(self):
        return self.A.shape[0]

    @property
    def N(self):
        return self.B.shape[1]

    def kkt_matrix(self):
        M, N = self.M, self.N
        kkt = np.zeros((M + N, M + N))
        kkt[:M, :M] = self.A
        kkt[:M, M:] = self.B
        kkt[M:, :M] = self.B.T
        return kkt


@dataclass(frozen=True, eq=False)
class Estimate:
    """
    State estimate u = Z_N z + U_M eta.

    Attributes:
        z_coeffs: (N,) background coefficients
        eta_coeffs: (M,) update coefficients
        field: Assembled nodal field (None until assembled)
    """

    z_coeffs: np.ndarray
    eta_coeffs: np.ndarray
    field: np.ndarray = None


def _beta(A, B):
    """Smallest singular value of L^{-1} B where A = L L^T."""
    try:
        L = sla.cholesky(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise StabilityViolation(f"representer Gram matrix is not SPD: {exc}") from exc
    whitened = sla.solve_triangular(L, B, lower=True)
    return float(sla.svdvals(whitened).min())


def stability_constant(system_or_A, B=None):
    """
    beta_{N,M} = inf_z sup_q (z, q) / (||z|| ||q||) for a G-orthonormal Z_N.

    Accepts either a PBDWSystem or the matrices (A, B).
    """
    if B is None:
        A, B = system_or_A.A, system_or_A.B
    else:
        A = system_or_A
    beta = _beta(np.asarray(A, dtype=float), np.asarray(B, dtype=float))
    if beta <= STABILITY_TOLERANCE:
        raise StabilityViolation(
            f"stability constant {beta:.3e} vanishes: Z_N meets the orthogonal "
            f"complement of U_M (not enough sensors)"
        )
    return min(beta, 1.0)


def assemble_system(space_Z, space_U, G):
    """
    Fill A and B by G inner products, factorize the KKT matrix, compute beta.

    Args:
        space_Z: BackgroundSpace (G-orthonormal basis)
        space_U: ObservableSpace
        G: H1 Gram matrix

    Returns:
        PBDWSystem
    """
    Z = space_Z.basis
    Q = space_U.representers
    N, M = Z.shape[1], Q.shape[1]
    if N > M:
        raise StabilityViolation(f"N={N} background modes exceed M={M} sensors")
    if N > 0.8 * M:
        logger.warning("N=%d is close to M=%d; expect a small stability constant", N, M)

    A = space_U.gram_A
    B = Q.T @ (G @ Z)
    beta = stability_constant(A, B)

    system = PBDWSystem(A=A, B=B, kkt_lu=None, beta=beta)
    lu = sla.lu_factor(system.kkt_matrix(), check_finite=True)
    if np.any(np.abs(np.diag(lu[0])) == 0):
        raise SingularKKT("KKT matrix is singular")
    logger.info("PBDW system assembled: N=%d, M=%d, beta=%.6f", N, M, beta)
    return PBDWSystem(A=A, B=B, kkt_lu=lu, beta=beta)


def solve_saddle(system, obs):
    """
    Solve the saddle-point system with right-hand side (obs, 0).

    Returns:
        Estimate with eta and z coefficients (field not assembled)
    """
    obs = np.asarray(obs, dtype=float)
    if obs.shape != (system.M,):
        raise DimensionMismatch(f"expected {system.M} observations, got {obs.shape}")
    rhs = np.concatenate([obs, np.zeros(system.N)])
    solution = sla.lu_solve(system.kkt_lu, rhs)
    if not np.all(np.isfinite(solution)):
        raise SingularKKT("KKT solve produced non-finite values")
    return Estimate(z_coeffs=solution[system.M:], eta_coeffs=solution[:system.M])


def assemble_estimate(z_coeffs, eta_coeffs, space_Z, space_U):
    """Nodal field Z_N z + U_M eta."""
    z_coeffs = np.asarray(z_coeffs, dtype=float)
    eta_coeffs = np.asarray(eta_coeffs, dtype=float)
    if z_coeffs.shape != (space_Z.size,) or eta_coeffs.shape != (space_U.size,):
        raise DimensionMismatch(
            f"coefficients {z_coeffs.shape}/{eta_coeffs.shape} do not match "
            f"N={space_Z.size}, M={space_U.size}"
        )
    return space_Z.basis @ z_coeffs + space_U.representers @ eta_coeffs


def estimate(system, obs, space_Z, space_U):
    """Solve and assemble in one call."""
    result = solve_saddle(system, obs)
    field = assemble_estimate(result.z_coeffs, result.eta_coeffs, space_Z, space_U)
    return Estimate(result.z_coeffs, result.eta_coeffs, field)
