"""
Per-step error quantities of the assimilation and the ErrorReport table.

For every time index the report holds the relative L2 and H1 errors of the
bk-only, PBDW-with-true-observations and SVDA estimates, the stability
constant, the checked SVDA bound and the background projection error.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.linalg as sla

from utils.exceptions import BoundViolated, ReportError

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-8

REPORT_COLUMNS = [
    'k', 't',
    'err_bk_L2', 'err_star_L2', 'err_svda_L2',
    'err_bk_H1', 'err_star_H1', 'err_svda_H1',
    'beta', 'bound_lhs', 'bound_rhs', 'eps_bk_N',
]
EXTRA_COLUMNS = [
    'bound_margin',
    'pbdw_bound_literal', 'pbdw_bound_complement',
    'svda_bound_literal', 'svda_bound_complement',
]
RELATIVE_ERROR_COLUMNS = [c for c in REPORT_COLUMNS if c.startswith('err_')]


@dataclass(frozen=True, eq=False)
class ReportContext:
    """
    Operators shared by every step of an error report.

    Attributes:
        G: H1 Gram matrix
        mass: L2 mass matrix
        basis: (n_nodes, N) G-orthonormal background modes
        loads: (M, n_nodes) observation rows
        gram_A: (M, M) representer Gram matrix
        representers: (n_nodes, M) Riesz representers
        beta: Stability constant of the PBDW system
        complement: (M, M-N) coefficients spanning U_M intersected with Z_N^perp
        complement_factor: Cholesky factor of the complement Gram matrix, or None
    """

    G: object
    mass: object
    basis: np.ndarray
    loads: np.ndarray
    gram_A: np.ndarray
    representers: np.ndarray
    beta: float
    complement: np.ndarray
    complement_factor: tuple

    @classmethod
    def from_artifacts(cls, artifacts):
        system = artifacts.system
        # q = Q c lies in Z_N^perp exactly when B^T c = 0
        complement = sla.null_space(system.B.T)
        factor = None
        if complement.shape[1] > 0:
            gram = complement.T @ system.A @ complement
            factor = sla.cho_factor(0.5 * (gram + gram.T))
        return cls(
            G=artifacts.G,
            mass=artifacts.mass,
            basis=artifacts.background.basis,
            loads=artifacts.observable.loads,
            gram_A=system.A,
            representers=artifacts.observable.representers,
            beta=system.beta,
            complement=complement,
            complement_factor=factor,
        )

    def norm(self, field, which="H1"):
        matrix = self.G if which == "H1" else self.mass
        field = np.asarray(field, dtype=float)
        return float(np.sqrt(max(field @ (matrix @ field), 0.0)))

    def background_coefficients(self, field):
        return self.basis.T @ (self.G @ field)

    def observable_distance(self, obs_a, obs_b):
        """||Q A^-1 (a - b)||_G = sqrt(d^T A^-1 d)."""
        d = np.asarray(obs_a, dtype=float) - np.asarray(obs_b, dtype=float)
        return float(np.sqrt(max(d @ sla.solve(self.gram_A, d, assume_a='pos'), 0.0)))

    def complement_distance(self, residual):
        """inf over q in U_M and Z_N^perp of ||residual - q||_G."""
        if self.complement_factor is None:
            return self.norm(residual)
        rhs = self.complement.T @ (self.loads @ residual)
        coefficients = sla.cho_solve(self.complement_factor, rhs)
        q = self.representers @ (self.complement @ coefficients)
        return self.norm(residual - q)


def _relative(error, reference, ctx, which):
    denominator = ctx.norm(reference, which)
    return ctx.norm(error, which) / denominator if denominator > 0 else ctx.norm(error, which)


def step_errors(k, t, u_true, u_bk, u_star, u_svda, ctx, obs_true=None, obs_predicted=None):
    """
    Error quantities of one time step.

    Args:
        k, t: Time index and time
        u_true, u_bk, u_star, u_svda: Nodal fields at step k
        ctx: ReportContext
        obs_true: True observations (defaults to the observations of u_true)
        obs_predicted: Predicted observations (defaults to those of u_svda,
            which the PBDW estimate interpolates)

    Returns:
        Dict keyed by REPORT_COLUMNS + EXTRA_COLUMNS

    Raises:
        BoundViolated: if ||u* - u_svda|| exceeds (1 + 2/beta) ||Pi_U u_true - u_DL||
    """
    obs_true = ctx.loads @ u_true if obs_true is None else obs_true
    obs_predicted = ctx.loads @ u_svda if obs_predicted is None else obs_predicted
    beta = ctx.beta

    bound_lhs = ctx.norm(u_star - u_svda)
    bound_rhs = (1.0 + 2.0 / beta) * ctx.observable_distance(obs_true, obs_predicted)
    allowed = bound_rhs * (1.0 + BOUND_SLACK) + BOUND_SLACK
    if not bound_lhs <= allowed:
        raise BoundViolated(
            f"||u* - u_svda|| = {bound_lhs:.6e} exceeds (1 + 2/beta) ||Pi_U u_true - u_DL|| "
            f"= {bound_rhs:.6e}", step=int(k),
        )

    z_coeffs = ctx.background_coefficients(u_true)
    in_background = ctx.basis @ z_coeffs
    orthogonal = u_true - in_background
    eps_bk = ctx.norm(orthogonal)
    literal = (1.0 + 1.0 / beta) * float(np.linalg.norm(z_coeffs))
    complement = (1.0 + 1.0 / beta) * ctx.complement_distance(orthogonal)

    row = {
        'k': int(k),
        't': float(t),
        'err_bk_L2': _relative(u_bk - u_true, u_true, ctx, "L2"),
        'err_star_L2': _relative(u_star - u_true, u_true, ctx, "L2"),
        'err_svda_L2': _relative(u_svda - u_true, u_true, ctx, "L2"),
        'err_bk_H1': _relative(u_bk - u_true, u_true, ctx, "H1"),
        'err_star_H1': _relative(u_star - u_true, u_true, ctx, "H1"),
        'err_svda_H1': _relative(u_svda - u_true, u_true, ctx, "H1"),
        'beta': beta,
        'bound_lhs': bound_lhs,
        'bound_rhs': bound_rhs,
        'eps_bk_N': eps_bk,
        'bound_margin': bound_rhs - bound_lhs,
        'pbdw_bound_literal': literal,
        'pbdw_bound_complement': complement,
        'svda_bound_literal': literal + bound_rhs,
        'svda_bound_complement': complement + bound_rhs,
    }
    logger.debug("step %d: bound margin %.3e (lhs %.3e, rhs %.3e)",
                 k, row['bound_margin'], bound_lhs, bound_rhs)
    return row


class ErrorReport:
    """
    Per-step error table backed by a pandas DataFrame.
    """

    def __init__(self, frame):
        missing = [c for c in REPORT_COLUMNS if c not in frame.columns]
        if missing:
            raise ReportError(f"error report lacks columns {missing}")
        if frame.empty:
            raise ReportError("error report has no rows")
        columns = REPORT_COLUMNS + [c for c in EXTRA_COLUMNS if c in frame.columns]
        self.frame = frame[columns].reset_index(drop=True)
        self.frame['k'] = self.frame['k'].astype(int)

    @classmethod
    def from_rows(cls, rows):
        return cls(pd.DataFrame(list(rows)))

    def __len__(self):
        return len(self.frame)

    @property
    def steps(self):
        return self.frame['k'].to_numpy()

    def column(self, name):
        return self.frame[name].to_numpy(dtype=float)

    def is_valid(self):
        """All quantities finite, and every one except the margin nonnegative."""
        values = self.frame.to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            return False
        signed = self.frame.drop(columns=['bound_margin'], errors='ignore')
        return bool(np.all(signed.to_numpy(dtype=float) >= 0))

    def get_summary_stats(self):
        """Time means of the relative errors over the assimilation window."""
        stats = {f"mean_{c}": float(self.frame[c].mean()) for c in RELATIVE_ERROR_COLUMNS}
        stats['beta'] = float(self.frame['beta'].iloc[0])
        stats['max_bound_lhs'] = float(self.frame['bound_lhs'].max())
        stats['first_step'] = int(self.frame['k'].iloc[0])
        stats['last_step'] = int(self.frame['k'].iloc[-1])
        return stats

    def to_csv(self, path):
        self.frame.to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path):
        try:
            frame = pd.read_csv(path)
        except FileNotFoundError as exc:
            raise ReportError(f"error CSV not found: {path}") from exc
        except pd.errors.EmptyDataError as exc:
            raise ReportError(f"error CSV is empty: {path}") from exc
        return cls(frame)


def error_report(svda_traj, true_traj, star_traj, bk_traj, artifacts, predicted=None):
    """
    Error report over the time indices of ``svda_traj``.

    Args:
        svda_traj, star_traj: Estimate trajectories (same indices)
        true_traj, bk_traj: Full trajectories covering those indices
        artifacts: OfflineArtifacts (operators and PBDW system)
        predicted: Optional (steps, M) predicted observations; recovered
            from the SVDA fields when omitted

    Raises:
        BoundViolated: tagged with the failing step
    """
    if len(svda_traj) != len(star_traj) or svda_traj.first_index != star_traj.first_index:
        raise ReportError("SVDA and PBDW estimate trajectories are not aligned")
    ctx = ReportContext.from_artifacts(artifacts)
    rows = []
    for i, k in enumerate(svda_traj.indices):
        rows.append(step_errors(
            k, svda_traj.times[i],
            true_traj.at(k), bk_traj.at(k), star_traj.at(k), svda_traj.at(k), ctx,
            obs_predicted=None if predicted is None else predicted[i],
        ))
    return ErrorReport.from_rows(rows)
