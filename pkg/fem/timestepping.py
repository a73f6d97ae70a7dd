"""
Backward-Euler time stepping of the nonlinear heat problem

    du/dt - div(D grad u) = 0,   -D du/dn = sigma*eps*(u^4 - u_r^4),

with an exact-Jacobian Newton solve per step.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from fem.assembly import BoundaryRadiation, assemble_mass, assemble_stiffness
from utils.exceptions import NonConvergence, NonPhysical, SolverError

logger = logging.getLogger(__name__)

MAX_NEWTON_ITERATIONS = 25
NEWTON_TOLERANCE = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    """
    Uniform time grid t^k = k * tau, k = 0..K.

    Attributes:
        T: Final time (s)
        K: Number of steps
        k_off: First index without real observations
    """

    T: float
    K: int
    k_off: int

    def __post_init__(self):
        if self.T <= 0 or self.K < 0:
            raise ValueError(f"invalid time grid T={self.T}, K={self.K}")
        if self.K >= 1 and not 1 <= self.k_off <= self.K:
            raise ValueError(f"k_off must lie in [1, {self.K}], got {self.k_off}")

    @property
    def tau(self):
        if self.K == 0:
            raise ValueError("a time grid with K=0 has no step size")
        return self.T / self.K

    @property
    def times(self):
        if self.K == 0:
            return np.zeros(1)
        return np.arange(self.K + 1) * self.tau

    def time(self, k):
        return k * self.tau


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Snapshots of nodal fields on one mesh.

    Attributes:
        mesh: Shared mesh
        fields: (n_snapshots, n_nodes) array, row i is time index first_index + i
        times: (n_snapshots,) times in seconds
        first_index: Time index of the first row
    """

    mesh: object
    fields: np.ndarray
    times: np.ndarray
    first_index: int = 0

    def __len__(self):
        return self.fields.shape[0]

    @property
    def indices(self):
        return np.arange(self.first_index, self.first_index + len(self))

    def at(self, k):
        """Snapshot at absolute time index k."""
        return self.fields[k - self.first_index]

    def subsample(self, stride):
        return Trajectory(self.mesh, self.fields[::stride], self.times[::stride], self.first_index)


@dataclass(eq=False)
class HeatProblem:
    """
    Assembled operators of one heat model (mesh, diffusivity, radiation BC),
    reused across the steps of a trajectory.
    """

    diffusivity: object
    bc: object
    max_iterations: int = MAX_NEWTON_ITERATIONS
    tolerance: float = NEWTON_TOLERANCE
    mass: object = field(init=False)
    stiffness: object = field(init=False)
    radiation: object = field(init=False)

    def __post_init__(self):
        self.mesh = self.diffusivity.mesh
        self.mass = assemble_mass(self.mesh)
        self.stiffness = assemble_stiffness(self.mesh, self.diffusivity)
        self.radiation = BoundaryRadiation(self.mesh, self.bc)
        self._operators = {}

    def _linear_part(self, tau):
        if tau not in self._operators:
            self._operators[tau] = (self.mass / tau + self.stiffness).tocsr()
        return self._operators[tau]

    def residual(self, u, u_prev, tau):
        return self.mass @ (u - u_prev) / tau + self.stiffness @ u + self.radiation.residual(u)

    def step(self, u_prev, tau):
        """
        One backward-Euler step.

        Returns:
            Tuple (new field, Newton iterations used)
        """
        u_prev = np.asarray(u_prev, dtype=float)
        if np.any(u_prev <= 0):
            raise NonPhysical("previous state has non-positive temperatures")
        linear = self._linear_part(tau)
        n = self.mesh.node_count
        threshold = self.tolerance * max(1.0, np.max(np.abs(u_prev)))

        u = u_prev.copy()
        for iteration in range(self.max_iterations + 1):
            res = self.residual(u, u_prev, tau)
            if np.linalg.norm(res) / n < threshold:
                return u, iteration
            if iteration == self.max_iterations:
                break
            jac = (linear + self.radiation.jacobian(u)).tocsc()
            u = u - spla.spsolve(jac, res)
            if not np.all(np.isfinite(u)) or np.any(u <= 0):
                raise NonPhysical(f"Newton iterate {iteration + 1} left the physical range")
        raise NonConvergence(
            f"Newton did not converge in {self.max_iterations} iterations "
            f"(residual {np.linalg.norm(res) / n:.3e})"
        )

    def solve(self, u0, grid):
        """March u0 over the time grid; see ``solve_trajectory``."""
        u0 = np.asarray(u0, dtype=float)
        if np.any(u0 <= 0):
            raise NonPhysical("initial condition must be strictly positive", step=0)
        fields = np.empty((grid.K + 1, u0.shape[0]))
        fields[0] = u0
        for k in range(1, grid.K + 1):
            try:
                fields[k], iterations = self.step(fields[k - 1], grid.tau)
            except SolverError as exc:
                exc.step = k
                raise
            logger.debug("step %d: %d Newton iterations", k, iterations)
        fields.setflags(write=False)
        return Trajectory(self.mesh, fields, grid.times)


def step_implicit_euler(u_prev, tau, diffusivity, bc):
    """
    Backward-Euler step M(u - u_prev)/tau + K u + r(u) = 0 solved by Newton.

    Args:
        u_prev: Previous nodal temperatures (K), strictly positive
        tau: Time step (s)
        diffusivity: DiffusivityField of the model
        bc: RadiationBC

    Returns:
        New nodal field
    """
    u, _ = HeatProblem(diffusivity, bc).step(u_prev, tau)
    return u


def solve_trajectory(u0, grid, diffusivity, bc):
    """
    Solve the heat problem from u0 over all K steps of ``grid``.

    Returns:
        Trajectory with K+1 snapshots, row 0 equal to u0
    """
    trajectory = HeatProblem(diffusivity, bc).solve(u0, grid)
    logger.info(
        "solved %s trajectory (mu=%g, K=%d): mean temperature %.6f K -> %.6f K",
        diffusivity.kind, diffusivity.mu, grid.K,
        trajectory.fields[0].mean(), trajectory.fields[-1].mean(),
    )
    return trajectory
