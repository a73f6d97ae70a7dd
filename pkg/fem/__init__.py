"""
Finite element discretization of the heat plate.
"""

from .mesh import Mesh, build_mesh
from .materials import DiffusivityField, RadiationBC, uniform_diffusivity, bimaterial_diffusivity
from .assembly import assemble_mass, assemble_stiffness, h1_gram
from .timestepping import TimeGrid, Trajectory, HeatProblem, step_implicit_euler, solve_trajectory

__all__ = [
    'Mesh', 'build_mesh',
    'DiffusivityField', 'RadiationBC', 'uniform_diffusivity', 'bimaterial_diffusivity',
    'assemble_mass', 'assemble_stiffness', 'h1_gram',
    'TimeGrid', 'Trajectory', 'HeatProblem', 'step_implicit_euler', 'solve_trajectory',
]
