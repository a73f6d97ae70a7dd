"""
Sensor observations and the observable space U_M.
"""

from .patches import Patch, build_patch_grid, make_patch
from .functionals import (
    ObservableSpace, ObservationSeries, GramSolver,
    observe, riesz_representer, build_observable_space, observe_trajectory, load_vector,
)

__all__ = [
    'Patch', 'build_patch_grid', 'make_patch',
    'ObservableSpace', 'ObservationSeries', 'GramSolver',
    'observe', 'riesz_representer', 'build_observable_space', 'observe_trajectory', 'load_vector',
]
