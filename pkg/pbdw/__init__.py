"""
PBDW state estimation.
"""

from .system import (
    PBDWSystem, Estimate,
    assemble_system, stability_constant, solve_saddle, assemble_estimate, estimate,
)

__all__ = [
    'PBDWSystem', 'Estimate',
    'assemble_system', 'stability_constant', 'solve_saddle', 'assemble_estimate', 'estimate',
]
