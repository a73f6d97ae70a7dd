"""
Utility functions for the SVDA pipeline.
"""

from .lattice import create_node_lattice, get_boundary_edges

__all__ = ['create_node_lattice', 'get_boundary_edges']
