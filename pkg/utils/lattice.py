"""
Node lattice utilities for structured plate meshes.
"""

import networkx as nx
from networkx.generators.lattice import grid_2d_graph


def create_node_lattice(cells_x, cells_y):
    """
    Create the node graph of a structured triangulation using NetworkX.

    Nodes are lattice pairs (i, j) carrying their global node ``index``
    (row-major, i fastest). Axis edges come from the 2D grid graph; each
    cell also gets the (i, j)-(i+1, j+1) diagonal that splits it into two
    triangles.

    Args:
        cells_x: Number of cells along x
        cells_y: Number of cells along y

    Returns:
        NetworkX graph of the mesh nodes and element edges
    """
    G = grid_2d_graph(cells_x + 1, cells_y + 1)
    for i in range(cells_x):
        for j in range(cells_y):
            G.add_edge((i, j), (i + 1, j + 1), diagonal=True)
    for (i, j) in G.nodes:
        G.nodes[(i, j)]["index"] = j * (cells_x + 1) + i
    return G


def boundary_sides(node, cells_x, cells_y):
    """Names of the plate sides a lattice node lies on."""
    i, j = node
    sides = set()
    if j == 0:
        sides.add("bottom")
    if i == cells_x:
        sides.add("right")
    if j == cells_y:
        sides.add("top")
    if i == 0:
        sides.add("left")
    return sides


def get_boundary_edges(lattice, cells_x, cells_y):
    """
    Collect lattice edges that lie on the outer boundary.

    Args:
        lattice: Graph from ``create_node_lattice``
        cells_x: Number of cells along x
        cells_y: Number of cells along y

    Returns:
        List of (index_a, index_b, side) with the pair ordered so that the
        domain lies on the left when walking from a to b
    """
    edges = []
    for a, b in lattice.edges():
        if lattice.edges[a, b].get("diagonal"):
            continue
        shared = boundary_sides(a, cells_x, cells_y) & boundary_sides(b, cells_x, cells_y)
        for side in sorted(shared):
            # Counter-clockwise walk around the square
            if side in ("bottom", "right"):
                start, end = (a, b) if a < b else (b, a)
            else:
                start, end = (b, a) if a < b else (a, b)
            edges.append((lattice.nodes[start]["index"], lattice.nodes[end]["index"], side))
    edges.sort(key=lambda e: (e[2], min(e[0], e[1])))
    return edges
