"""Synthetic reference networks and random network generators."""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import Delaunay

from .network import LinearNetwork, build_network

__all__ = [
    "single_edge",
    "unit_cycle",
    "grid_network",
    "load_fixture",
    "random_planar_network",
    "FIXTURES",
]


def single_edge(length: float = 1.0) -> LinearNetwork:
    return build_network([(0.0, 0.0), (length, 0.0)], [(0, 1)])


def unit_cycle() -> LinearNetwork:
    """Equilateral 3-cycle with unit edge lengths."""
    V = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]
    return build_network(V, [(0, 1), (1, 2), (2, 0)], length_overrides=[1.0, 1.0, 1.0])


def grid_network(nx: int = 6, ny: int = 6, spacing: float = 1.0) -> LinearNetwork:
    """``nx`` by ``ny`` lattice of vertices joined to their horizontal and vertical neighbours."""
    V = [(i * spacing, j * spacing) for j in range(ny) for i in range(nx)]
    E = []
    for j in range(ny):
        for i in range(nx):
            v = j * nx + i
            if i + 1 < nx:
                E.append((v, v + 1))
            if j + 1 < ny:
                E.append((v, v + nx))
    return build_network(V, E)


FIXTURES = {
    "single_edge": "single_edge.json",
    "cycle3": "cycle3.json",
    "grid6": "grid6.json",
}


def load_fixture(name: str) -> LinearNetwork:
    """Load one of the bundled JSON networks: ``single_edge``, ``cycle3`` or ``grid6``."""
    from .io import network_from_dict

    text = resources.files("netcov").joinpath("data", FIXTURES[name]).read_text()
    return network_from_dict(json.loads(text))


def random_planar_network(rng: np.random.Generator, n_vertices: int = 30,
                          extra_edge_fraction: float = 0.3,
                          tree: bool = False) -> LinearNetwork:
    """Random connected planar network on uniform points in the unit square.

    Starts from the Euclidean minimum spanning tree of the Delaunay graph and
    adds a random ``extra_edge_fraction`` of the remaining Delaunay edges, so
    segments never cross. ``tree=True`` returns the spanning tree alone.
    """
    pts = rng.random((n_vertices, 2))
    tri = Delaunay(pts)
    cand = set()
    for simplex in tri.simplices:
        for k in range(3):
            u, w = sorted((int(simplex[k]), int(simplex[(k + 1) % 3])))
            cand.add((u, w))
    cand = sorted(cand)
    cu = np.array([c[0] for c in cand])
    cw = np.array([c[1] for c in cand])
    length = np.linalg.norm(pts[cu] - pts[cw], axis=1)
    mst = minimum_spanning_tree(coo_matrix((length, (cu, cw)), shape=(n_vertices,) * 2))
    mst = mst.tocoo()
    tree_edges = {tuple(sorted((int(u), int(w)))) for u, w in zip(mst.row, mst.col)}
    edges = sorted(tree_edges)
    if not tree:
        rest = [c for c in cand if c not in tree_edges]
        k = int(round(extra_edge_fraction * len(rest)))
        if k:
            pick = rng.choice(len(rest), size=k, replace=False)
            edges = sorted(edges + [rest[i] for i in pick])
    return build_network(pts, edges)
