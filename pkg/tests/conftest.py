import math

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from netcov import NetworkPoint, build_oracle, make_point
from netcov.fixtures import grid_network, load_fixture, random_planar_network, single_edge

# acceptance results collected for the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def unit_edge():
    return single_edge(1.0)


@pytest.fixture(scope="session")
def grid6():
    return load_fixture("grid6")


@pytest.fixture(scope="session")
def grid6_oracle(grid6):
    return build_oracle(grid6)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_points(net, rng, n, vertex_fraction=0.2):
    """Distinct canonical points, a share of them on vertices."""
    pts = set()
    while len(pts) < n:
        if rng.random() < vertex_fraction:
            pts.add(net.vertex_point(int(rng.integers(net.n_vertices))))
        else:
            e = int(rng.integers(net.n_edges))
            L = float(net.lengths[e])
            pts.add(make_point(net, e, float(rng.uniform(0.02, 0.98)) * L))
    return sorted(pts)


def geodesic(net, s: NetworkPoint, t: NetworkPoint) -> float:
    """Shortest-path distance between two points via vertex Dijkstra."""
    n = net.n_vertices
    E = net.edges
    G = coo_matrix((np.r_[net.lengths, net.lengths], (np.r_[E[:, 0], E[:, 1]],
                                                       np.r_[E[:, 1], E[:, 0]])),
                   shape=(n, n)).tocsr()
    Dv = dijkstra(G, directed=False)

    def ends(p):
        u, w = E[p.edge]
        L = net.lengths[p.edge]
        return [(int(u), p.offset), (int(w), L - p.offset)]

    best = math.inf
    if s.edge == t.edge:
        best = abs(s.offset - t.offset)
    for a, da in ends(s):
        for b, db in ends(t):
            best = min(best, da + Dv[a, b] + db)
    return best


def pinv_vertex_resistance(net):
    """Effective resistance from the pseudo-inverse of the conductance Laplacian."""
    n = net.n_vertices
    Lap = np.zeros((n, n))
    for (u, w), L in zip(net.edges, net.lengths):
        c = 1.0 / L
        Lap[u, u] += c
        Lap[w, w] += c
        Lap[u, w] -= c
        Lap[w, u] -= c
    P = np.linalg.pinv(Lap)
    d = np.diag(P)
    return d[:, None] + d[None, :] - 2 * P


__all__ = ["random_points", "geodesic", "pinv_vertex_resistance", "random_planar_network",
           "grid_network", "ACCEPTANCE_LINES"]
