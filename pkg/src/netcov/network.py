"""Linear networks as planar metric graphs, and points located on them.

A point on the network is stored as ``(edge, offset)``, the arc length from
the tail vertex of ``edge``. Points sitting on a vertex have a single
canonical encoding: the lowest-indexed incident edge, with the offset
measured from that edge's tail (so either ``0`` or the edge length).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DanglingVertexIndex,
    DisconnectedNetwork,
    DuplicateEdge,
    OffsetOutOfRange,
    ZeroLengthEdge,
)

__all__ = [
    "LinearNetwork",
    "NetworkPoint",
    "build_network",
    "make_point",
    "canonical",
    "snap_to_network",
    "refine",
    "sample_points",
]


@dataclass(frozen=True, order=True)
class NetworkPoint:
    """Location ``offset`` (arc length from the tail vertex) along ``edge``."""

    edge: int
    offset: float


class LinearNetwork:
    """Immutable, validated, connected linear network.

    Use :func:`build_network` rather than calling the constructor directly;
    the constructor trusts its inputs.
    """

    def __init__(self, vertices: np.ndarray, edges: np.ndarray,
                 lengths: np.ndarray, overridden: bool = False):
        self.vertices = np.asarray(vertices, dtype=float)
        self.edges = np.asarray(edges, dtype=np.int64)
        self.lengths = np.asarray(lengths, dtype=float)
        self.lengths_overridden = overridden
        for arr in (self.vertices, self.edges, self.lengths):
            arr.setflags(write=False)

        incident: list[list[int]] = [[] for _ in range(len(self.vertices))]
        for e, (u, w) in enumerate(self.edges):
            incident[u].append(e)
            incident[w].append(e)
        self._incident = tuple(tuple(sorted(es)) for es in incident)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_length(self) -> float:
        return float(np.sum(self.lengths))

    def incident_edges(self, v: int) -> tuple[int, ...]:
        return self._incident[v]

    def neighbors(self, v: int) -> list[int]:
        out = []
        for e in self._incident[v]:
            u, w = self.edges[e]
            out.append(int(w if u == v else u))
        return out

    def vertex_point(self, v: int) -> NetworkPoint:
        """Canonical point for vertex ``v``."""
        e = self._incident[v][0]
        if self.edges[e, 0] == v:
            return NetworkPoint(e, 0.0)
        return NetworkPoint(e, float(self.lengths[e]))

    def point_vertex(self, p: NetworkPoint) -> int | None:
        """Vertex index if ``p`` lies on a vertex, else ``None``."""
        if p.offset == 0.0:
            return int(self.edges[p.edge, 0])
        if p.offset == self.lengths[p.edge]:
            return int(self.edges[p.edge, 1])
        return None

    def point_xy(self, p: NetworkPoint) -> np.ndarray:
        u, w = self.edges[p.edge]
        frac = p.offset / self.lengths[p.edge]
        return (1.0 - frac) * self.vertices[u] + frac * self.vertices[w]

    def to_dict(self) -> dict:
        out = {
            "vertices": self.vertices.tolist(),
            "edges": self.edges.tolist(),
        }
        if self.lengths_overridden:
            out["lengths"] = self.lengths.tolist()
        return out

    def __eq__(self, other):
        if not isinstance(other, LinearNetwork):
            return NotImplemented
        return (np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.lengths, other.lengths))

    __hash__ = None

    def __repr__(self):
        return (f"LinearNetwork({self.n_vertices} vertices, {self.n_edges} edges, "
                f"total length {self.total_length:.6g})")


def build_network(vertices: Sequence[Sequence[float]],
                  edges: Sequence[Sequence[int]],
                  length_overrides: Sequence[float] | None = None) -> LinearNetwork:
    """Validate raw geometry and build a :class:`LinearNetwork`.

    Edge lengths default to the Euclidean distance between endpoints.

    Raises
    ------
    DanglingVertexIndex
        An edge refers to a vertex index out of range.
    ZeroLengthEdge
        A self loop, or a non-positive / non-finite length.
    DuplicateEdge
        The same undirected edge appears twice.
    DisconnectedNetwork
        The graph has more than one connected component.
    """
    V = np.asarray(vertices, dtype=float).reshape(-1, 2)
    E = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    n = len(V)
    if len(E) == 0:
        raise DisconnectedNetwork([[v] for v in range(n)] or [[]])
    if not np.all(np.isfinite(V)):
        raise ValueError("vertex coordinates must be finite")

    bad = np.flatnonzero((E < 0) | (E >= n))
    if bad.size:
        e = bad[0] // 2
        raise DanglingVertexIndex(f"edge {e} = {E[e].tolist()} references a vertex "
                                  f"outside 0..{n - 1}")
    loops = np.flatnonzero(E[:, 0] == E[:, 1])
    if loops.size:
        raise ZeroLengthEdge(f"edge {loops[0]} is a self loop at vertex {E[loops[0], 0]}")

    seen: dict[tuple[int, int], int] = {}
    for e, (u, w) in enumerate(E):
        key = (min(u, w), max(u, w))
        if key in seen:
            raise DuplicateEdge(f"edges {seen[key]} and {e} both join vertices {key}")
        seen[key] = e

    if length_overrides is None:
        L = np.linalg.norm(V[E[:, 1]] - V[E[:, 0]], axis=1)
    else:
        L = np.asarray(length_overrides, dtype=float)
        if L.shape != (len(E),):
            raise ValueError(f"expected {len(E)} lengths, got {L.size}")
    badlen = np.flatnonzero(~(np.isfinite(L) & (L > 0)))
    if badlen.size:
        e = badlen[0]
        raise ZeroLengthEdge(f"edge {e} has invalid length {L[e]!r}")

    adj = coo_matrix((np.ones(len(E)), (E[:, 0], E[:, 1])), shape=(n, n))
    ncomp, labels = connected_components(adj, directed=False)
    if ncomp > 1:
        raise DisconnectedNetwork([np.flatnonzero(labels == c) for c in range(ncomp)])

    return LinearNetwork(V, E, L, overridden=length_overrides is not None)


def canonical(network: LinearNetwork, p: NetworkPoint) -> NetworkPoint:
    v = network.point_vertex(p)
    if v is None:
        return p
    return network.vertex_point(v)


def make_point(network: LinearNetwork, edge: int, offset: float) -> NetworkPoint:
    """Canonical point at arc length ``offset`` along ``edge``."""
    if not 0 <= edge < network.n_edges:
        raise IndexError(f"edge {edge} out of range 0..{network.n_edges - 1}")
    L = float(network.lengths[edge])
    offset = float(offset)
    if not (0.0 <= offset <= L):
        raise OffsetOutOfRange(f"offset {offset!r} outside [0, {L!r}] on edge {edge}")
    return canonical(network, NetworkPoint(int(edge), offset))


def snap_to_network(network: LinearNetwork, xy: Sequence[float]) -> NetworkPoint:
    """Euclidean-nearest point of the network to the planar coordinate ``xy``.

    Ties go to the lowest edge index. Arc length is rescaled when edge
    lengths are overridden.
    """
    q = np.asarray(xy, dtype=float)
    A = network.vertices[network.edges[:, 0]]
    B = network.vertices[network.edges[:, 1]]
    AB = B - A
    t = np.einsum("ij,ij->i", q - A, AB) / np.einsum("ij,ij->i", AB, AB)
    t = np.clip(t, 0.0, 1.0)
    proj = A + t[:, None] * AB
    dist = np.linalg.norm(proj - q, axis=1)
    # tolerance keeps "equidistant" robust to rounding in the projection
    tol = 1e-12 * max(1.0, float(np.max(np.abs(network.vertices))))
    e = int(np.flatnonzero(dist <= dist.min() + tol)[0])
    L = float(network.lengths[e])
    if t[e] == 0.0:
        off = 0.0
    elif t[e] == 1.0:
        off = L
    else:
        off = min(max(float(t[e]) * L, 0.0), L)
    return canonical(network, NetworkPoint(e, off))


def refine(network: LinearNetwork,
           points: Iterable[NetworkPoint]) -> tuple[LinearNetwork, list[int]]:
    """Insert interior points as degree-2 vertices.

    A split edge keeps its index for the piece adjacent to its tail; the
    remaining pieces and the new vertices are appended in order of edge and
    offset. Returns the refined network and, for each input point, its vertex
    index in the refined network.
    """
    points = list(points)
    ids: list[int | None] = [None] * len(points)
    by_edge: dict[int, list[tuple[float, int]]] = {}
    for i, p in enumerate(points):
        v = network.point_vertex(p)
        if v is not None:
            ids[i] = v
        else:
            by_edge.setdefault(p.edge, []).append((p.offset, i))

    verts = [row for row in network.vertices.tolist()]
    edges = [list(map(int, row)) for row in network.edges]
    lengths = network.lengths.tolist()
    new_edges: list[list[int]] = []
    new_lengths: list[float] = []

    for e in sorted(by_edge):
        u, w = edges[e]
        L = lengths[e]
        pts = sorted(by_edge[e])
        chain = [u]
        offsets = [0.0]
        for off, i in pts:
            if off == offsets[-1]:
                ids[i] = chain[-1]
                continue
            frac = off / L
            xy = (1.0 - frac) * network.vertices[u] + frac * network.vertices[w]
            verts.append(xy.tolist())
            vid = len(verts) - 1
            chain.append(vid)
            offsets.append(off)
            ids[i] = vid
        chain.append(w)
        offsets.append(L)
        pieces = np.diff(offsets)
        edges[e] = [chain[0], chain[1]]
        lengths[e] = float(pieces[0])
        for k in range(1, len(chain) - 1):
            new_edges.append([chain[k], chain[k + 1]])
            new_lengths.append(float(pieces[k]))

    out = LinearNetwork(np.array(verts), np.array(edges + new_edges, dtype=np.int64),
                        np.array(lengths + new_lengths), overridden=True)
    return out, [int(i) for i in ids]


def sample_points(network: LinearNetwork, mode: str = "midpoints",
                  count: int | None = None) -> list[NetworkPoint]:
    """Deterministic point layouts on the network.

    ``mode`` is one of

    * ``"midpoints"``: one point at the middle of every edge;
    * ``"per_edge"``: ``count`` equally spaced interior points per edge, at
      offsets ``L * i / (count + 1)``;
    * ``"total"``: ``count`` points spread over edges in proportion to their
      length (largest-remainder rounding), equally spaced within each edge.
    """
    m = network.n_edges
    if mode == "midpoints":
        per = np.ones(m, dtype=int)
    elif mode == "per_edge":
        if count is None or count < 1:
            raise ValueError("per_edge mode needs count >= 1")
        per = np.full(m, int(count))
    elif mode == "total":
        if count is None or count < 1:
            raise ValueError("total mode needs count >= 1")
        quota = count * network.lengths / network.total_length
        per = np.floor(quota).astype(int)
        short = count - per.sum()
        if short:
            # stable sort keeps lower edge indices first among equal remainders
            order = np.argsort(-(quota - per), kind="stable")
            per[order[:short]] += 1
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")

    out = []
    for e in range(m):
        k = per[e]
        L = float(network.lengths[e])
        for i in range(1, k + 1):
            out.append(NetworkPoint(e, L * i / (k + 1)))
    return out
