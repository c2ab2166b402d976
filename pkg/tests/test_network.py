import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netcov import (
    DanglingVertexIndex,
    DisconnectedNetwork,
    DuplicateEdge,
    NetworkPoint,
    OffsetOutOfRange,
    ZeroLengthEdge,
    build_network,
    canonical,
    make_point,
    refine,
    sample_points,
    snap_to_network,
)
from netcov.fixtures import grid_network, unit_cycle
from netcov.io import network_from_dict


def test_single_segment():
    net = build_network([(0, 0), (1, 0)], [(0, 1)])
    assert net.n_edges == 1
    assert net.lengths[0] == 1.0


def test_triangle_lengths():
    net = build_network([(0, 0), (1, 0), (0, 1)], [(0, 1), (1, 2), (2, 0)])
    assert net.lengths == pytest.approx([1.0, math.sqrt(2), 1.0])


def test_length_override():
    net = build_network([(0, 0), (1, 0)], [(0, 1)], length_overrides=[3.0])
    assert net.lengths[0] == 3.0
    assert net.to_dict()["lengths"] == [3.0]


@pytest.mark.parametrize("vertices, edges, exc", [
    ([(0, 0), (1, 0), (5, 5), (6, 5)], [(0, 1), (2, 3)], DisconnectedNetwork),
    ([(0, 0), (1, 0)], [(0, 2)], DanglingVertexIndex),
    ([(0, 0), (1, 0)], [(0, 1), (1, 0)], DuplicateEdge),
    ([(0, 0), (0, 0)], [(0, 1)], ZeroLengthEdge),
    ([(0, 0), (1, 0)], [(0, 0)], ZeroLengthEdge),
    ([(0, 0), (1, 0), (2, 0)], [(0, 1)], DisconnectedNetwork),
])
def test_build_errors(vertices, edges, exc):
    with pytest.raises(exc):
        build_network(vertices, edges)


def test_disconnected_names_components():
    with pytest.raises(DisconnectedNetwork) as info:
        build_network([(0, 0), (1, 0), (5, 5), (6, 5)], [(0, 1), (2, 3)])
    assert info.value.components == [[0, 1], [2, 3]]


def test_make_point_canonical():
    net = build_network([(0, 0), (1, 0), (0, 1)], [(0, 1), (1, 2), (2, 0)])
    assert make_point(net, 0, 0.0) == NetworkPoint(0, 0.0)
    assert net.point_vertex(make_point(net, 0, 0.0)) == 0
    # vertex 2 is the tail of edge 2 and head of edge 1; edge 1 is lower
    p = make_point(net, 2, 0.0)
    assert p == NetworkPoint(1, math.sqrt(2))
    assert make_point(net, 0, 0.5) == NetworkPoint(0, 0.5)
    with pytest.raises(OffsetOutOfRange):
        make_point(net, 0, 2.0)


def test_snap():
    net = build_network([(0, 0), (1, 0)], [(0, 1)])
    assert snap_to_network(net, (0.5, 0.3)) == NetworkPoint(0, 0.5)
    assert snap_to_network(net, (-1, 0)) == NetworkPoint(0, 0.0)
    assert snap_to_network(net, (3, 1)) == NetworkPoint(0, 1.0)


def test_snap_tie_goes_to_lower_edge():
    # parallel horizontal edges at y=0 and y=2, query at y=1
    net = build_network([(0, 0), (2, 0), (2, 2), (0, 2)], [(0, 1), (1, 2), (2, 3), (3, 0)])
    p = snap_to_network(net, (1.0, 1.0))
    # edge 0 (y=0) and edge 2 (y=2) and edges 1, 3 at x=2, x=0 are all at distance 1
    assert p.edge == 0


def test_refine_midpoint():
    net = build_network([(0, 0), (1, 0)], [(0, 1)])
    new, ids = refine(net, [NetworkPoint(0, 0.5)])
    assert new.n_vertices == 3
    assert sorted(new.lengths) == [0.5, 0.5]
    assert ids == [2]
    assert np.allclose(new.vertices[2], [0.5, 0.0])


def test_refine_vertex_point_unchanged():
    net = build_network([(0, 0), (1, 0)], [(0, 1)])
    new, ids = refine(net, [NetworkPoint(0, 1.0)])
    assert new.n_vertices == 2 and new.n_edges == 1
    assert ids == [1]


def test_refine_two_points_order():
    net = build_network([(0, 0), (1, 0)], [(0, 1)])
    new, ids = refine(net, [NetworkPoint(0, 0.75), NetworkPoint(0, 0.25)])
    assert new.n_edges == 3
    assert list(new.lengths) == [0.25, 0.5, 0.25]
    assert new.vertices[ids[1]][0] == pytest.approx(0.25)
    assert new.vertices[ids[0]][0] == pytest.approx(0.75)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 59), st.floats(0.001, 0.999)), min_size=1,
                max_size=25))
def test_refine_preserves_total_length(raw):
    net = grid_network(6, 6)
    pts = sorted({make_point(net, e, f * net.lengths[e]) for e, f in raw})
    new, ids = refine(net, pts)
    assert abs(new.total_length - net.total_length) <= 1e-12 * net.total_length
    for p, v in zip(pts, ids):
        assert np.allclose(new.vertices[v], net.point_xy(p))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 59), st.sampled_from([0.0, 0.3, 1.0]))
def test_canonical_idempotent(e, f):
    net = grid_network(6, 6)
    p = canonical(net, NetworkPoint(e, f * float(net.lengths[e])))
    assert canonical(net, p) == p


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 59), st.floats(0.0, 1.0))
def test_snap_of_network_point(e, f):
    net = grid_network(6, 6)
    p = make_point(net, e, f * float(net.lengths[e]))
    q = snap_to_network(net, net.point_xy(p))
    assert np.linalg.norm(net.point_xy(q) - net.point_xy(p)) <= 1e-9 * net.lengths[e]
    if q.edge == p.edge:
        assert abs(q.offset - p.offset) <= 1e-9 * net.lengths[e]


def _wide_network(m_edges):
    # star-and-chain network with m edges; only the edge count matters here
    V = [(i, 0.0) for i in range(m_edges + 1)]
    E = [(i, i + 1) for i in range(m_edges)]
    return build_network(V, E)


def test_sample_points_counts():
    assert len(sample_points(_wide_network(203), "per_edge", 28)) == 5684
    assert len(sample_points(_wide_network(503), "midpoints")) == 503
    net = build_network([(0, 0), (3, 0)], [(0, 1)])
    assert sample_points(net, "per_edge", 1) == [NetworkPoint(0, 1.5)]


def test_sample_points_total_largest_remainder():
    net = build_network([(0, 0), (1, 0), (4, 0)], [(0, 1), (1, 2)])
    pts = sample_points(net, "total", 10)
    per = [sum(p.edge == e for p in pts) for e in range(2)]
    # quotas 2.5 and 7.5; equal remainders resolved toward the lower edge index
    assert per == [3, 7]
    assert len(sample_points(net, "total", 7)) == 7


def test_json_round_trip():
    net = unit_cycle()
    again = network_from_dict(net.to_dict())
    assert again == net
    assert network_from_dict(again.to_dict()) == net
