import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bellman_ford, bfs, grid_edges
from pathlab.errors import NegativeWeight, NodeOutOfRange, SelfLoop
from pathlab.graph import build_graph, farthest_node, shortest_path_tree


@st.composite
def small_graphs(draw, max_nodes=25):
    n = draw(st.integers(1, max_nodes))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    raw = draw(st.lists(st.tuples(pairs, st.floats(0, 10, allow_nan=False)), max_size=3 * n))
    return n, [(u, v, w) for (u, v), w in raw]


def test_single_node_graph():
    g = build_graph(1, [])
    assert g.node_count == 1 and g.edge_count == 0


def test_two_node_adjacency_symmetric():
    g = build_graph(2, [(0, 1, 5.0)])
    assert g.neighbors(0) == [1] and g.neighbors(1) == [0]
    assert g.edge_weight(1, 0) == 5.0


def test_open_3x3_grid_has_12_edges():
    _, edges = grid_edges(["...", "...", "..."])
    assert len(edges) == 2 * 3 * 2
    assert build_graph(9, edges).edge_count == 12


def test_neighbor_lists_ascending():
    g = build_graph(4, [(3, 0, 1.0), (0, 2, 1.0), (1, 0, 1.0)])
    assert g.neighbors(0) == [1, 2, 3]


@pytest.mark.parametrize("edges,exc", [
    ([(0, 1, -1.0)], NegativeWeight),
    ([(0, 5, 1.0)], NodeOutOfRange),
    ([(1, 1, 1.0)], SelfLoop),
    ([(0, 1, math.nan)], NegativeWeight),
])
def test_build_rejects(edges, exc):
    with pytest.raises(exc):
        build_graph(3, edges)


def test_parallel_edges_keep_lightest():
    g = build_graph(2, [(0, 1, 4.0), (1, 0, 2.5)])
    assert g.edges() == [(0, 1, 2.5)]


def test_edge_arrays_are_read_only():
    g = build_graph(2, [(0, 1, 1.0)])
    with pytest.raises(ValueError):
        g.edge_w[0] = 3.0


def test_spt_examples(path3):
    assert shortest_path_tree(build_graph(1, []), 0).dist.tolist() == [0.0]
    assert shortest_path_tree(path3, 0).dist.tolist() == [0.0, 2.0, 5.0]
    _, edges = grid_edges(["...", "...", "..."])
    tree = shortest_path_tree(build_graph(9, edges), 0)
    assert tree.dist[8] == bfs(9, edges, 0)[8] == 4


def test_spt_zero_weight_edges_are_edges():
    g = build_graph(3, [(0, 1, 0.0), (1, 2, 3.0)])
    t = shortest_path_tree(g, 0)
    assert t.dist.tolist() == [0.0, 0.0, 3.0]
    assert t.path_to(2) == [0, 1, 2]


def test_spt_unreachable():
    g = build_graph(3, [(0, 1, 1.0)])
    t = shortest_path_tree(g, 0)
    assert math.isinf(t.dist[2]) and t.parent[2] == -1 and t.path_to(2) is None


def test_farthest_node_examples(path3):
    assert farthest_node(shortest_path_tree(build_graph(1, []), 0)) == (0, 0.0)
    assert farthest_node(shortest_path_tree(path3, 0)) == (2, 5.0)
    _, edges = grid_edges(["...", "...", "..."])
    assert farthest_node(shortest_path_tree(build_graph(9, edges), 0)) == (8, 4.0)


def test_farthest_node_ties_smallest_id():
    # star: 1, 2, 3 all at distance 1 from 0
    g = build_graph(4, [(0, 3, 1.0), (0, 2, 1.0), (0, 1, 1.0)])
    assert farthest_node(shortest_path_tree(g, 0)) == (1, 1.0)


def test_farthest_node_ignores_unreachable():
    g = build_graph(4, [(0, 1, 2.0)])
    assert farthest_node(shortest_path_tree(g, 0)) == (1, 2.0)


def check_tree(g, tree):
    assert tree.dist[tree.source] == 0
    for x in range(g.node_count):
        p = tree.parent[x]
        if x == tree.source or not math.isfinite(tree.dist[x]):
            assert p == -1
        else:
            assert tree.dist[x] == tree.dist[p] + g.edge_weight(p, x)
    for u, v, w in g.edges():
        assert tree.dist[v] <= tree.dist[u] + w
        assert tree.dist[u] <= tree.dist[v] + w


@settings(max_examples=80, deadline=None)
@given(small_graphs(), st.data())
def test_dijkstra_matches_bellman_ford(graph, data):
    n, edges = graph
    g = build_graph(n, edges)
    src = data.draw(st.integers(0, n - 1))
    tree = shortest_path_tree(g, src)
    ref = bellman_ford(n, g.edges(), src)
    for a, b in zip(tree.dist.tolist(), ref):
        assert (math.isinf(a) and math.isinf(b)) or abs(a - b) <= 1e-9
    check_tree(g, tree)


def test_dijkstra_oracle_random_200(rng):
    from oracles import random_edges
    for _ in range(5):
        n = int(rng.integers(50, 201))
        edges = random_edges(rng, n, 4 / n)
        g = build_graph(n, edges)
        src = int(rng.integers(n))
        ref = np.array(bellman_ford(n, g.edges(), src))
        got = shortest_path_tree(g, src).dist
        fin = np.isfinite(ref)
        assert np.array_equal(fin, np.isfinite(got))
        assert np.max(np.abs(ref[fin] - got[fin])) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(small_graphs(), st.data())
def test_distance_symmetry(graph, data):
    n, edges = graph
    g = build_graph(n, edges)
    u = data.draw(st.integers(0, n - 1))
    v = data.draw(st.integers(0, n - 1))
    a = shortest_path_tree(g, u).dist[v]
    b = shortest_path_tree(g, v).dist[u]
    assert (math.isinf(a) and math.isinf(b)) or abs(a - b) <= 1e-9


def test_with_weights_shares_topology():
    g = build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    h = g.with_weights([0.5, 0.0])
    assert h.topology is g.topology
    assert shortest_path_tree(h, 0).dist.tolist() == [0.0, 0.5, 0.5]
    assert shortest_path_tree(g, 0).dist.tolist() == [0.0, 1.0, 2.0]
    with pytest.raises(NegativeWeight):
        g.with_weights([-1.0, 0.0])
