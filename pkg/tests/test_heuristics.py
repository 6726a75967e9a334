import io
import math

import numpy as np
import pytest

from conftest import grid_text
from oracles import bellman_ford, connected_random_edges, farthest_first, floyd_warshall
from pathlab.errors import EmptyGraph, GraphMismatch, MalformedHeader, TooManyPivots
from pathlab.fastmap import EmbedConfig, build_embedding, make_rng
from pathlab.graph import build_graph, shortest_path_tree
from pathlab.heuristics import (
    DifferentialHeuristic,
    FastMapHeuristic,
    HeuristicSpec,
    ManhattanHeuristic,
    OctileHeuristic,
    ZeroHeuristic,
    build_differential,
    differential_heuristic,
    manhattan_heuristic,
    max_combine,
    octile_heuristic,
    parse_heuristic_spec,
    read_pivots,
    write_pivots,
)
from pathlab.mapgen import open_terrain_map
from pathlab.mapio import grid_to_graph, parse_map


def test_octile_examples():
    assert octile_heuristic((4, 4), (4, 4)) == 0
    assert octile_heuristic((0, 0), (3, 0)) == 3
    assert octile_heuristic((0, 0), (3, 1)) == pytest.approx(3.414213562, abs=1e-9)
    assert octile_heuristic((3, 1), (0, 0)) == octile_heuristic((0, 0), (3, 1))


def test_octile_exact_on_open_eight_grid():
    m = parse_map(grid_text(["....", "....", "...."]))
    g, idx = grid_to_graph(m)
    d = shortest_path_tree(g, 0).dist
    for n in range(g.node_count):
        assert octile_heuristic(idx.cell(0), idx.cell(n)) == pytest.approx(d[n], abs=1e-12)


def test_manhattan_examples():
    assert manhattan_heuristic((2, 2), (2, 2)) == 0
    assert manhattan_heuristic((0, 0), (2, 2)) == 4
    assert manhattan_heuristic((1, 3), (4, 1)) == 5


def test_differential_pivot_far_from_seed():
    g = build_graph(3, [(0, 1, 2.0), (1, 2, 3.0)])
    # find a seed whose random start is node 1
    seed = next(s for s in range(100) if int(make_rng(s).integers(3)) == 1)
    t = build_differential(g, 1, seed)
    assert t.pivots[0] in (0, 2)
    assert t.pivots == (2,)  # d(1,2) = 3 beats d(1,0) = 2


def test_differential_all_nodes_are_pivots(rng):
    g = build_graph(12, connected_random_edges(rng, 12, 0.2))
    t = build_differential(g, 12, 3)
    assert sorted(t.pivots) == list(range(12))


def test_differential_matches_bruteforce_placement(rng):
    for seed in range(5):
        g = build_graph(25, connected_random_edges(rng, 25, 0.15))
        full = floyd_warshall(25, g.edges())
        t = build_differential(g, 6, seed)
        assert t.pivots == tuple(farthest_first(full, t.pivots[0], 6))
        for p, row in zip(t.pivots, t.dist):
            assert np.allclose(row, bellman_ford(25, g.edges(), p), atol=1e-9)


def test_differential_grid_second_pivot(open3_graph):
    g, _ = open3_graph
    t = build_differential(g, 2, 0)
    d = shortest_path_tree(g, t.pivots[0]).dist
    assert d[t.pivots[1]] == d.max()


def test_differential_errors():
    with pytest.raises(EmptyGraph):
        build_differential(build_graph(0, []), 1)
    with pytest.raises(TooManyPivots):
        build_differential(build_graph(2, [(0, 1, 1.0)]), 3)
    with pytest.raises(TooManyPivots):
        build_differential(build_graph(2, [(0, 1, 1.0)]), 0)


def test_differential_formula():
    g = build_graph(3, [(0, 1, 2.0), (1, 2, 3.0)])
    t = build_differential(g, 1, 0)
    assert differential_heuristic(t, 1, 1) == 0.0
    # a table with pivot 0 built by hand
    from pathlab.heuristics import PivotTable
    t0 = PivotTable((0,), np.array([[0.0, 2.0, 5.0]]))
    assert differential_heuristic(t0, 1, 2) == 3.0
    assert differential_heuristic(t0, 2, 0) == 5.0  # pivot as goal is exact


def test_pivot_goal_is_exact(rng):
    g = build_graph(40, connected_random_edges(rng, 40, 0.1))
    t = build_differential(g, 4, 1)
    h = DifferentialHeuristic(t)
    for p in t.pivots:
        d = bellman_ford(40, g.edges(), p)
        for a in range(40):
            assert abs(h.h(a, p) - d[a]) <= 1e-9


def test_pivot_persistence_round_trip(rng):
    g = build_graph(20, connected_random_edges(rng, 20, 0.1) + [])
    g = build_graph(22, g.edges())  # two isolated nodes -> inf distances
    t = build_differential(g, 3, 0)
    buf = io.StringIO()
    write_pivots(t, buf)
    text = buf.getvalue()
    assert text.startswith("DIFFH v1\nnodes 22 pivots 3\npivot ")
    back = read_pivots(io.StringIO(text))
    assert back.pivots == t.pivots
    assert np.array_equal(back.dist, t.dist)
    with pytest.raises(MalformedHeader):
        read_pivots(io.StringIO("FASTMAP-EMBED v1\n"))


def test_memory_units(rng):
    g = build_graph(30, connected_random_edges(rng, 30, 0.1))
    fm = FastMapHeuristic(build_embedding(g, EmbedConfig(k_max=5)).truncate(3))
    dh = DifferentialHeuristic(build_differential(g, 4))
    assert fm.memory_units == fm.embedding.k
    assert dh.memory_units == 4
    assert max_combine([fm, dh]).memory_units == fm.memory_units + 4
    assert max_combine([fm, dh]).spec == f"FM({fm.embedding.k})+DH(4)"


def test_max_combine_examples(rng):
    g = build_graph(30, connected_random_edges(rng, 30, 0.1))
    dh = DifferentialHeuristic(build_differential(g, 3))
    z = ZeroHeuristic(30)
    both = max_combine([z, dh])
    same = max_combine([dh, dh])
    for a in range(30):
        for b in range(30):
            assert both.h(a, b) == dh.h(a, b) == same.h(a, b)
    with pytest.raises(GraphMismatch):
        max_combine([dh, ZeroHeuristic(5)])
    with pytest.raises(ValueError):
        max_combine([])


def _providers_for_map(m):
    g, idx = grid_to_graph(m)
    e = build_embedding(g, EmbedConfig(k_max=5, restarts=3))
    dh = DifferentialHeuristic(build_differential(g, 5))
    fm = FastMapHeuristic(e)
    out = [ZeroHeuristic(g.node_count), OctileHeuristic(idx.cells), fm, dh, max_combine([fm, dh])]
    if m.neighborhood.value == "four":
        out.append(ManhattanHeuristic(idx.cells))
    return g, out


@pytest.mark.parametrize("nb", ["four", "eight"])
def test_every_provider_admissible_and_consistent(nb):
    m = open_terrain_map(12, 9, 6, 2, seed=5, neighborhood=nb)
    g, providers = _providers_for_map(m)
    n = g.node_count
    assert n <= 100
    full = floyd_warshall(n, g.edges())
    edges = g.edges()
    for p in providers:
        for goal in range(n):
            hf = p.bind(goal)
            h = [hf(x) for x in range(n)]
            assert h[goal] == 0
            for x in range(n):
                assert h[x] <= full[x, goal] + 1e-9, (p.spec, x, goal)
            for u, v, w in edges:
                assert h[u] <= w + h[v] + 1e-9 and h[v] <= w + h[u] + 1e-9, p.spec


def test_max_combination_dominates_components():
    m = open_terrain_map(12, 9, 6, 2, seed=5)
    g, providers = _providers_for_map(m)
    fm, dh, both = providers[2], providers[3], providers[4]
    n = g.node_count
    for a in range(n):
        for b in range(n):
            v = both.h(a, b)
            assert v >= fm.h(a, b) and v >= dh.h(a, b)


def test_dh_handles_disconnected_goal():
    g = build_graph(5, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 2.0)])
    t = build_differential(g, 2, 0)
    h = DifferentialHeuristic(t)
    assert h.h(3, 4) <= 2.0
    assert not math.isnan(h.h(0, 4))
    assert not math.isnan(differential_heuristic(t, 0, 4))


@pytest.mark.parametrize("text,canon,units", [
    ("ZERO", "ZERO", 0),
    ("oct", "OCT", 0),
    ("MAN", "MAN", 0),
    ("FM(10)", "FM(10)", 10),
    ("DH(3)", "DH(3)", 3),
    ("MAX(FM(5),DH(5))", "FM(5)+DH(5)", 10),
    ("FM(5)+DH(5)", "FM(5)+DH(5)", 10),
    ("MAX(FM(2), MAX(DH(1),OCT))", "FM(2)+DH(1)+OCT", 3),
])
def test_spec_grammar(text, canon, units):
    s = parse_heuristic_spec(text)
    assert str(s) == canon and s.memory_units == units


@pytest.mark.parametrize("bad", ["", "FM", "FM(0)", "FM(x)", "MAX(FM(1))", "DH(2", "FOO"])
def test_spec_grammar_rejects(bad):
    with pytest.raises(ValueError):
        parse_heuristic_spec(bad)


def test_spec_leaves():
    s = parse_heuristic_spec("MAX(FM(5),DH(4))")
    assert [str(x) for x in s.leaves()] == ["FM(5)", "DH(4)"]
    assert s == HeuristicSpec("MAX", parts=(HeuristicSpec("FM", 5), HeuristicSpec("DH", 4)))
