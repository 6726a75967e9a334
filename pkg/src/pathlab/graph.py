"""Immutable weighted undirected graphs and single-source shortest paths.

Nodes are dense integers ``0..n-1``.  Edges are stored once, canonically as
``u < v``, in three parallel read-only numpy arrays.  Two derived views are
built lazily:

* ``adjacency``: per-node tuples of ``(neighbor, weight)`` sorted by neighbor,
  used by the A* engine;
* ``csr``: a symmetric scipy CSR matrix, used for Dijkstra trees.

A graph with the same topology and different weights (the residual working
graphs of the FastMap build) is made with :meth:`WeightedGraph.with_weights`,
which reuses the CSR structure and only rewrites the data array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import EmptyGraph, NegativeWeight, NodeOutOfRange, SelfLoop

INF = math.inf


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class _Topology:
    """CSR layout shared by every graph with the same edge set."""

    __slots__ = ("indptr", "indices", "slot_edge")

    def __init__(self, n: int, u: np.ndarray, v: np.ndarray):
        m = len(u)
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        order = np.lexsort((cols, rows))
        self.indices = _readonly(cols[order].astype(np.int32))
        self.indptr = _readonly(
            np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=n))]).astype(np.int32)
        )
        # which edge each CSR slot carries; every edge appears in two slots
        self.slot_edge = _readonly(np.concatenate([np.arange(m), np.arange(m)])[order])


class WeightedGraph:
    """Non-negative edge-weighted undirected graph without self-loops.

    Treat instances as immutable; the edge arrays are flagged read-only.
    """

    __slots__ = ("node_count", "edge_u", "edge_v", "edge_w", "_topo", "_adj", "_csr")

    def __init__(self, node_count: int, edge_u, edge_v, edge_w, _topo: _Topology | None = None):
        self.node_count = int(node_count)
        self.edge_u = edge_u
        self.edge_v = edge_v
        self.edge_w = edge_w
        self._topo = _topo
        self._adj = None
        self._csr = None

    @property
    def edge_count(self) -> int:
        return len(self.edge_u)

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist()))

    @property
    def topology(self) -> _Topology:
        if self._topo is None:
            self._topo = _Topology(self.node_count, self.edge_u, self.edge_v)
        return self._topo

    @property
    def csr(self) -> sp.csr_matrix:
        if self._csr is None:
            t = self.topology
            data = self.edge_w[t.slot_edge]
            self._csr = sp.csr_matrix(
                (data, t.indices, t.indptr), shape=(self.node_count, self.node_count)
            )
        return self._csr

    @property
    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        if self._adj is None:
            t = self.topology
            indptr = t.indptr.tolist()
            nbrs = t.indices.tolist()
            ws = self.edge_w[t.slot_edge].tolist()
            self._adj = tuple(
                tuple(zip(nbrs[indptr[i]:indptr[i + 1]], ws[indptr[i]:indptr[i + 1]]))
                for i in range(self.node_count)
            )
        return self._adj

    def neighbors(self, u: int) -> list[int]:
        return [v for v, _ in self.adjacency[u]]

    def edge_weight(self, u: int, v: int) -> float:
        for x, w in self.adjacency[u]:
            if x == v:
                return w
        raise KeyError((u, v))

    def with_weights(self, weights: np.ndarray) -> "WeightedGraph":
        """Same nodes and edges, new weights (aligned with ``edge_u``/``edge_v``)."""
        w = np.array(weights, dtype=np.float64)
        if w.shape != self.edge_w.shape:
            raise ValueError("weight vector does not match edge count")
        if len(w) and w.min() < 0:
            raise NegativeWeight(f"negative weight {w.min()!r}")
        return WeightedGraph(self.node_count, self.edge_u, self.edge_v, _readonly(w), self.topology)

    def components(self) -> np.ndarray:
        """Connected-component label per node."""
        if self.node_count == 0:
            return np.zeros(0, dtype=np.int32)
        _, labels = connected_components(self.csr, directed=False)
        return labels

    def __repr__(self):
        return f"WeightedGraph(nodes={self.node_count}, edges={self.edge_count})"


def build_graph(node_count: int, edge_list: Iterable[Sequence]) -> WeightedGraph:
    """Validate an edge list and build a :class:`WeightedGraph`.

    Each item is ``(u, v, w)``.  Parallel edges collapse to the lightest one,
    which leaves every shortest-path distance unchanged.
    """
    n = int(node_count)
    if n < 0:
        raise ValueError("node_count must be non-negative")
    best: dict[tuple[int, int], float] = {}
    for u, v, w in edge_list:
        u, v, w = int(u), int(v), float(w)
        if not (0 <= u < n and 0 <= v < n):
            raise NodeOutOfRange(f"edge ({u}, {v}) outside [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        if not w >= 0:
            raise NegativeWeight(f"edge ({u}, {v}) has weight {w!r}")
        key = (u, v) if u < v else (v, u)
        old = best.get(key)
        if old is None or w < old:
            best[key] = w
    keys = sorted(best)
    eu = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
    ev = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
    ew = np.fromiter((best[k] for k in keys), dtype=np.float64, count=len(keys))
    return WeightedGraph(n, _readonly(eu), _readonly(ev), _readonly(ew))


def graph_from_arrays(node_count: int, u, v, w) -> WeightedGraph:
    """Vectorised constructor for large, already-valid edge arrays (``u < v``, unique)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    if len(u):
        if u.min() < 0 or v.max() >= node_count or (u >= v).any():
            raise NodeOutOfRange("edge arrays must satisfy 0 <= u < v < node_count")
        if w.min() < 0:
            raise NegativeWeight("negative weight in edge arrays")
    order = np.lexsort((v, u))
    u, v, w = u[order], v[order], w[order]
    if len(u) > 1 and ((u[1:] == u[:-1]) & (v[1:] == v[:-1])).any():
        raise ValueError("duplicate edges in edge arrays")
    return WeightedGraph(node_count, _readonly(u.copy()), _readonly(v.copy()), _readonly(w.copy()))


@dataclass(frozen=True)
class ShortestPathTree:
    source: int
    dist: np.ndarray    # float64, inf where unreachable
    parent: np.ndarray  # int, -1 for the source and unreachable nodes

    def path_to(self, target: int) -> list[int] | None:
        if not math.isfinite(self.dist[target]):
            return None
        path = [target]
        while path[-1] != self.source:
            path.append(int(self.parent[path[-1]]))
        path.reverse()
        return path


def shortest_path_tree(g: WeightedGraph, source: int) -> ShortestPathTree:
    if not 0 <= source < g.node_count:
        raise NodeOutOfRange(f"source {source} outside [0, {g.node_count})")
    dist, pred = dijkstra(g.csr, directed=True, indices=source, return_predecessors=True)
    parent = np.where(pred < 0, -1, pred).astype(np.int64)
    return ShortestPathTree(int(source), _readonly(dist), _readonly(parent))


def farthest_node(tree: ShortestPathTree) -> tuple[int, float]:
    """Reachable node with the largest distance; ties go to the smallest id."""
    d = np.where(np.isfinite(tree.dist), tree.dist, -1.0)
    i = int(np.argmax(d))
    return i, float(tree.dist[i])


def require_nonempty(g: WeightedGraph) -> None:
    if g.node_count == 0:
        raise EmptyGraph("graph has no nodes")
