"""A* with expansion counting and deterministic tie-breaking.

Open-list entries are ``(f, -g, node)`` so f-ties go to the larger g and then
to the smaller node id.  Improved entries are pushed again and stale ones are
skipped on pop (lazy deletion); a skipped entry is not an expansion.  Closed
nodes are never reopened.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import NodeOutOfRange
from .graph import WeightedGraph
from .heuristics import HeuristicProvider, ZeroHeuristic

# slack used when deciding that a closed node was reached by a shorter path
REOPEN_TOL = 1e-9


@dataclass
class SearchResult:
    path: list[int] | None
    cost: float
    expanded: int    # pops that passed the stale/closed check
    generated: int   # successor relaxations attempted
    reopen_attempts: int = 0  # strictly shorter paths found to closed nodes

    @property
    def found(self) -> bool:
        return self.path is not None


def astar(g: WeightedGraph, start: int, goal: int, h: HeuristicProvider) -> SearchResult:
    n = g.node_count
    if not (0 <= start < n and 0 <= goal < n):
        raise NodeOutOfRange(f"start/goal ({start}, {goal}) outside [0, {n})")
    hf = h.bind(goal)
    adj = g.adjacency
    push, pop = heapq.heappush, heapq.heappop

    best = {start: 0.0}
    parent = {start: -1}
    closed = set()
    open_list = [(hf(start), -0.0, start)]
    expanded = generated = reopen = 0

    while open_list:
        _, neg_g, u = pop(open_list)
        gu = -neg_g
        if u in closed or gu > best[u]:
            continue
        closed.add(u)
        expanded += 1
        if u == goal:
            path = [u]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            path.reverse()
            return SearchResult(path, gu, expanded, generated, reopen)
        for v, w in adj[u]:
            generated += 1
            gv = gu + w
            if v in closed:
                if gv < best[v] - REOPEN_TOL:
                    reopen += 1
                continue
            old = best.get(v)
            if old is None or gv < old:
                best[v] = gv
                parent[v] = u
                push(open_list, (gv + hf(v), -gv, v))

    return SearchResult(None, math.inf, expanded, generated, reopen)


def dijkstra_baseline(g: WeightedGraph, start: int, goal: int) -> SearchResult:
    return astar(g, start, goal, ZeroHeuristic(g.node_count))


def path_cost(g: WeightedGraph, path: list[int]) -> float:
    total = 0.0
    for a, b in zip(path, path[1:]):
        total += g.edge_weight(a, b)
    return total
