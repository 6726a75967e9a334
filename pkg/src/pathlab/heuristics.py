"""Heuristic providers for the A* engine.

Every provider answers ``h(a, b)`` and can be *bound* to a goal, returning a
one-argument callable that the search calls for each generated node.  Binding
does the per-goal lookups once so the per-node call only reads precomputed
tuples.

``memory_units`` is the number of stored reals per node, so FastMap with K
dimensions and a differential heuristic with K pivots cost the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from operator import sub
from pathlib import Path
from typing import Callable, Sequence, TextIO

import numpy as np

from .errors import (
    EmptyGraph,
    FormatError,
    GraphMismatch,
    MalformedHeader,
    TooManyPivots,
)
from .fastmap import Embedding, make_rng
from .graph import WeightedGraph, farthest_node, shortest_path_tree

SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0
PIVOT_MAGIC = "DIFFH v1"

Cell = tuple[int, int]


def octile_heuristic(cell_a: Cell, cell_b: Cell) -> float:
    dx = abs(cell_a[0] - cell_b[0])
    dy = abs(cell_a[1] - cell_b[1])
    return max(dx, dy) + SQRT2_MINUS_1 * min(dx, dy)


def manhattan_heuristic(cell_a: Cell, cell_b: Cell) -> float:
    return abs(cell_a[0] - cell_b[0]) + abs(cell_a[1] - cell_b[1])


# --- pivot tables -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PivotTable:
    pivots: tuple[int, ...]
    dist: np.ndarray  # (pivot_count, node_count), inf where unreachable

    @property
    def node_count(self) -> int:
        return self.dist.shape[1]

    def truncate(self, p: int) -> "PivotTable":
        d = np.ascontiguousarray(self.dist[:p])
        d.setflags(write=False)
        return PivotTable(self.pivots[:p], d)


def build_differential(g: WeightedGraph, pivot_count: int, seed: int = 0) -> PivotTable:
    """Greedy farthest-first pivot placement.

    The first pivot is the node farthest from a random seed node; every later
    pivot maximises its distance to the closest pivot chosen so far.  Nodes
    that no pivot reaches count as infinitely far, so every component gets a
    pivot before any component gets a second one.
    """
    if g.node_count == 0:
        raise EmptyGraph("graph has no nodes")
    if not 1 <= pivot_count <= g.node_count:
        raise TooManyPivots(f"pivot_count must be in [1, {g.node_count}], got {pivot_count}")
    rng = make_rng(seed)
    start = int(rng.integers(g.node_count))
    first, _ = farthest_node(shortest_path_tree(g, start))
    pivots = [first]
    rows = [shortest_path_tree(g, first).dist]
    closest = rows[0].copy()
    while len(pivots) < pivot_count:
        masked = closest.copy()
        masked[pivots] = -1.0
        nxt = int(np.argmax(masked))  # first maximum = smallest id
        pivots.append(nxt)
        rows.append(shortest_path_tree(g, nxt).dist)
        np.minimum(closest, rows[-1], out=closest)
    dist = np.vstack(rows)
    dist.setflags(write=False)
    return PivotTable(tuple(pivots), dist)


def differential_heuristic(t: PivotTable, a: int, b: int) -> float:
    h = 0.0
    for row in t.dist:
        da, db = row[a], row[b]
        if da == db:  # also covers both unreachable
            continue
        h = max(h, abs(da - db))
    return float(h)


def write_pivots(t: PivotTable, out: TextIO) -> None:
    out.write(f"{PIVOT_MAGIC}\n")
    out.write(f"nodes {t.node_count} pivots {len(t.pivots)}\n")
    for p in t.pivots:
        out.write(f"pivot {p}\n")
    for row in t.dist.tolist():
        out.write(" ".join(f"{d:.17g}" for d in row))
        out.write("\n")


def read_pivots(src: TextIO) -> PivotTable:
    lines = src.read().split("\n")
    if not lines or lines[0].strip() != PIVOT_MAGIC:
        raise MalformedHeader(f"expected {PIVOT_MAGIC!r}")
    try:
        tag1, n, tag2, p = lines[1].split()
        if (tag1, tag2) != ("nodes", "pivots"):
            raise ValueError
        n, p = int(n), int(p)
    except (ValueError, IndexError):
        raise MalformedHeader("expected 'nodes <N> pivots <P>'") from None
    if len(lines) < 2 + 2 * p:
        raise FormatError("pivot file is truncated")
    pivots = []
    for line in lines[2:2 + p]:
        parts = line.split()
        if len(parts) != 2 or parts[0] != "pivot":
            raise FormatError(f"bad pivot line {line!r}")
        pivots.append(int(parts[1]))
    dist = np.zeros((p, n))
    for i, line in enumerate(lines[2 + p:2 + 2 * p]):
        vals = line.split()
        if len(vals) != n:
            raise FormatError(f"pivot row {i}: expected {n} distances, got {len(vals)}")
        dist[i] = [float(x) for x in vals]
    dist.setflags(write=False)
    return PivotTable(tuple(pivots), dist)


def save_pivots(t: PivotTable, path: str | Path) -> None:
    with open(path, "w") as fh:
        write_pivots(t, fh)


def load_pivots(path: str | Path) -> PivotTable:
    with open(path) as fh:
        return read_pivots(fh)


# --- providers ---------------------------------------------------------------

class HeuristicProvider:
    kind = "?"
    memory_units = 0

    def __init__(self, node_count: int):
        self.node_count = node_count

    @property
    def spec(self) -> str:
        return self.kind

    def bind(self, goal: int) -> Callable[[int], float]:
        raise NotImplementedError

    def h(self, a: int, b: int) -> float:
        return self.bind(b)(a)

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec}>"


class ZeroHeuristic(HeuristicProvider):
    kind = "ZERO"

    def bind(self, goal):
        return lambda n: 0.0


class _CellHeuristic(HeuristicProvider):
    def __init__(self, cells: Sequence[Cell]):
        super().__init__(len(cells))
        self.cells = tuple(tuple(c) for c in cells)


class ManhattanHeuristic(_CellHeuristic):
    """Only admissible on 4-neighbour grids."""

    kind = "MAN"

    def bind(self, goal):
        cells = self.cells
        gx, gy = cells[goal]

        def h(n):
            x, y = cells[n]
            return abs(x - gx) + abs(y - gy)
        return h


class OctileHeuristic(_CellHeuristic):
    kind = "OCT"

    def bind(self, goal):
        cells = self.cells
        gx, gy = cells[goal]
        c = SQRT2_MINUS_1

        def h(n):
            x, y = cells[n]
            dx = abs(x - gx)
            dy = abs(y - gy)
            return dx + c * dy if dx >= dy else dy + c * dx
        return h


class FastMapHeuristic(HeuristicProvider):
    kind = "FM"

    def __init__(self, embedding: Embedding):
        super().__init__(embedding.node_count)
        self.embedding = embedding
        self.memory_units = embedding.k
        self._rows = tuple(tuple(r) for r in embedding.coords.tolist())

    @property
    def spec(self):
        return f"FM({self.embedding.k})"

    def bind(self, goal):
        rows = self._rows
        gp = rows[goal]
        if not gp:
            return lambda n: 0.0
        # left-to-right sum, same order as fastmap_heuristic
        return lambda n: sum(map(abs, map(sub, rows[n], gp)))


class DifferentialHeuristic(HeuristicProvider):
    kind = "DH"

    def __init__(self, table: PivotTable):
        super().__init__(table.node_count)
        self.table = table
        self.memory_units = len(table.pivots)
        self._rows = tuple(tuple(r) for r in table.dist.T.tolist())

    @property
    def spec(self):
        return f"DH({len(self.table.pivots)})"

    def bind(self, goal):
        gv = self._rows[goal]
        rows = self._rows
        if not all(map(math.isfinite, gv)):
            # a pivot that cannot reach the goal says nothing about nodes near it
            keep = np.isfinite(self.table.dist[:, goal])
            if not keep.any():
                return lambda n: 0.0
            rows = tuple(tuple(r) for r in self.table.dist[keep].T.tolist())
            gv = rows[goal]
        return lambda n: max(map(abs, map(sub, rows[n], gv)))


class MaxHeuristic(HeuristicProvider):
    kind = "MAX"

    def __init__(self, parts: Sequence[HeuristicProvider]):
        super().__init__(parts[0].node_count)
        self.parts = tuple(parts)
        self.memory_units = sum(p.memory_units for p in parts)

    @property
    def spec(self):
        return "+".join(p.spec for p in self.parts)

    def bind(self, goal):
        fs = [p.bind(goal) for p in self.parts]
        if len(fs) == 2:
            f1, f2 = fs
            return lambda n: max(f1(n), f2(n))
        return lambda n: max(f(n) for f in fs)


def max_combine(providers: Sequence[HeuristicProvider]) -> HeuristicProvider:
    providers = list(providers)
    if not providers:
        raise ValueError("max_combine needs at least one provider")
    n = providers[0].node_count
    for p in providers[1:]:
        if p.node_count != n:
            raise GraphMismatch(f"{p.spec} built for {p.node_count} nodes, expected {n}")
    if len(providers) == 1:
        return providers[0]
    return MaxHeuristic(providers)


# --- spec strings --------------------------------------------------------------

@dataclass(frozen=True)
class HeuristicSpec:
    """Parsed form of ``ZERO | OCT | MAN | FM(k) | DH(p) | MAX(spec,spec)``.

    ``A+B`` is accepted as shorthand for ``MAX(A,B)``.
    """

    kind: str
    size: int = 0
    parts: tuple["HeuristicSpec", ...] = ()

    def __str__(self):
        if self.kind == "MAX":
            return "+".join(str(p) for p in self.parts)
        if self.kind in ("FM", "DH"):
            return f"{self.kind}({self.size})"
        return self.kind

    @property
    def memory_units(self) -> int:
        if self.kind == "MAX":
            return sum(p.memory_units for p in self.parts)
        return self.size

    def leaves(self):
        if self.kind == "MAX":
            for p in self.parts:
                yield from p.leaves()
        else:
            yield self


def parse_heuristic_spec(text: str) -> HeuristicSpec:
    s = text.replace(" ", "").upper()
    if not s:
        raise ValueError("empty heuristic spec")
    parts = _split_top(s, "+")
    if len(parts) > 1:
        return HeuristicSpec("MAX", parts=tuple(parse_heuristic_spec(p) for p in parts))
    if s in ("ZERO", "OCT", "MAN"):
        return HeuristicSpec(s)
    if s.startswith("MAX(") and s.endswith(")"):
        args = _split_top(s[4:-1], ",")
        if len(args) < 2 or not all(args):
            raise ValueError(f"MAX needs at least two arguments: {text!r}")
        return HeuristicSpec("MAX", parts=tuple(parse_heuristic_spec(a) for a in args))
    for kind in ("FM", "DH"):
        if s.startswith(kind + "(") and s.endswith(")"):
            try:
                k = int(s[len(kind) + 1:-1])
            except ValueError:
                raise ValueError(f"bad size in {text!r}") from None
            if k < 1:
                raise ValueError(f"size must be >= 1 in {text!r}")
            return HeuristicSpec(kind, k)
    raise ValueError(f"unrecognised heuristic spec {text!r}")


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {s!r}")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError(f"unbalanced parentheses in {s!r}")
    out.append("".join(cur))
    return out
