"""FastMap embeddings of weighted undirected graphs.

Each iteration finds a (heuristically) farthest pair ``(a, b)`` on the current
residual graph, gives every node the coordinate ``(d(a,v) + d(a,b) - d(v,b)) / 2``
and then subtracts ``|coord(u) - coord(v)|`` from every edge.  The L1 distance
between coordinate vectors is an admissible and consistent A* heuristic.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, TextIO

import numpy as np

from .errors import FormatError, InvalidConfig, MalformedHeader
from .graph import (
    ShortestPathTree,
    WeightedGraph,
    farthest_node,
    require_nonempty,
    shortest_path_tree,
)

log = logging.getLogger(__name__)

# default cutoff, relative to the first farthest-pair distance
RELATIVE_EPSILON = 1e-4

EMBED_MAGIC = "FASTMAP-EMBED v1"


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; identical across platforms for a given seed."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class EmbedConfig:
    k_max: int = 10
    epsilon: float | None = None  # None: RELATIVE_EPSILON * first span
    tau: int = 10
    restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.k_max < 1:
            raise InvalidConfig(f"k_max must be >= 1, got {self.k_max}")
        if self.tau < 1:
            raise InvalidConfig(f"tau must be >= 1, got {self.tau}")
        if self.restarts < 1:
            raise InvalidConfig(f"restarts must be >= 1, got {self.restarts}")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise InvalidConfig(f"epsilon must be >= 0, got {self.epsilon}")


class DimSpan(NamedTuple):
    n_a: int
    n_b: int
    d_ab: float


class FarthestPair(NamedTuple):
    n_a: int
    n_b: int
    d_ab: float
    tree_a: ShortestPathTree
    tree_b: ShortestPathTree


@dataclass
class BuildStats:
    edge_updates: int = 0
    clamps: int = 0
    min_residual: float = math.inf  # smallest pre-clamp residual weight seen
    # residual weights before each iteration, plus the final ones; only kept on request
    working_weights: list[np.ndarray] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class Embedding:
    coords: np.ndarray  # (node_count, k)
    spans: tuple[DimSpan, ...]
    stats: BuildStats | None = None

    @property
    def k(self) -> int:
        return self.coords.shape[1]

    @property
    def node_count(self) -> int:
        return self.coords.shape[0]

    def span_sequence(self) -> list[float]:
        return [s.d_ab for s in self.spans]

    def truncate(self, k: int) -> "Embedding":
        """The first ``k`` dimensions (a build with ``k_max=k`` gives the same result)."""
        k = min(k, self.k)
        c = np.ascontiguousarray(self.coords[:, :k])
        c.setflags(write=False)
        return Embedding(c, self.spans[:k])

    def same_as(self, other: "Embedding") -> bool:
        return (
            self.coords.shape == other.coords.shape
            and np.array_equal(self.coords, other.coords)
            and self.spans == other.spans
        )


def get_farthest_pair(
    g: WeightedGraph, tau: int, restarts: int, rng: np.random.Generator
) -> FarthestPair:
    """Alternating farthest-node sweeps from random starts.

    Each restart roots a tree at a random node, jumps to its farthest node,
    and keeps alternating for ``tau`` trees.  Once a sweep returns the node it
    came from the alternation is a fixed point, so the remaining sweeps are
    skipped (their outcome is already known).  The restart with the largest
    distance wins, ties by smallest ``(n_a, n_b)``.
    """
    require_nonempty(g)
    best = None
    best_trees: dict[int, ShortestPathTree] = {}
    for _ in range(restarts):
        a = int(rng.integers(g.node_count))
        trees = {a: shortest_path_tree(g, a)}
        b, d = farthest_node(trees[a])
        for t in range(1, tau):
            root = b if t % 2 else a
            if root not in trees:
                trees[root] = shortest_path_tree(g, root)
            far, d = farthest_node(trees[root])
            if t % 2:
                if far == a:
                    break
                a = far
            else:
                if far == b:
                    break
                b = far
            trees = {k: v for k, v in trees.items() if k in (a, b)}
        key = (-d, a, b)
        if best is None or key < best:
            best = key
            best_trees = {k: v for k, v in trees.items() if k in (a, b)}
    d, a, b = -best[0], best[1], best[2]
    tree_a = best_trees.get(a) or shortest_path_tree(g, a)
    tree_b = best_trees.get(b) or shortest_path_tree(g, b)
    return FarthestPair(a, b, d, tree_a, tree_b)


def build_embedding(g: WeightedGraph, cfg: EmbedConfig, keep_weights: bool = False) -> Embedding:
    require_nonempty(g)
    rng = make_rng(cfg.seed)
    stats = BuildStats()
    work = g
    eps = cfg.epsilon
    columns: list[np.ndarray] = []
    spans: list[DimSpan] = []
    eu, ev = g.edge_u, g.edge_v
    if keep_weights:
        stats.working_weights.append(g.edge_w)

    for _ in range(cfg.k_max):
        fp = get_farthest_pair(work, cfg.tau, cfg.restarts, rng)
        if eps is None:
            eps = RELATIVE_EPSILON * fp.d_ab
        # a zero span yields an all-zero coordinate, so it is never emitted
        if fp.d_ab <= 0 or fp.d_ab < eps:
            break
        da, db = fp.tree_a.dist, fp.tree_b.dist
        reach = np.isfinite(da) & np.isfinite(db)
        coord = np.zeros(g.node_count)
        coord[reach] = (da[reach] + fp.d_ab - db[reach]) / 2
        # the two trees may disagree on d(a,b) in the last ulp
        coord[fp.n_a] = 0.0
        coord[fp.n_b] = fp.d_ab
        columns.append(coord)
        spans.append(DimSpan(fp.n_a, fp.n_b, fp.d_ab))

        residual = work.edge_w - np.abs(coord[eu] - coord[ev])
        if len(residual):
            stats.min_residual = min(stats.min_residual, float(residual.min()))
            neg = residual < 0
            stats.clamps += int(neg.sum())
            residual[neg] = 0.0
        stats.edge_updates += len(residual)
        work = work.with_weights(residual)
        if keep_weights:
            stats.working_weights.append(work.edge_w)
        log.debug("dim %d: pair (%d, %d) span %.6g", len(spans), fp.n_a, fp.n_b, fp.d_ab)

    coords = np.column_stack(columns) if columns else np.zeros((g.node_count, 0))
    coords.setflags(write=False)
    return Embedding(coords, tuple(spans), stats)


def fastmap_heuristic(e: Embedding, x: int, g: int) -> float:
    # summed left to right so that adding a dimension can never lower the value
    h = 0.0
    for a, b in zip(e.coords[x].tolist(), e.coords[g].tolist()):
        h += abs(a - b)
    return h


def write_embedding(e: Embedding, out: TextIO) -> None:
    out.write(f"{EMBED_MAGIC}\n")
    out.write(f"nodes {e.node_count} dims {e.k}\n")
    for s in e.spans:
        out.write(f"span {s.n_a} {s.n_b} {s.d_ab:.17g}\n")
    for row in e.coords.tolist():
        out.write(" ".join(f"{c:.17g}" for c in row))
        out.write("\n")


def read_embedding(src: TextIO) -> Embedding:
    lines = src.read().split("\n")
    if not lines or lines[0].strip() != EMBED_MAGIC:
        raise MalformedHeader(f"expected {EMBED_MAGIC!r}")
    try:
        tag1, n, tag2, k = lines[1].split()
        if (tag1, tag2) != ("nodes", "dims"):
            raise ValueError
        n, k = int(n), int(k)
    except (ValueError, IndexError):
        raise MalformedHeader("expected 'nodes <N> dims <K>'") from None
    if len(lines) < 2 + k + n:
        raise FormatError("embedding file is truncated")
    spans = []
    for line in lines[2:2 + k]:
        parts = line.split()
        if len(parts) != 4 or parts[0] != "span":
            raise FormatError(f"bad span line {line!r}")
        spans.append(DimSpan(int(parts[1]), int(parts[2]), float(parts[3])))
    coords = np.zeros((n, k))
    for i, line in enumerate(lines[2 + k:2 + k + n]):
        vals = line.split()
        if len(vals) != k:
            raise FormatError(f"node {i}: expected {k} coordinates, got {len(vals)}")
        if k:
            coords[i] = [float(x) for x in vals]
    coords.setflags(write=False)
    return Embedding(coords, tuple(spans))


def save_embedding(e: Embedding, path: str | Path) -> None:
    with open(path, "w") as fh:
        write_embedding(e, fh)


def load_embedding(path: str | Path) -> Embedding:
    with open(path) as fh:
        return read_embedding(fh)


def dumps_embedding(e: Embedding) -> str:
    buf = io.StringIO()
    write_embedding(e, buf)
    return buf.getvalue()
