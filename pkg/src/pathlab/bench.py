"""Benchmark protocol: random solvable instances, A* per heuristic, median/MAD
of node expansions, win counts and winner-binned breakdowns."""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig, OptimalityMismatch
from .fastmap import EmbedConfig, Embedding, build_embedding, make_rng
from .graph import WeightedGraph, shortest_path_tree
from .heuristics import (
    DifferentialHeuristic,
    FastMapHeuristic,
    HeuristicProvider,
    HeuristicSpec,
    ManhattanHeuristic,
    OctileHeuristic,
    PivotTable,
    ZeroHeuristic,
    build_differential,
    max_combine,
    parse_heuristic_spec,
)
from .mapio import GridIndex, GridMap, Neighborhood, grid_to_graph
from .search import astar

log = logging.getLogger(__name__)

COST_TOL = 1e-9


def median_mad(xs) -> tuple[float, float]:
    xs = list(xs)
    if not xs:
        return math.nan, math.nan
    med = statistics.median(xs)
    return med, statistics.median(abs(x - med) for x in xs)


def costs_agree(a: float, b: float) -> bool:
    return abs(a - b) <= COST_TOL * max(1.0, abs(a), abs(b))


def thread_count(default: int = 1) -> int:
    raw = os.environ.get("PATHLAB_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


class ProviderFactory:
    """Builds providers from specs, sharing one embedding and one pivot table.

    FastMap with K dimensions is the K-prefix of a larger build and greedy
    pivots are a prefix of a longer placement, so the largest FM / DH size
    requested is built once and truncated for the smaller ones.
    """

    def __init__(self, g: WeightedGraph, index: GridIndex | None = None,
                 neighborhood: Neighborhood = Neighborhood.EIGHT,
                 embed_cfg: EmbedConfig | None = None, pivot_seed: int = 0,
                 embedding: Embedding | None = None, pivots: PivotTable | None = None):
        self.g = g
        self.index = index
        self.neighborhood = Neighborhood(neighborhood)
        self.embed_cfg = embed_cfg or EmbedConfig()
        self.pivot_seed = pivot_seed
        self.embedding = embedding
        self.pivots = pivots
        # artifacts handed in from files are never rebuilt
        self._fm_built = math.inf if embedding is not None else 0
        self._dh_built = math.inf if pivots is not None else 0
        self.build_seconds: dict[str, float] = {}

    def prepare(self, specs) -> None:
        leaves = [leaf for s in specs for leaf in s.leaves()]
        k = max((s.size for s in leaves if s.kind == "FM"), default=0)
        p = max((s.size for s in leaves if s.kind == "DH"), default=0)
        if k > self._fm_built:
            cfg = EmbedConfig(k, self.embed_cfg.epsilon, self.embed_cfg.tau,
                              self.embed_cfg.restarts, self.embed_cfg.seed)
            t = time.perf_counter()
            self.embedding = build_embedding(self.g, cfg)
            self.build_seconds["FM"] = time.perf_counter() - t
            self._fm_built = k
            log.info("FastMap K=%d built in %.2fs, spans %s", self.embedding.k,
                     self.build_seconds["FM"], [round(s, 3) for s in self.embedding.span_sequence()])
        if p > self._dh_built:
            t = time.perf_counter()
            self.pivots = build_differential(self.g, p, self.pivot_seed)
            self.build_seconds["DH"] = time.perf_counter() - t
            self._dh_built = p
            log.info("DH P=%d built in %.2fs", p, self.build_seconds["DH"])

    def get(self, spec: HeuristicSpec) -> HeuristicProvider:
        n = self.g.node_count
        if spec.kind == "ZERO":
            return ZeroHeuristic(n)
        if spec.kind in ("OCT", "MAN"):
            if self.index is None:
                raise InvalidConfig(f"{spec} needs grid cell coordinates")
            if spec.kind == "MAN":
                if self.neighborhood != Neighborhood.FOUR:
                    raise InvalidConfig("MAN is only admissible on four-neighbour grids")
                return ManhattanHeuristic(self.index.cells)
            return OctileHeuristic(self.index.cells)
        if spec.kind == "FM":
            self.prepare([spec])
            if self.embedding.k < spec.size:
                log.warning("%s requested but the embedding has only %d dimensions",
                            spec, self.embedding.k)
            return FastMapHeuristic(self.embedding.truncate(spec.size))
        if spec.kind == "DH":
            self.prepare([spec])
            if len(self.pivots.pivots) < spec.size:
                raise InvalidConfig(f"{spec} requested but pivot table has "
                                    f"{len(self.pivots.pivots)} pivots")
            return DifferentialHeuristic(self.pivots.truncate(spec.size))
        return max_combine([self.get(p) for p in spec.parts])


@dataclass
class BenchConfig:
    instance_count: int = 1000
    seed: int = 0
    heuristics: tuple[str, ...] = ("FM(10)", "DH(10)", "FM(5)+DH(5)")
    sweep: tuple[int, int] | None = None  # inclusive K range: adds OCT, FM(k), DH(k)
    neighborhood: Neighborhood | str = Neighborhood.EIGHT
    equal_memory: bool = False
    epsilon: float | None = None
    tau: int = 10
    restarts: int = 10
    threads: int | None = None

    def __post_init__(self):
        if self.instance_count < 1:
            raise InvalidConfig("instance_count must be >= 1")
        self.neighborhood = Neighborhood(self.neighborhood)
        self.specs()  # validates the grammar early
        if self.equal_memory:
            units = {s.memory_units for s in self.specs() if s.memory_units}
            if len(units) > 1:
                raise InvalidConfig(f"equal-memory comparison with differing memory units {sorted(units)}")

    def specs(self) -> list[HeuristicSpec]:
        out = [parse_heuristic_spec(h) for h in self.heuristics]
        if self.sweep:
            lo, hi = self.sweep
            if not 1 <= lo <= hi:
                raise InvalidConfig(f"bad sweep range {self.sweep}")
            extra = [HeuristicSpec("OCT")]
            for k in range(lo, hi + 1):
                extra += [HeuristicSpec("FM", k), HeuristicSpec("DH", k)]
            out += extra
        seen, unique = set(), []
        for s in out:
            if str(s) not in seen:
                seen.add(str(s))
                unique.append(s)
        return unique


@dataclass
class InstanceRow:
    index: int
    start: tuple[int, int]
    goal: tuple[int, int]
    cost: float
    expanded: dict[str, int]
    reopen_attempts: dict[str, int]
    cost_error: dict[str, float] = field(default_factory=dict)  # |A* cost - Dijkstra cost|


@dataclass
class BenchReport:
    map_name: str
    node_count: int
    edge_count: int
    specs: list[str]
    memory_units: dict[str, int]
    rows: list[InstanceRow]
    spans: list[float] = field(default_factory=list)
    build_seconds: dict[str, float] = field(default_factory=dict)
    sweep: tuple[int, int] | None = None

    def expansions(self, spec: str) -> list[int]:
        return [r.expanded[spec] for r in self.rows]

    def aggregates(self) -> dict[str, tuple[float, float]]:
        return {s: median_mad(self.expansions(s)) for s in self.specs}

    def wins(self, specs=None) -> dict[str, int]:
        specs = list(specs or self.specs)
        out = dict.fromkeys(specs, 0)
        for r in self.rows:
            low = min(r.expanded[s] for s in specs)
            for s in specs:
                if r.expanded[s] == low:
                    out[s] += 1
        return out

    def winner_bins(self) -> dict[str, dict] | None:
        """Table-style breakdown for the trio FM(K), DH(K), FM(K/2)+DH(K/2).

        Instances with a unique winner go to that heuristic's bin; instances
        where several heuristics tie go to a separate ``TIES`` bin.
        """
        trio = table_trio(self.specs)
        if trio is None:
            return None
        labels = dict(zip(trio, ("FM-WINS", "DH-WINS", "FM+DH-WINS")))
        members = {lab: [] for lab in (*labels.values(), "TIES")}
        for r in self.rows:
            low = min(r.expanded[s] for s in trio)
            best = [s for s in trio if r.expanded[s] == low]
            members[labels[best[0]] if len(best) == 1 else "TIES"].append(r)
        out = {}
        for lab, rows in members.items():
            out[lab] = {
                "count": len(rows),
                "stats": {s: median_mad([r.expanded[s] for r in rows]) for s in trio},
            }
        return out

    def sweep_wins(self) -> dict[int, dict[str, int]]:
        if not self.sweep:
            return {}
        return {k: self.wins([f"FM({k})", f"DH({k})", "OCT"])
                for k in range(self.sweep[0], self.sweep[1] + 1)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "start_x", "start_y", "goal_x", "goal_y", "cost",
                    *(f"{s}_expanded" for s in self.specs)])
        for r in self.rows:
            w.writerow([r.index, *r.start, *r.goal, repr(r.cost),
                        *(r.expanded[s] for s in self.specs)])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"map {self.map_name}: {self.node_count} nodes, {self.edge_count} edges, "
                 f"{len(self.rows)} instances"]
        if self.spans:
            lines.append("farthest-pair spans: " + ", ".join(f"{s:.6g}" for s in self.spans))
        wins = self.wins()
        lines.append(f"{'heuristic':<16}{'mem':>5}{'median':>12}{'MAD':>12}{'wins':>8}")
        for s, (med, mad) in self.aggregates().items():
            lines.append(f"{s:<16}{self.memory_units[s]:>5}{med:>12g}{mad:>12g}{wins[s]:>8}")
        bins = self.winner_bins()
        if bins:
            lines.append("winner bins (median / MAD):")
            for lab, b in bins.items():
                cells = "  ".join(f"{s} {m:g}/{d:g}" for s, (m, d) in b["stats"].items())
                lines.append(f"  {lab:<11}{b['count']:>5}  {cells}")
        for k, wk in self.sweep_wins().items():
            lines.append(f"K={k:<3} wins " + "  ".join(f"{s} {n}" for s, n in wk.items()))
        return "\n".join(lines)


def table_trio(specs: list[str]):
    if len(specs) != 3:
        return None
    parsed = [parse_heuristic_spec(s) for s in specs]
    fm = [s for s in parsed if s.kind == "FM"]
    dh = [s for s in parsed if s.kind == "DH"]
    mx = [s for s in parsed if s.kind == "MAX"]
    if not (len(fm) == len(dh) == len(mx) == 1):
        return None
    k = fm[0].size
    parts = sorted((p.kind, p.size) for p in mx[0].parts)
    if dh[0].size != k or k % 2 or parts != [("DH", k // 2), ("FM", k // 2)]:
        return None
    return str(fm[0]), str(dh[0]), str(mx[0])


def sample_instances(g: WeightedGraph, count: int, seed: int) -> list[tuple[int, int]]:
    """Uniform start/goal pairs, redrawn until the two are distinct and connected."""
    rng = make_rng(seed)
    n = g.node_count
    labels = g.components()
    if n == 1:
        return [(0, 0)] * count
    sizes = np.bincount(labels)
    if sizes.max() < 2:
        raise InvalidConfig("no connected pair of distinct nodes to sample")
    out = []
    while len(out) < count:
        s, t = (int(x) for x in rng.integers(n, size=2))
        if s != t and labels[s] == labels[t]:
            out.append((s, t))
    return out


def run_bench(m: GridMap, cfg: BenchConfig, factory: ProviderFactory | None = None) -> BenchReport:
    m = m.with_neighborhood(cfg.neighborhood)
    g, index = grid_to_graph(m)
    specs = cfg.specs()
    if factory is None:
        factory = ProviderFactory(
            g, index, cfg.neighborhood,
            EmbedConfig(k_max=1, epsilon=cfg.epsilon, tau=cfg.tau, restarts=cfg.restarts, seed=cfg.seed),
            pivot_seed=cfg.seed,
        )
    factory.prepare(specs)
    providers = {str(s): factory.get(s) for s in specs}
    names = list(providers)
    g.adjacency  # built once before any worker thread touches it

    pairs = sample_instances(g, cfg.instance_count, cfg.seed)

    def solve(i: int) -> InstanceRow:
        s, t = pairs[i]
        ref = float(shortest_path_tree(g, s).dist[t])
        expanded, reopen, err = {}, {}, {}
        for name, h in providers.items():
            res = astar(g, s, t, h)
            if not costs_agree(res.cost, ref):
                raise OptimalityMismatch(
                    f"instance {i} {index.cell(s)}->{index.cell(t)}: {name} cost {res.cost!r} "
                    f"!= Dijkstra {ref!r}"
                )
            expanded[name] = res.expanded
            reopen[name] = res.reopen_attempts
            err[name] = abs(res.cost - ref)
        return InstanceRow(i, index.cell(s), index.cell(t), ref, expanded, reopen, err)

    workers = cfg.threads or thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(solve, range(len(pairs))))
    else:
        rows = [solve(i) for i in range(len(pairs))]

    return BenchReport(
        map_name=m.name,
        node_count=g.node_count,
        edge_count=g.edge_count,
        specs=names,
        memory_units={k: p.memory_units for k, p in providers.items()},
        rows=rows,
        spans=factory.embedding.span_sequence() if factory.embedding is not None else [],
        build_seconds=dict(factory.build_seconds),
        sweep=cfg.sweep,
    )
