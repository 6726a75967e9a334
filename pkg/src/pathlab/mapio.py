"""MovingAI ``.map`` / ``.scen`` files and grid-to-graph conversion.

Cells are ``(x, y)`` with ``x`` the column and ``y`` the row, as in scenario
files.  Graph nodes are the passable cells numbered in row-major order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import MalformedEntry, MalformedHeader, RowLengthMismatch, UnknownGlyph
from .graph import WeightedGraph, graph_from_arrays, shortest_path_tree

PASSABLE = frozenset(".G")
BLOCKED = frozenset("@OTSW")
SWAMP = "S"
SQRT2 = math.sqrt(2.0)


class Neighborhood(str, Enum):
    FOUR = "four"
    EIGHT = "eight"


@dataclass(frozen=True, eq=False)
class GridMap:
    width: int
    height: int
    passable: np.ndarray  # bool, shape (height, width)
    neighborhood: Neighborhood = Neighborhood.EIGHT
    name: str = ""
    rows: tuple[str, ...] | None = field(default=None, repr=False)  # original glyphs

    def is_passable(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height and bool(self.passable[y, x])

    def with_neighborhood(self, nb: Neighborhood | str) -> "GridMap":
        return replace(self, neighborhood=Neighborhood(nb))

    def crop(self, x0: int, y0: int, width: int, height: int) -> "GridMap":
        sub = np.array(self.passable[y0:y0 + height, x0:x0 + width])
        sub.setflags(write=False)
        h, w = sub.shape
        return GridMap(w, h, sub, self.neighborhood, f"{self.name}[{x0},{y0},{w}x{h}]")


def grid_from_array(passable, neighborhood=Neighborhood.EIGHT, name="") -> GridMap:
    p = np.array(passable, dtype=bool)
    p.setflags(write=False)
    return GridMap(p.shape[1], p.shape[0], p, Neighborhood(neighborhood), name)


def parse_map(text: str, swamp_passable: bool = False, name: str = "") -> GridMap:
    lines = text.splitlines()
    header = {}
    i = 0
    while i < len(lines) and lines[i].strip() != "map":
        parts = lines[i].split()
        if parts:
            if len(parts) != 2:
                raise MalformedHeader(f"line {i + 1}: {lines[i]!r}")
            header[parts[0]] = parts[1]
        i += 1
    if i == len(lines):
        raise MalformedHeader("missing 'map' line")
    if header.get("type") != "octile":
        raise MalformedHeader(f"expected 'type octile', got {header.get('type')!r}")
    try:
        height, width = int(header["height"]), int(header["width"])
    except (KeyError, ValueError):
        raise MalformedHeader("missing or invalid height/width") from None
    if height < 1 or width < 1:
        raise MalformedHeader("map dimensions must be positive")

    rows = lines[i + 1:i + 1 + height]
    if len(rows) != height:
        raise RowLengthMismatch(f"expected {height} rows, found {len(rows)}")
    open_glyphs = PASSABLE | {SWAMP} if swamp_passable else PASSABLE
    passable = np.zeros((height, width), dtype=bool)
    for y, row in enumerate(rows):
        if len(row) != width:
            raise RowLengthMismatch(f"row {y} has {len(row)} glyphs, expected {width}")
        for x, ch in enumerate(row):
            if ch in open_glyphs:
                passable[y, x] = True
            elif ch not in BLOCKED:
                raise UnknownGlyph(f"glyph {ch!r} at ({x}, {y})")
    passable.setflags(write=False)
    return GridMap(width, height, passable, name=name, rows=tuple(rows))


def serialize_map(m: GridMap) -> str:
    if m.rows is not None:
        body = list(m.rows)
    else:
        body = ["".join("." if c else "@" for c in row) for row in m.passable.tolist()]
    return "\n".join(["type octile", f"height {m.height}", f"width {m.width}", "map", *body]) + "\n"


def load_map(path: str | Path, swamp_passable: bool = False) -> GridMap:
    p = Path(path)
    return parse_map(p.read_text(), swamp_passable=swamp_passable, name=p.stem)


@dataclass(frozen=True, eq=False)
class GridIndex:
    """Cell <-> node mapping for a converted grid."""

    node_of: np.ndarray  # (height, width) int, -1 for blocked cells
    cells: tuple[tuple[int, int], ...]

    def node(self, x: int, y: int) -> int:
        h, w = self.node_of.shape
        if not (0 <= x < w and 0 <= y < h):
            return -1
        return int(self.node_of[y, x])

    def cell(self, node: int) -> tuple[int, int]:
        return self.cells[node]


def grid_to_graph(m: GridMap) -> tuple[WeightedGraph, GridIndex]:
    """Cardinal moves cost 1; with EIGHT, diagonals cost sqrt(2) and are only
    allowed when both orthogonally adjacent cells are passable."""
    p = np.asarray(m.passable, dtype=bool)
    node_of = np.full(p.shape, -1, dtype=np.int64)
    ys, xs = np.nonzero(p)  # row-major order
    node_of[ys, xs] = np.arange(len(ys))

    us, vs, ws = [], [], []

    def add(a_mask, sl_a, sl_b, weight):
        a = node_of[sl_a][a_mask]
        b = node_of[sl_b][a_mask]
        us.append(a)
        vs.append(b)
        ws.append(np.full(len(a), weight))

    # right and down neighbours
    add(p[:, :-1] & p[:, 1:], (slice(None), slice(None, -1)), (slice(None), slice(1, None)), 1.0)
    add(p[:-1, :] & p[1:, :], (slice(None, -1), slice(None)), (slice(1, None), slice(None)), 1.0)
    if m.neighborhood == Neighborhood.EIGHT:
        # down-right: (x,y)-(x+1,y+1) needs (x+1,y) and (x,y+1)
        dr = p[:-1, :-1] & p[1:, 1:] & p[:-1, 1:] & p[1:, :-1]
        add(dr, (slice(None, -1), slice(None, -1)), (slice(1, None), slice(1, None)), SQRT2)
        # down-left: (x+1,y)-(x,y+1) needs (x,y) and (x+1,y+1)
        dl = p[:-1, 1:] & p[1:, :-1] & p[:-1, :-1] & p[1:, 1:]
        add(dl, (slice(None, -1), slice(1, None)), (slice(1, None), slice(None, -1)), SQRT2)

    u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    w = np.concatenate(ws) if ws else np.zeros(0)
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    g = graph_from_arrays(len(ys), lo, hi, w)
    node_of.setflags(write=False)
    cells = tuple(zip(xs.tolist(), ys.tolist()))
    return g, GridIndex(node_of, cells)


# --- scenarios -------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioEntry:
    bucket: int
    map_name: str
    width: int
    height: int
    start: tuple[int, int]
    goal: tuple[int, int]
    optimal_cost: float


@dataclass(frozen=True)
class Scenario:
    entries: tuple[ScenarioEntry, ...]
    version: str = "1"


def parse_scenario(text: str) -> Scenario:
    lines = text.splitlines()
    if not lines or not lines[0].strip().startswith("version"):
        raise MalformedHeader("scenario must start with a 'version' line")
    version = lines[0].split()[1] if len(lines[0].split()) > 1 else ""
    if version not in ("1", "1.0"):
        raise MalformedHeader(f"unsupported scenario version {version!r}")
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 9:
            fields = line.split()
        if len(fields) != 9:
            raise MalformedEntry(f"line {lineno}: expected 9 fields, got {len(fields)}")
        try:
            b, name, w, h, sx, sy, gx, gy, opt = fields
            entries.append(ScenarioEntry(
                int(b), name, int(w), int(h), (int(sx), int(sy)), (int(gx), int(gy)), float(opt)
            ))
        except ValueError:
            raise MalformedEntry(f"line {lineno}: {line!r}") from None
    return Scenario(tuple(entries), version)


def serialize_scenario(s: Scenario) -> str:
    out = [f"version {s.version}"]
    for e in s.entries:
        out.append("\t".join(map(str, [
            e.bucket, e.map_name, e.width, e.height, *e.start, *e.goal, f"{e.optimal_cost:.8f}",
        ])))
    return "\n".join(out) + "\n"


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


@dataclass(frozen=True)
class ScenarioMismatch:
    index: int
    entry: ScenarioEntry
    ours: float
    reason: str


def validate_scenario(scen: Scenario, m: GridMap, g: WeightedGraph, index: GridIndex,
                      tol: float = 1e-4, sample: list[int] | None = None) -> list[ScenarioMismatch]:
    """Check entries against our own Dijkstra distances; returns the bad ones."""
    bad = []
    which = range(len(scen.entries)) if sample is None else sample
    tree = None
    for i in which:
        e = scen.entries[i]
        s = index.node(*e.start)
        t = index.node(*e.goal)
        if (e.width, e.height) != (m.width, m.height):
            bad.append(ScenarioMismatch(i, e, math.nan, "map size differs"))
            continue
        if s < 0 or t < 0:
            bad.append(ScenarioMismatch(i, e, math.nan, "cell blocked"))
            continue
        if tree is None or tree.source != s:
            tree = shortest_path_tree(g, s)
        d = float(tree.dist[t])
        if not abs(d - e.optimal_cost) <= tol:
            bad.append(ScenarioMismatch(i, e, d, "optimal cost differs"))
    return bad
