"""``pathlab`` command line: embed, pivots, solve, bench, validate-scen.

Exit codes: 0 success, 1 error, 3 goal unreachable, 4 scenario mismatches.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import BenchConfig, ProviderFactory, run_bench
from .errors import ArtifactMismatch, CellBlocked, PathlabError
from .fastmap import EmbedConfig, build_embedding, load_embedding, save_embedding
from .heuristics import build_differential, load_pivots, parse_heuristic_spec, save_pivots
from .mapio import (
    Neighborhood,
    grid_to_graph,
    load_map,
    load_scenario,
    validate_scenario,
)
from .search import astar

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNREACHABLE = 3
EXIT_SCEN_MISMATCH = 4

log = logging.getLogger("pathlab")


def _cell(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None


def _sweep(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi but got {text!r}") from None


def _load_grid(args):
    m = load_map(args.map, swamp_passable=args.swamp_passable)
    m = m.with_neighborhood(args.neighborhood)
    g, index = grid_to_graph(m)
    log.info("%s: %dx%d, %d nodes, %d edges (%s)", m.name, m.width, m.height,
             g.node_count, g.edge_count, m.neighborhood.value)
    return m, g, index


def _embed_cfg(args, k_max=None) -> EmbedConfig:
    return EmbedConfig(k_max=k_max or args.kmax, epsilon=args.epsilon, tau=args.tau,
                       restarts=args.restarts, seed=args.seed)


def cmd_embed(args) -> int:
    _, g, _ = _load_grid(args)
    e = build_embedding(g, _embed_cfg(args))
    save_embedding(e, args.out)
    print(f"dims {e.k}")
    print("spans " + " ".join(f"{s:.17g}" for s in e.span_sequence()))
    return EXIT_OK


def cmd_pivots(args) -> int:
    _, g, _ = _load_grid(args)
    t = build_differential(g, args.pivots, args.seed)
    save_pivots(t, args.out)
    print("pivots " + " ".join(map(str, t.pivots)))
    return EXIT_OK


def cmd_solve(args) -> int:
    m, g, index = _load_grid(args)
    embedding = load_embedding(args.embedding) if args.embedding else None
    pivots = load_pivots(args.pivot_table) if args.pivot_table else None
    for name, art in (("embedding", embedding), ("pivot table", pivots)):
        if art is not None and art.node_count != g.node_count:
            raise ArtifactMismatch(f"{name} has {art.node_count} nodes, map graph has {g.node_count}")
    for label, (x, y) in (("start", args.start), ("goal", args.goal)):
        if not m.is_passable(x, y):
            raise CellBlocked(f"{label} cell ({x}, {y}) is not passable")

    spec = parse_heuristic_spec(args.heuristic[0] if args.heuristic else "OCT")
    factory = ProviderFactory(g, index, m.neighborhood, _embed_cfg(args), args.seed,
                              embedding=embedding, pivots=pivots)
    h = factory.get(spec)
    res = astar(g, index.node(*args.start), index.node(*args.goal), h)
    print(f"heuristic {spec}")
    print(f"expanded {res.expanded}")
    print(f"generated {res.generated}")
    if res.path is None:
        print("cost inf")
        print("unreachable")
        return EXIT_UNREACHABLE
    print(f"cost {res.cost!r}")
    print("path " + " ".join(f"{x},{y}" for x, y in (index.cell(n) for n in res.path)))
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        instance_count=args.instances,
        seed=args.seed,
        heuristics=tuple(args.heuristic) if args.heuristic else ("FM(10)", "DH(10)", "FM(5)+DH(5)"),
        sweep=args.sweep,
        neighborhood=args.neighborhood,
        equal_memory=args.equal_memory,
        epsilon=args.epsilon,
        tau=args.tau,
        restarts=args.restarts,
    )
    out = Path(args.out) if args.out else None
    for i, path in enumerate(args.map):
        m = load_map(path, swamp_passable=args.swamp_passable)
        report = run_bench(m, cfg)
        text = report.to_csv()
        if out is None:
            sys.stdout.write(text)
        else:
            target = out if len(args.map) == 1 else out.with_name(f"{out.stem}-{m.name}{out.suffix}")
            target.write_text(text)
        print(report.summary(), file=sys.stderr if out is None else sys.stdout)
        if args.swamp_passable:
            print("note: swamp cells treated as passable", file=sys.stderr)
    return EXIT_OK


def cmd_validate_scen(args) -> int:
    m, g, index = _load_grid(args)
    scen = load_scenario(args.scen)
    bad = validate_scenario(scen, m, g, index, tol=args.tol)
    for b in bad:
        print(f"entry {b.index}: {b.reason}: file {b.entry.optimal_cost!r} ours {b.ours!r}")
    print(f"{len(scen.entries) - len(bad)}/{len(scen.entries)} entries match")
    return EXIT_SCEN_MISMATCH if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--neighborhood", choices=[n.value for n in Neighborhood], default="eight")
    common.add_argument("--swamp-passable", action="store_true", help="treat 'S' cells as passable")
    common.add_argument("-v", "--verbose", action="store_true")

    embed_opts = argparse.ArgumentParser(add_help=False)
    embed_opts.add_argument("--kmax", type=int, default=10)
    embed_opts.add_argument("--epsilon", type=float, default=None,
                            help="absolute span cutoff (default: 1e-4 x first span)")
    embed_opts.add_argument("--tau", type=int, default=10)
    embed_opts.add_argument("--restarts", type=int, default=10)

    p = argparse.ArgumentParser(prog="pathlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("embed", parents=[common, embed_opts], help="build a FastMap embedding")
    s.add_argument("--map", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("pivots", parents=[common], help="build a differential-heuristic pivot table")
    s.add_argument("--map", required=True)
    s.add_argument("--pivots", type=int, default=10)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_pivots)

    s = sub.add_parser("solve", parents=[common, embed_opts], help="answer one start/goal query")
    s.add_argument("--map", required=True)
    s.add_argument("--heuristic", action="append")
    s.add_argument("--embedding", help="FASTMAP-EMBED file (otherwise built on the fly)")
    s.add_argument("--pivot-table", help="DIFFH file (otherwise built on the fly)")
    s.add_argument("--start", type=_cell, required=True)
    s.add_argument("--goal", type=_cell, required=True)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("bench", parents=[common, embed_opts], help="run the benchmark protocol")
    s.add_argument("--map", action="append", required=True)
    s.add_argument("--heuristic", action="append")
    s.add_argument("--instances", type=int, default=1000)
    s.add_argument("--sweep", type=_sweep, help="K range lo:hi adding OCT, FM(k), DH(k)")
    s.add_argument("--equal-memory", action="store_true")
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("validate-scen", parents=[common], help="check scenario costs against Dijkstra")
    s.add_argument("--map", required=True)
    s.add_argument("--scen", required=True)
    s.add_argument("--tol", type=float, default=1e-4)
    s.set_defaults(func=cmd_validate_scen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PathlabError, OSError, ValueError) as exc:
        print(f"pathlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
