"""FastMap embeddings, differential heuristics and A* benchmarking on graphs and grid maps."""

from .bench import BenchConfig, BenchReport, median_mad, run_bench
from .fastmap import EmbedConfig, Embedding, build_embedding, fastmap_heuristic, get_farthest_pair
from .graph import WeightedGraph, build_graph, farthest_node, shortest_path_tree
from .heuristics import (
    DifferentialHeuristic,
    FastMapHeuristic,
    ManhattanHeuristic,
    OctileHeuristic,
    PivotTable,
    ZeroHeuristic,
    build_differential,
    differential_heuristic,
    manhattan_heuristic,
    max_combine,
    octile_heuristic,
    parse_heuristic_spec,
)
from .mapio import GridMap, Neighborhood, grid_to_graph, load_map, load_scenario, parse_map, parse_scenario
from .search import SearchResult, astar, dijkstra_baseline

__version__ = "0.1.0"
