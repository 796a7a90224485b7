"""Shortest-path search for graphs with expensive edge evaluations.

The package centers on a lazy search loop that plans candidate paths under
cheap weight estimates and only pays for true edge weights that a pluggable
selector picks, plus reopening A* and two-queue lazy weighted A* baselines
with differential equivalence oracles, and a benchmark harness over random
partially-connected graphs and unit-square roadmaps.
"""

from .engine import EngineOptions, RunTrace, run_lazysp, verify_suboptimality
from .graph import (
    Graph,
    LazyWeightState,
    Path,
    ProblemInstance,
    Query,
    WeightOracle,
    evaluate_edge,
    lazy_weight,
    parse_graph_file,
    path_length,
    write_graph_file,
)
from .search import SearchResult, all_shortest_paths, shortest_path
from .selectors import SELECTOR_KINDS, SelectorContext, SimpleSelector, select_simple

__version__ = "0.1.0"

__all__ = [
    "EngineOptions",
    "Graph",
    "LazyWeightState",
    "Path",
    "ProblemInstance",
    "Query",
    "RunTrace",
    "SELECTOR_KINDS",
    "SearchResult",
    "SelectorContext",
    "SimpleSelector",
    "WeightOracle",
    "all_shortest_paths",
    "evaluate_edge",
    "lazy_weight",
    "parse_graph_file",
    "path_length",
    "run_lazysp",
    "select_simple",
    "shortest_path",
    "verify_suboptimality",
    "write_graph_file",
]
