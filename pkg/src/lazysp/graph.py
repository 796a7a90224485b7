"""Graph container, weight semantics, and lazy-evaluation bookkeeping.

Vertices and edges use dense integer ids so that per-edge state can live in
flat arrays and the partition-function code can use dense matrices.  Edge
weights are extended nonnegative reals: ``math.inf`` is a first-class weight
meaning "untraversable for finite paths" (e.g. a colliding roadmap edge),
not a missing edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

__all__ = [
    "Graph",
    "GraphFormatError",
    "LazyWeightState",
    "Path",
    "ProblemInstance",
    "Query",
    "WeightOracle",
    "evaluate_edge",
    "lazy_weight",
    "parse_graph_file",
    "path_length",
    "write_graph_file",
]

WeightFn = Callable[[int], float]


class GraphFormatError(ValueError):
    """Raised when a graph file does not follow the text format."""


class Graph:
    """Finite graph with dense integer vertex ids 0..n-1 and edge ids 0..m-1.

    Undirected graphs store a single edge id per edge; the edge appears in the
    adjacency of both endpoints.  Self-loops are rejected.
    """

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]], directed: bool = False):
        if n_vertices < 0:
            raise ValueError("n_vertices must be nonnegative")
        self.n_vertices = n_vertices
        self.directed = bool(directed)
        self.edges: list[tuple[int, int]] = []
        # out_edges[v] = [(edge_id, neighbor)]; for undirected graphs every
        # incident edge is an out-edge of both endpoints.
        self.out_edges: list[list[tuple[int, int]]] = [[] for _ in range(n_vertices)]
        self.in_edges: list[list[tuple[int, int]]] = [[] for _ in range(n_vertices)]
        for u, v in edges:
            self._add_edge(u, v)

    def _add_edge(self, u: int, v: int) -> None:
        if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
            raise ValueError(f"edge ({u},{v}) references an unknown vertex")
        if u == v:
            raise ValueError(f"self-loop at vertex {u} rejected")
        eid = len(self.edges)
        self.edges.append((u, v))
        self.out_edges[u].append((eid, v))
        self.in_edges[v].append((eid, u))
        if not self.directed:
            self.out_edges[v].append((eid, u))
            self.in_edges[u].append((eid, v))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self.edges[eid]

    def has_vertex(self, v: int) -> bool:
        return 0 <= v < self.n_vertices

    def incident_source(self, eid: int, u: int) -> int:
        """Return the endpoint of ``eid`` opposite to ``u``; validates incidence."""
        a, b = self.edges[eid]
        if u == a:
            return b
        if u == b and not self.directed:
            return a
        if u == b and self.directed:
            raise ValueError(f"edge {eid} is directed {a}->{b}, not traversable from {b}")
        raise ValueError(f"vertex {u} is not an endpoint of edge {eid}")

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n_vertices={self.n_vertices}, n_edges={self.n_edges}, {kind})"


class WeightOracle:
    """True-weight source with evaluation accounting.

    The first query of an edge counts as one (expensive) evaluation; repeated
    queries return the stored value without touching the counter.  Values are
    immutable once revealed.
    """

    def __init__(self, true_weights: Sequence[float]):
        ws = [float(w) for w in true_weights]
        for e, w in enumerate(ws):
            if w < 0 or math.isnan(w):
                raise ValueError(f"edge {e}: true weight must lie in [0, +inf], got {w}")
        self._weights = ws
        self._evaluated = [False] * len(ws)
        self.evaluation_count = 0

    @property
    def n_edges(self) -> int:
        return len(self._weights)

    def true_weight(self, eid: int) -> float:
        """Query the true weight of ``eid``, counting the first request."""
        if not self._evaluated[eid]:
            self._evaluated[eid] = True
            self.evaluation_count += 1
        return self._weights[eid]

    def is_evaluated(self, eid: int) -> bool:
        return self._evaluated[eid]

    def peek(self, eid: int) -> float:
        """Read a true weight without evaluation accounting.

        Only for verification and debug assertions (e.g. optimality
        cross-checks); algorithm code must use :meth:`true_weight`.
        """
        return self._weights[eid]

    def peek_all(self) -> list[float]:
        """All true weights, uncounted; verification only."""
        return list(self._weights)


class LazyWeightState:
    """Per-run view combining cheap estimates with revealed true weights.

    ``lazy(e)`` returns the known true weight once ``e`` has been evaluated
    and the estimate otherwise.  The evaluated set only grows within a run.
    """

    def __init__(self, estimates: Sequence[float]):
        est = [float(w) for w in estimates]
        for e, w in enumerate(est):
            if w < 0 or math.isnan(w):
                raise ValueError(f"edge {e}: estimate must lie in [0, +inf], got {w}")
        self.estimates = est
        self.evaluated: set[int] = set()
        self.known: dict[int, float] = {}

    @property
    def n_edges(self) -> int:
        return len(self.estimates)

    def lazy(self, eid: int) -> float:
        known = self.known.get(eid)
        return self.estimates[eid] if known is None else known

    def lazy_weights(self) -> list[float]:
        """Dense snapshot of the current lazy weight view."""
        ws = list(self.estimates)
        for e, w in self.known.items():
            ws[e] = w
        return ws

    def record(self, eid: int, true_weight: float) -> None:
        if eid in self.evaluated:
            if self.known[eid] != true_weight:
                raise ValueError(f"edge {eid} re-recorded with a different weight")
            return
        self.evaluated.add(eid)
        self.known[eid] = true_weight


def lazy_weight(state: LazyWeightState, eid: int) -> float:
    """Lazy weight of ``eid``: known true weight if evaluated, else estimate."""
    return state.lazy(eid)


def evaluate_edge(state: LazyWeightState, oracle: WeightOracle, eid: int) -> float:
    """Reveal the true weight of ``eid`` and record it in ``state``.

    Idempotent: an already-evaluated edge returns its stored value and the
    oracle's counter is untouched.
    """
    if eid in state.evaluated:
        return state.known[eid]
    w = oracle.true_weight(eid)
    state.record(eid, w)
    return w


@dataclass(frozen=True)
class Query:
    start: int
    goal: int

    def validate(self, g: Graph) -> None:
        if not g.has_vertex(self.start):
            raise ValueError(f"start vertex {self.start} not in graph")
        if not g.has_vertex(self.goal):
            raise ValueError(f"goal vertex {self.goal} not in graph")


@dataclass(frozen=True)
class Path:
    """Sequence of adjacent edges; ``vertices`` has one more entry than ``edges``.

    The empty path (single vertex, no edges) is only valid for start == goal
    queries.
    """

    edges: tuple[int, ...]
    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.edges) + 1:
            raise ValueError("vertex sequence must be one longer than edge sequence")
        if not self.vertices:
            raise ValueError("path needs at least one vertex")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def goal(self) -> int:
        return self.vertices[-1]

    def validate(self, g: Graph) -> None:
        for i, eid in enumerate(self.edges):
            u, v = self.vertices[i], self.vertices[i + 1]
            a, b = g.endpoints(eid)
            if (u, v) != (a, b) and (g.directed or (u, v) != (b, a)):
                raise ValueError(f"edge {eid} does not connect {u} -> {v}")


def path_length(p: Path | Sequence[int], weights: WeightFn | Sequence[float]) -> float:
    """Sum of edge weights along a path; any infinite term forces +inf.

    Accepts either a :class:`Path` or a bare edge-id sequence, and either a
    callable or a dense weight array.  The empty path has length 0.
    """
    edges = p.edges if isinstance(p, Path) else p
    get = weights if callable(weights) else weights.__getitem__
    total = 0.0
    for eid in edges:
        w = get(eid)
        if w == math.inf:
            return math.inf
        total += w
    return total


@dataclass
class ProblemInstance:
    """A graph, a query, the expensive truth, and the cheap estimates."""

    graph: Graph
    query: Query
    true_weights: list[float]
    estimates: list[float]
    meta: dict = field(default_factory=dict)

    def oracle(self) -> WeightOracle:
        return WeightOracle(self.true_weights)

    def fresh_state(self) -> LazyWeightState:
        return LazyWeightState(self.estimates)


# ---------------------------------------------------------------------------
# Graph file format
#
#   graph <n_vertices> <n_edges> <directed|undirected>
#   edge <id> <u> <v> <w_est> <w_true>
#
# Weights may be the literal `inf`.  Every tool in the repo parses this with
# the functions below.
# ---------------------------------------------------------------------------


def _parse_weight(token: str, where: str) -> float:
    if token == "inf":
        return math.inf
    try:
        w = float(token)
    except ValueError as exc:
        raise GraphFormatError(f"{where}: bad weight {token!r}") from exc
    if w < 0 or math.isnan(w):
        raise GraphFormatError(f"{where}: weight must lie in [0, +inf], got {token!r}")
    return w


def parse_graph_file(text: str) -> tuple[Graph, list[float], list[float]]:
    """Parse the text format; returns (graph, estimates, true_weights)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "graph":
        raise GraphFormatError(f"bad header line: {lines[0]!r}")
    try:
        n_vertices, n_edges = int(head[1]), int(head[2])
    except ValueError as exc:
        raise GraphFormatError(f"bad header counts: {lines[0]!r}") from exc
    if head[3] not in ("directed", "undirected"):
        raise GraphFormatError(f"bad directedness flag: {head[3]!r}")
    directed = head[3] == "directed"
    if len(lines) - 1 != n_edges:
        raise GraphFormatError(f"header promises {n_edges} edges, file has {len(lines) - 1}")

    pairs: list[tuple[int, int] | None] = [None] * n_edges
    estimates = [0.0] * n_edges
    true_weights = [0.0] * n_edges
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 6 or parts[0] != "edge":
            raise GraphFormatError(f"bad edge line: {ln!r}")
        try:
            eid, u, v = int(parts[1]), int(parts[2]), int(parts[3])
        except ValueError as exc:
            raise GraphFormatError(f"bad edge ids: {ln!r}") from exc
        if not 0 <= eid < n_edges:
            raise GraphFormatError(f"edge id {eid} outside 0..{n_edges - 1}")
        if pairs[eid] is not None:
            raise GraphFormatError(f"duplicate edge id {eid}")
        pairs[eid] = (u, v)
        estimates[eid] = _parse_weight(parts[4], f"edge {eid}")
        true_weights[eid] = _parse_weight(parts[5], f"edge {eid}")

    g = Graph(n_vertices, [p for p in pairs if p is not None], directed=directed)
    return g, estimates, true_weights


def write_graph_file(g: Graph, estimates: Sequence[float], true_weights: Sequence[float]) -> str:
    """Serialize to the text format (inverse of :func:`parse_graph_file`)."""
    if len(estimates) != g.n_edges or len(true_weights) != g.n_edges:
        raise ValueError("weight arrays must cover every edge")

    def fmt(w: float) -> str:
        return "inf" if w == math.inf else repr(float(w))

    kind = "directed" if g.directed else "undirected"
    out = [f"graph {g.n_vertices} {g.n_edges} {kind}"]
    for eid, (u, v) in enumerate(g.edges):
        out.append(f"edge {eid} {u} {v} {fmt(estimates[eid])} {fmt(true_weights[eid])}")
    return "\n".join(out) + "\n"
