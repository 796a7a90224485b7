"""Exact shortest-path solver over an arbitrary weight view.

The solver runs a reverse Dijkstra from the goal to get exact remaining
distances, then extracts the minimal path whose vertex id sequence is
lexicographically smallest (ties on the vertex sequence are broken by edge
ids, which matters for parallel edges).  Deterministic tie-breaking keeps
runs reproducible; the enumerator below lists every minimal path for the
differential tests that compare allowable-choice *sets*.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

from .graph import Graph, Path, Query, WeightFn, path_length

__all__ = [
    "SearchResult",
    "all_shortest_paths",
    "distances_from",
    "distances_to_goal",
    "shortest_path",
]


@dataclass(frozen=True)
class SearchResult:
    path: Path | None
    length: float

    @property
    def found(self) -> bool:
        return self.path is not None


def _weight_getter(weights: WeightFn | Sequence[float]):
    return weights if callable(weights) else weights.__getitem__


def distances_to_goal(g: Graph, goal: int, weights: WeightFn | Sequence[float]) -> list[float]:
    """Exact distance from every vertex to ``goal``; +inf when unreachable.

    Infinite-weight edges are never enqueued, so they behave as absent.
    """
    get = _weight_getter(weights)
    dist = [math.inf] * g.n_vertices
    dist[goal] = 0.0
    heap = [(0.0, goal)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for eid, u in g.in_edges[v]:
            w = get(eid)
            if w == math.inf:
                continue
            nd = d + w
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def distances_from(g: Graph, start: int, weights: WeightFn | Sequence[float]) -> list[float]:
    """Exact distance from ``start`` to every vertex; +inf when unreachable."""
    get = _weight_getter(weights)
    dist = [math.inf] * g.n_vertices
    dist[start] = 0.0
    heap = [(0.0, start)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for eid, u in g.out_edges[v]:
            w = get(eid)
            if w == math.inf:
                continue
            nd = d + w
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def _tight_successors(g: Graph, v: int, dist: list[float], get) -> list[tuple[int, int]]:
    """(neighbor, edge) pairs on some minimal path from ``v``, sorted for tie-breaking."""
    out = []
    for eid, u in g.out_edges[v]:
        w = get(eid)
        if w == math.inf:
            continue
        if dist[v] == w + dist[u]:
            out.append((u, eid))
    out.sort()
    return out


def shortest_path(g: Graph, q: Query, weights: WeightFn | Sequence[float]) -> SearchResult:
    """Minimal-length path under ``weights`` with deterministic tie-breaking.

    Among equal-length paths the lexicographically smallest vertex id
    sequence wins (then smallest edge ids).  Returns a no-path result with
    length +inf when every path is infinite.
    """
    q.validate(g)
    get = _weight_getter(weights)
    if q.start == q.goal:
        return SearchResult(Path((), (q.start,)), 0.0)
    dist = distances_to_goal(g, q.goal, weights)
    if dist[q.start] == math.inf:
        return SearchResult(None, math.inf)

    # Depth-first walk over tight edges, smallest (vertex, edge) first: the
    # first complete walk is the lexicographic minimum.  The visited guard
    # excludes zero-weight cycles; backtracking only triggers when they exist.
    vertices = [q.start]
    edges: list[int] = []
    stack = [iter(_tight_successors(g, q.start, dist, get))]
    on_path = {q.start}
    while stack:
        advanced = False
        for u, eid in stack[-1]:
            if u in on_path:
                continue
            vertices.append(u)
            edges.append(eid)
            if u == q.goal:
                p = Path(tuple(edges), tuple(vertices))
                return SearchResult(p, path_length(p, weights))
            on_path.add(u)
            stack.append(iter(_tight_successors(g, u, dist, get)))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if vertices:
                dropped = vertices.pop()
                on_path.discard(dropped)
                if edges:
                    edges.pop()
    raise AssertionError("tight-edge walk failed despite finite start distance")


def all_shortest_paths(g: Graph, q: Query, weights: WeightFn | Sequence[float]) -> set[Path]:
    """Every minimal-length simple path under ``weights``.

    Enumerates acyclic walks over the tight-edge subgraph, which is exactly
    the set of minimal simple paths.  With zero-weight edges the minimal
    non-simple walks are excluded by the cycle guard (documented choice).
    Intended for small graphs; returns the empty set when no finite path
    exists.
    """
    q.validate(g)
    get = _weight_getter(weights)
    if q.start == q.goal:
        return {Path((), (q.start,))}
    dist = distances_to_goal(g, q.goal, weights)
    if dist[q.start] == math.inf:
        return set()

    found: set[Path] = set()
    vertices = [q.start]
    edges: list[int] = []
    on_path = {q.start}

    def walk(v: int) -> None:
        for u, eid in _tight_successors(g, v, dist, get):
            if u in on_path:
                continue
            vertices.append(u)
            edges.append(eid)
            if u == q.goal:
                found.add(Path(tuple(edges), tuple(vertices)))
            else:
                on_path.add(u)
                walk(u)
                on_path.discard(u)
            vertices.pop()
            edges.pop()

    walk(q.start)
    return found
