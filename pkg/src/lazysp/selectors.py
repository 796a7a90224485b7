"""The five simple edge selectors: Expand, Forward, Reverse, Alternate, Bisection.

A selector looks at the current candidate path and picks which edge(s) to
evaluate next.  Completeness only needs the returned set to contain at least
one unevaluated candidate edge; which one is pure strategy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .graph import Graph, LazyWeightState, Path, Query

__all__ = [
    "SELECTOR_KINDS",
    "SIMPLE_KINDS",
    "Selector",
    "SelectorContext",
    "SimpleSelector",
    "select_simple",
]

SIMPLE_KINDS = ("expand", "forward", "reverse", "alternate", "bisection")
# Full CLI vocabulary; weightsamp/partition live in their own modules.
SELECTOR_KINDS = SIMPLE_KINDS + ("weightsamp", "partition")


@dataclass
class SelectorContext:
    """What a selector may look at when choosing edges.

    ``iteration`` is 1-based; Alternate's parity depends on it.  The candidate
    is guaranteed to contain at least one unevaluated edge.
    """

    graph: Graph
    query: Query
    candidate: Path
    state: LazyWeightState
    iteration: int

    def is_evaluated(self, eid: int) -> bool:
        return eid in self.state.evaluated

    def unevaluated_positions(self) -> list[int]:
        return [i for i, e in enumerate(self.candidate.edges) if not self.is_evaluated(e)]


class Selector(Protocol):
    name: str

    def select(self, ctx: SelectorContext) -> list[int]: ...


def _first_unevaluated(ctx: SelectorContext) -> int:
    for i, e in enumerate(ctx.candidate.edges):
        if not ctx.is_evaluated(e):
            return i
    raise ValueError("candidate path is fully evaluated; selector has nothing to pick")


def _last_unevaluated(ctx: SelectorContext) -> int:
    for i in range(len(ctx.candidate.edges) - 1, -1, -1):
        if not ctx.is_evaluated(ctx.candidate.edges[i]):
            return i
    raise ValueError("candidate path is fully evaluated; selector has nothing to pick")


def _bisection_position(ctx: SelectorContext) -> int:
    """Unevaluated position furthest from the nearest evaluated candidate edge.

    Distance counts path positions.  Virtual evaluated sentinels sit just
    before the first and after the last edge, so on a fresh path the middle
    edge wins.  Ties go to the earliest position.
    """
    edges = ctx.candidate.edges
    n = len(edges)
    marks = [-1, n] + [i for i in range(n) if ctx.is_evaluated(edges[i])]
    best_pos, best_dist = -1, -1
    for i in range(n):
        if ctx.is_evaluated(edges[i]):
            continue
        d = min(abs(i - j) for j in marks)
        if d > best_dist:
            best_pos, best_dist = i, d
    if best_pos < 0:
        raise ValueError("candidate path is fully evaluated; selector has nothing to pick")
    return best_pos


def select_simple(kind: str, ctx: SelectorContext) -> list[int]:
    """Run one of the five simple selectors; returns edge ids to evaluate.

    Expand returns every out-edge of the frontier vertex (all incident edges
    on undirected graphs); the others return a single candidate-path edge.
    """
    if kind == "forward":
        return [ctx.candidate.edges[_first_unevaluated(ctx)]]
    if kind == "reverse":
        return [ctx.candidate.edges[_last_unevaluated(ctx)]]
    if kind == "alternate":
        pos = _first_unevaluated(ctx) if ctx.iteration % 2 == 1 else _last_unevaluated(ctx)
        return [ctx.candidate.edges[pos]]
    if kind == "bisection":
        return [ctx.candidate.edges[_bisection_position(ctx)]]
    if kind == "expand":
        pos = _first_unevaluated(ctx)
        frontier = ctx.candidate.vertices[pos]
        return [eid for eid, _ in ctx.graph.out_edges[frontier]]
    raise ValueError(f"unknown simple selector kind {kind!r}")


class SimpleSelector:
    """Engine-facing wrapper around :func:`select_simple`."""

    def __init__(self, kind: str):
        if kind not in SIMPLE_KINDS:
            raise ValueError(f"unknown simple selector kind {kind!r}")
        self.name = kind

    def select(self, ctx: SelectorContext) -> list[int]:
        return select_simple(self.name, ctx)
