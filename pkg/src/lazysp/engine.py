"""The lazy shortest-path main loop with trace recording.

Each iteration searches under the lazy weights, stops when the candidate is
fully evaluated, and otherwise asks the selector which edges to reveal next.
Two optional optimizations: skip the re-search while evaluations only confirm
or improve on the lazy view (``immediate_expansion``), and return straight
away once no finite lazy path remains (``infinite_early_return``).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

from .graph import Graph, LazyWeightState, Path, Query, WeightOracle, path_length
from .search import SearchResult, shortest_path
from .selectors import Selector, SelectorContext

__all__ = [
    "EngineOptions",
    "IterationRecord",
    "RunTrace",
    "run_lazysp",
    "verify_suboptimality",
]


@dataclass
class EngineOptions:
    immediate_expansion: bool = False
    infinite_early_return: bool = True
    max_iterations: int | None = None


@dataclass
class IterationRecord:
    iteration: int
    candidate_edges: tuple[int, ...] | None  # None: the search found no finite path
    candidate_vertices: tuple[int, ...] | None
    candidate_lazy_length: float
    searched: bool  # False when immediate expansion reused the previous candidate
    selected: tuple[int, ...] = ()
    outcomes: list[tuple[int, float]] = field(default_factory=list)


@dataclass
class PathBar:
    """Fig-style per-path breakdown: how the candidate's edges were disposed of."""

    edges: tuple[int, ...]
    already_evaluated: int
    newly_valid: int
    newly_invalid: int
    unevaluated: int


class RunTrace:
    """Ordered record of candidate paths, selections, and evaluation outcomes."""

    def __init__(self) -> None:
        self.records: list[IterationRecord] = []
        self.search_ms = 0.0
        self.selector_ms = 0.0

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def searches(self) -> int:
        return sum(1 for r in self.records if r.searched)

    @property
    def edges_evaluated(self) -> int:
        return sum(len(r.outcomes) for r in self.records)

    @property
    def evaluated_edge_order(self) -> list[int]:
        return [e for r in self.records for e, _ in r.outcomes]

    def candidate_paths(self) -> list[tuple[int, ...]]:
        """Unique candidate edge sequences in first-seen order."""
        seen: list[tuple[int, ...]] = []
        for r in self.records:
            if r.candidate_edges is not None and r.candidate_edges not in seen:
                seen.append(r.candidate_edges)
        return seen

    def path_bars(self) -> list[PathBar]:
        """One stacked-bar entry per unique candidate path, first-seen order.

        already_evaluated counts candidate edges revealed before the path first
        became the candidate; newly valid/invalid count evaluations performed
        while it was the candidate; the rest stayed unevaluated.
        """
        order = self.candidate_paths()
        evaluated_before: dict[tuple[int, ...], set[int]] = {}
        outcomes_during: dict[tuple[int, ...], dict[int, float]] = {p: {} for p in order}
        revealed: set[int] = set()
        for r in self.records:
            p = r.candidate_edges
            if p is not None and p not in evaluated_before:
                evaluated_before[p] = revealed & set(p)
            for e, w in r.outcomes:
                revealed.add(e)
                if p is not None and e in set(p):
                    outcomes_during[p][e] = w
        bars = []
        for p in order:
            prior = evaluated_before[p]
            during = {e: w for e, w in outcomes_during[p].items() if e not in prior}
            valid = sum(1 for w in during.values() if w != math.inf)
            invalid = len(during) - valid
            bars.append(
                PathBar(
                    edges=p,
                    already_evaluated=len(prior),
                    newly_valid=valid,
                    newly_invalid=invalid,
                    unevaluated=len(p) - len(prior) - len(during),
                )
            )
        return bars

    def to_jsonl(self) -> str:
        """Line-oriented JSON log, one iteration per line.

        Infinite values serialize as the string "inf" so the log stays within
        strict JSON.
        """

        def num(x: float):
            return "inf" if x == math.inf else x

        lines = []
        for r in self.records:
            lines.append(
                json.dumps(
                    {
                        "iter": r.iteration,
                        "candidate_edge_ids": list(r.candidate_edges) if r.candidate_edges is not None else None,
                        "candidate_lazy_length": num(r.candidate_lazy_length),
                        "selected": list(r.selected),
                        "outcomes": [{"edge": e, "weight": num(w)} for e, w in r.outcomes],
                    },
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines) + "\n"


def run_lazysp(
    g: Graph,
    q: Query,
    oracle: WeightOracle,
    estimates,
    selector: Selector,
    opts: EngineOptions | None = None,
) -> tuple[SearchResult, RunTrace]:
    """Run the lazy search loop; returns the final result and its trace.

    The returned path, when present, is fully evaluated, so its reported
    length is its true length.  Edges already revealed are never re-requested
    from the oracle.
    """
    opts = opts or EngineOptions()
    q.validate(g)
    state = LazyWeightState(estimates)
    if state.n_edges != g.n_edges:
        raise ValueError("estimates must cover every edge")
    trace = RunTrace()

    iteration = 0
    candidate: SearchResult | None = None
    need_search = True
    while True:
        iteration += 1
        if opts.max_iterations is not None and iteration > opts.max_iterations:
            raise RuntimeError(f"exceeded max_iterations={opts.max_iterations}")

        searched = need_search
        if need_search:
            t0 = time.perf_counter()
            candidate = shortest_path(g, q, state.lazy)
            trace.search_ms += (time.perf_counter() - t0) * 1000.0
        assert candidate is not None

        if candidate.path is None or (opts.infinite_early_return and candidate.length == math.inf):
            trace.records.append(
                IterationRecord(iteration, None, None, math.inf, searched)
            )
            return SearchResult(None, math.inf), trace

        path = candidate.path
        record = IterationRecord(
            iteration, path.edges, path.vertices, candidate.length, searched
        )
        trace.records.append(record)

        if all(e in state.evaluated for e in path.edges):
            return candidate, trace

        t0 = time.perf_counter()
        ctx = SelectorContext(g, q, path, state, iteration)
        selected = list(dict.fromkeys(selector.select(ctx)))
        trace.selector_ms += (time.perf_counter() - t0) * 1000.0
        if not any(e in path.edges and e not in state.evaluated for e in selected):
            raise ValueError(
                f"selector {getattr(selector, 'name', selector)!r} returned no unevaluated "
                "candidate edge; completeness requires at least one"
            )
        record.selected = tuple(selected)

        weights_held = True  # no evaluation came back above the lazy value it had
        for e in selected:
            if e in state.evaluated:
                continue
            before = state.lazy(e)
            w = oracle.true_weight(e)
            state.record(e, w)
            record.outcomes.append((e, w))
            if w > before:
                weights_held = False

        need_search = not (opts.immediate_expansion and weights_held)
        if not need_search and all(e in state.evaluated for e in path.edges):
            # The stale candidate is exhausted; a confirming search must decide.
            need_search = True


def verify_suboptimality(
    result: SearchResult,
    oracle: WeightOracle,
    epsilon: float,
    optimal_length: float,
) -> bool:
    """True iff the returned path is within ``epsilon`` of optimal.

    ``optimal_length`` comes from an exact search on fully revealed true
    weights.  A no-path result is acceptable only when the optimum is +inf.
    """
    if result.path is None:
        return optimal_length == math.inf
    true_len = path_length(result.path, oracle.true_weight)
    if optimal_length == math.inf:
        return True
    # Tiny relative slack: the two sides may sum the same weights in a
    # different association order.
    return true_len <= epsilon * optimal_length * (1.0 + 1e-12)
