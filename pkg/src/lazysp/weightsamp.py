"""Monte Carlo edge-indicator probabilities from sampled weight functions.

Each sample draws a full weight function from a per-edge independent belief
(collide with some probability, otherwise a weight from a simple rule), pins
every already-evaluated edge to its known true weight, and solves the
shortest-path problem.  The fraction of finite-path samples whose solution
crosses an edge estimates that edge's probability of lying on the true
shortest path.

Sampling cost is dominated by the per-sample searches, so when the graph has
no parallel edges the solver batch-runs all samples as disjoint blocks of one
sparse Dijkstra call.  Graphs with parallel edges fall back to the canonical
solver per sample, which also pins down tie-breaking exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .graph import Graph, LazyWeightState, Query
from .search import shortest_path
from .selectors import SelectorContext

__all__ = [
    "EdgeBeliefModel",
    "IndicatorEstimate",
    "NoFiniteSampleError",
    "WeightSampSelector",
    "sample_indicator",
    "select_weightsamp",
]


class NoFiniteSampleError(RuntimeError):
    """Every sampled world lacked a finite path: the belief is over-constrained."""


@dataclass
class EdgeBeliefModel:
    """Independent per-edge belief: collide w.p. ``collision_prob[e]``, else a
    weight uniform on [valid_lo[e], valid_hi[e]] (equal bounds pin it)."""

    collision_prob: np.ndarray
    valid_lo: np.ndarray
    valid_hi: np.ndarray

    def __post_init__(self) -> None:
        self.collision_prob = np.asarray(self.collision_prob, dtype=float)
        self.valid_lo = np.asarray(self.valid_lo, dtype=float)
        self.valid_hi = np.asarray(self.valid_hi, dtype=float)
        if not (self.collision_prob.shape == self.valid_lo.shape == self.valid_hi.shape):
            raise ValueError("model arrays must share one entry per edge")
        if np.any((self.collision_prob < 0) | (self.collision_prob > 1)):
            raise ValueError("collision probabilities must lie in [0, 1]")
        if np.any(self.valid_lo > self.valid_hi) or np.any(self.valid_lo < 0):
            raise ValueError("valid-weight bounds must satisfy 0 <= lo <= hi")
        # an edge believed always blocked is written lo == hi == inf;
        # a finite lo with an infinite hi has no sampling rule
        if np.any(np.isfinite(self.valid_lo) & ~np.isfinite(self.valid_hi)):
            raise ValueError("finite lower bound requires a finite upper bound")

    @property
    def n_edges(self) -> int:
        return self.collision_prob.shape[0]

    @classmethod
    def fixed(cls, weights, collision_prob: float | np.ndarray) -> "EdgeBeliefModel":
        w = np.asarray(weights, dtype=float)
        p = np.broadcast_to(np.asarray(collision_prob, dtype=float), w.shape).copy()
        return cls(p, w.copy(), w.copy())

    @classmethod
    def uniform(cls, n_edges: int, lo: float, hi: float, collision_prob: float) -> "EdgeBeliefModel":
        return cls(
            np.full(n_edges, float(collision_prob)),
            np.full(n_edges, float(lo)),
            np.full(n_edges, float(hi)),
        )


@dataclass
class IndicatorEstimate:
    p: np.ndarray
    n_samples: int
    n_finite: int


def _draw_worlds(
    model: EdgeBeliefModel, state: LazyWeightState, n_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """(n_samples, n_edges) weight matrix, evaluated edges pinned to truth."""
    m = model.n_edges
    blocked = rng.random((n_samples, m)) < model.collision_prob
    always_inf = ~np.isfinite(model.valid_lo)
    lo = np.where(always_inf, 0.0, model.valid_lo)
    span = np.where(always_inf, 0.0, model.valid_hi) - lo
    weights = lo + rng.random((n_samples, m)) * span
    weights[:, always_inf] = math.inf
    weights[blocked] = math.inf
    for eid in state.evaluated:
        weights[:, eid] = state.known[eid]
    return weights


class _BlockSolver:
    """Shortest paths for many sampled worlds in one sparse Dijkstra call.

    The worlds share the graph structure, so the CSR pattern of the
    block-diagonal matrix is fixed; only the data vector changes per call.
    Requires a graph without parallel edges.
    """

    def __init__(self, g: Graph):
        if g.n_vertices == 0:
            raise ValueError("empty graph")
        pairs = {}
        for eid, (u, v) in enumerate(g.edges):
            key = (u, v) if g.directed else (min(u, v), max(u, v))
            if key in pairs:
                raise ValueError("parallel edges: block solver unavailable")
            pairs[key] = eid
        coo = sorted((u, v, eid) for (u, v), eid in pairs.items())
        self.graph = g
        self.n = g.n_vertices
        self.row = np.array([u for u, _, _ in coo], dtype=np.int32)
        self.col = np.array([v for _, v, _ in coo], dtype=np.int32)
        self.edge_order = np.array([e for _, _, e in coo], dtype=np.int64)
        self.pair_to_edge = {(u, v): e for u, v, e in coo}
        if not g.directed:
            self.pair_to_edge.update({(v, u): e for u, v, e in coo})
        self._template: tuple[int, np.ndarray, np.ndarray] | None = None

    def _structure(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """CSR indices/indptr of the k-block matrix; the sparsity pattern is
        fixed, so only the data vector changes between calls."""
        if self._template is not None and self._template[0] == k:
            return self._template[1], self._template[2]
        n = self.n
        # entries are pre-sorted by (row, col), so they already sit in
        # canonical CSR order and data slots align with edge_order
        counts = np.bincount(self.row, minlength=n)
        indptr = np.concatenate([[0], np.tile(counts, k)]).cumsum()
        offsets = (np.arange(k, dtype=np.int64) * n)[:, None]
        indices = (self.col[None, :].astype(np.int64) + offsets).ravel()
        idx_dtype = np.int32 if k * n < 2**31 else np.int64
        indices = indices.astype(idx_dtype)
        indptr = indptr.astype(idx_dtype)
        self._template = (k, indices, indptr)
        return indices, indptr

    def tally(
        self, q: Query, worlds: np.ndarray, counts: np.ndarray
    ) -> int:
        """Add each finite-path sample's edges into ``counts``; returns how
        many samples had a finite path."""
        k = worlds.shape[0]
        n, g = self.n, self.graph
        indices, indptr = self._structure(k)
        data = worlds[:, self.edge_order].ravel()
        mat = sp.csr_matrix((data, indices, indptr), shape=(k * n, k * n))
        starts = q.start + np.arange(k, dtype=np.int64) * n
        dist, pred, _ = _csgraph_dijkstra(
            mat,
            directed=g.directed,
            indices=starts,
            min_only=True,
            return_predecessors=True,
        )
        n_finite = 0
        for s in range(k):
            off = s * n
            t = off + q.goal
            if not math.isfinite(dist[t]):
                continue
            n_finite += 1
            while t != off + q.start:
                pv = pred[t]
                counts[self.pair_to_edge[(pv - off, t - off)]] += 1
                t = pv
        return n_finite


def _tally_exact(
    g: Graph, q: Query, worlds: np.ndarray, counts: np.ndarray
) -> int:
    n_finite = 0
    for s in range(worlds.shape[0]):
        res = shortest_path(g, q, worlds[s])
        if res.path is None:
            continue
        n_finite += 1
        for eid in res.path.edges:
            counts[eid] += 1
    return n_finite


def sample_indicator(
    g: Graph,
    q: Query,
    state: LazyWeightState,
    model: EdgeBeliefModel,
    n_samples: int,
    seed,
    solver: "_BlockSolver | None" = None,
) -> IndicatorEstimate:
    """Edge membership frequencies over sampled worlds with a finite path.

    Deterministic for a given seed.  Raises :class:`NoFiniteSampleError` when
    no sample admits a finite path.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if model.n_edges != g.n_edges:
        raise ValueError("model must cover every edge")
    rng = np.random.default_rng(seed)
    worlds = _draw_worlds(model, state, n_samples, rng)
    counts = np.zeros(g.n_edges, dtype=np.int64)
    if solver is None:
        try:
            solver = _BlockSolver(g)
        except ValueError:
            solver = None
    if solver is not None:
        n_finite = solver.tally(q, worlds, counts)
    else:
        n_finite = _tally_exact(g, q, worlds, counts)
    if n_finite == 0:
        raise NoFiniteSampleError(
            "no sampled world admits a finite path; belief is over-constrained"
        )
    return IndicatorEstimate(counts / n_finite, n_samples, n_finite)


def select_weightsamp(ctx: SelectorContext, est: IndicatorEstimate) -> list[int]:
    """Unevaluated candidate edge with maximal sampled probability; ties go to
    the earliest position along the path."""
    best_eid, best_p = -1, -1.0
    for pos in ctx.unevaluated_positions():
        eid = ctx.candidate.edges[pos]
        p = float(est.p[eid])
        if p > best_p:
            best_eid, best_p = eid, p
    if best_eid < 0:
        raise ValueError("candidate path is fully evaluated; selector has nothing to pick")
    return [best_eid]


class WeightSampSelector:
    """Engine-facing wrapper: fresh samples each iteration, seeded per iteration."""

    name = "weightsamp"

    def __init__(self, g: Graph, model: EdgeBeliefModel, n_samples: int, seed):
        self.model = model
        self.n_samples = n_samples
        self._entropy = tuple(seed) if isinstance(seed, (tuple, list)) else (int(seed),)
        try:
            self._solver: _BlockSolver | None = _BlockSolver(g)
        except ValueError:
            self._solver = None

    def select(self, ctx: SelectorContext) -> list[int]:
        pending = ctx.unevaluated_positions()
        if len(pending) == 1:
            # argmax over a single option: no need to sample
            return [ctx.candidate.edges[pending[0]]]
        seed = np.random.SeedSequence(self._entropy + (ctx.iteration,))
        try:
            est = sample_indicator(
                ctx.graph, ctx.query, ctx.state, self.model,
                self.n_samples, seed, solver=self._solver,
            )
        except NoFiniteSampleError:
            # Over-constrained belief: any unevaluated candidate edge keeps the
            # run complete and optimal, so fall back to the first one.
            return [ctx.candidate.edges[pending[0]]]
        return select_weightsamp(ctx, est)
