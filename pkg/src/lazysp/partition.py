"""Boltzmann path-ensemble edge probabilities via an incremental matrix.

For inverse temperature ``beta`` the ensemble weights every start-goal walk
``p`` by ``exp(-beta * len(p))``.  The all-pairs normalizer

    Z[x, y] = sum over walks x->y of exp(-beta * len(walk))

equals ``(I - A)^-1`` with ``A[x, y] = sum over arcs x->y of exp(-beta * w)``,
finite exactly when the spectral radius of ``A`` is below one.  A single arc
change is a rank-1 perturbation of ``I - A``, so ``Z`` updates with one
vector outer product per arc; that is what makes the selector cheap to run
inside the lazy search loop.

The probability that the ensemble's path crosses edge ``e`` is

    p(e) = 1 - Z_without_e[start, goal] / Z[start, goal],

computed by temporarily removing ``e``'s arc(s) and restoring them.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path as FsPath

import numpy as np

from .graph import Graph, LazyWeightState, Query
from .selectors import SelectorContext

__all__ = [
    "PartitionDivergenceError",
    "PartitionSelector",
    "ZMatrix",
    "graph_signature",
    "load_z_cache",
    "partition_edge_prob",
    "select_partition",
    "store_z_cache",
    "z_init",
    "z_apply",
]


class PartitionDivergenceError(RuntimeError):
    """The walk ensemble has infinite mass; retry with a larger beta."""


class _ProbabilityDrift(RuntimeError):
    """Accumulated update roundoff left a probability outside [0, 1]."""


@dataclass
class ZMatrix:
    beta: float
    values: np.ndarray | None
    divergent: bool = False

    def require_convergent(self) -> np.ndarray:
        if self.divergent or self.values is None:
            raise PartitionDivergenceError(
                f"partition matrix diverged at beta={self.beta}; increase beta"
            )
        return self.values

    def copy(self) -> "ZMatrix":
        vals = None if self.values is None else self.values.copy()
        return ZMatrix(self.beta, vals, self.divergent)


def _insert_arc(values: np.ndarray, beta: float, a: int, b: int, weight: float) -> None:
    """Add one directed arc a->b; raises on ensemble divergence."""
    c = math.exp(-beta * weight) if weight != math.inf else 0.0
    if c == 0.0:
        return
    denom = 1.0 - c * values[b, a]
    if denom <= 0.0:
        raise PartitionDivergenceError(
            f"inserting arc {a}->{b} (weight {weight}, beta {beta}) diverges; increase beta"
        )
    u = values[:, a].copy()
    v = values[b, :].copy()
    values += (c / denom) * np.outer(u, v)


def _remove_arc(
    values: np.ndarray, beta: float, a: int, b: int, weight: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Inverse of :func:`_insert_arc`; never diverges.

    Returns the rank-1 term (coefficient, column, row) it subtracted, so
    callers can read off removed mass without cancellation.
    """
    c = math.exp(-beta * weight) if weight != math.inf else 0.0
    if c == 0.0:
        return 0.0, _EMPTY, _EMPTY
    denom = 1.0 + c * values[b, a]
    u = values[:, a].copy()
    v = values[b, :].copy()
    values -= (c / denom) * np.outer(u, v)
    return c / denom, u, v


_EMPTY = np.zeros(0)


def _edge_arcs(g: Graph, eid: int) -> list[tuple[int, int]]:
    a, b = g.endpoints(eid)
    return [(a, b)] if g.directed else [(a, b), (b, a)]


def z_init(g: Graph, beta: float, state: LazyWeightState) -> ZMatrix:
    """Partition matrix for the whole graph under the current lazy weights.

    Built by inserting arcs one at a time; if any insertion diverges the
    returned matrix carries the divergent flag instead of values.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    values = np.eye(g.n_vertices)
    try:
        for eid in range(g.n_edges):
            w = state.lazy(eid)
            for a, b in _edge_arcs(g, eid):
                _insert_arc(values, beta, a, b, w)
    except PartitionDivergenceError:
        return ZMatrix(beta, None, divergent=True)
    return ZMatrix(beta, values)


def z_apply(Z: ZMatrix, arc: tuple[int, int], new_weight: float, old_weight: float) -> ZMatrix:
    """Re-weight one directed arc in place: removal at the old weight, then
    insertion at the new one.  Infinite weight means the arc is absent."""
    values = Z.require_convergent()
    a, b = arc
    _remove_arc(values, Z.beta, a, b, old_weight)
    _insert_arc(values, Z.beta, a, b, new_weight)
    return Z


def partition_edge_prob(
    Z: ZMatrix, g: Graph, q: Query, eid: int, state: LazyWeightState
) -> float:
    """Probability that the ensemble path uses ``eid``.

    Temporarily removes the edge's arc(s), reads the start-goal mass, and
    restores them.  The removed mass is accumulated from the rank-1 update
    terms themselves: near p = 1 the surviving mass is a vanishing difference
    of much larger numbers, so subtracting matrices would lose it.  An edge
    at infinite lazy weight contributes no mass, so its probability is
    exactly zero.
    """
    values = Z.require_convergent()
    total = values[q.start, q.goal]
    if total <= 0.0:
        raise ValueError("goal carries no ensemble mass from start; p(e) undefined")
    w = state.lazy(eid)
    arcs = _edge_arcs(g, eid)
    removed = 0.0
    for a, b in arcs:
        coef, u, v = _remove_arc(values, Z.beta, a, b, w)
        if u.size:
            removed += coef * u[q.start] * v[q.goal]
    for a, b in reversed(arcs):
        _insert_arc(values, Z.beta, a, b, w)
    p = removed / total
    if p < -1e-6 or p > 1.0 + 1e-3:
        raise _ProbabilityDrift(f"edge probability {p} escaped [0, 1]")
    return min(1.0, max(0.0, p))


def select_partition(
    ctx: SelectorContext, Z: ZMatrix, q: Query, state: LazyWeightState
) -> list[int]:
    """Unevaluated candidate edge with maximal ensemble probability.

    Ties break toward the earliest position along the path; scores within
    1e-12 count as tied since the incremental matrix is only symmetric to
    roundoff.
    """
    best_eid, best_p = -1, -1.0
    for pos in ctx.unevaluated_positions():
        eid = ctx.candidate.edges[pos]
        p = partition_edge_prob(Z, ctx.graph, q, eid, state)
        if p > best_p + 1e-12:
            best_eid, best_p = eid, p
    if best_eid < 0:
        raise ValueError("candidate path is fully evaluated; selector has nothing to pick")
    return [best_eid]


def _dense_z(g: Graph, beta: float, lazy) -> np.ndarray:
    """Fresh partition matrix via one dense solve, with explicit divergence check."""
    n = g.n_vertices
    A = np.zeros((n, n))
    for eid in range(g.n_edges):
        w = lazy(eid)
        if w == math.inf:
            continue
        c = math.exp(-beta * w)
        for a, b in _edge_arcs(g, eid):
            A[a, b] += c
    if n and max(abs(np.linalg.eigvals(A))) >= 1.0:
        raise PartitionDivergenceError(
            f"walk ensemble diverges at beta={beta}; increase beta"
        )
    return np.linalg.inv(np.eye(n) - A)


class PartitionSelector:
    """Engine-facing selector that keeps Z synchronized with the lazy weights.

    The matrix starts from the estimate-only graph (optionally from a cached
    copy) and folds in each newly revealed true weight as a pair of rank-1
    updates before scoring.  Removing an edge that carried nearly all the
    start-goal mass cancels catastrophically, so the matrix is rebuilt from
    scratch periodically and whenever a probability drifts out of range.
    """

    name = "partition"

    _REBUILD_EVERY = 12  # real reweights between precautionary rebuilds

    def __init__(
        self,
        g: Graph,
        estimates,
        beta: float,
        initial: ZMatrix | None = None,
    ):
        self.graph = g
        self.beta = beta
        if initial is not None:
            if initial.beta != beta:
                raise ValueError("cached Z has a different beta")
            self.z = initial.copy()
        else:
            self.z = z_init(g, beta, LazyWeightState(estimates))
        self.z.require_convergent()
        self._estimates = [float(w) for w in estimates]
        self._synced: set[int] = set()
        self._updates_since_rebuild = 0

    def _sync(self, state: LazyWeightState) -> None:
        for eid in sorted(state.evaluated - self._synced):
            old = self._estimates[eid]
            new = state.known[eid]
            if new != old:
                for arc in _edge_arcs(self.graph, eid):
                    z_apply(self.z, arc, new, old)
                self._updates_since_rebuild += 1
            self._synced.add(eid)

    def _rebuild(self, state: LazyWeightState) -> None:
        self.z = ZMatrix(self.beta, _dense_z(self.graph, self.beta, state.lazy))
        self._updates_since_rebuild = 0

    def select(self, ctx: SelectorContext) -> list[int]:
        pending = ctx.unevaluated_positions()
        if len(pending) == 1:
            # argmax over a single option: no need to probe
            return [ctx.candidate.edges[pending[0]]]
        self._sync(ctx.state)
        if self._updates_since_rebuild >= self._REBUILD_EVERY:
            self._rebuild(ctx.state)
        try:
            return select_partition(ctx, self.z, ctx.query, ctx.state)
        except _ProbabilityDrift:
            self._rebuild(ctx.state)
            return select_partition(ctx, self.z, ctx.query, ctx.state)


# ---------------------------------------------------------------------------
# Optional estimate-only Z cache, mirroring offline pre-computation: the
# initial matrix depends only on the graph, the estimates, and beta.
# ---------------------------------------------------------------------------


def graph_signature(g: Graph, estimates) -> str:
    h = hashlib.sha256()
    h.update(f"{g.n_vertices} {g.n_edges} {int(g.directed)}".encode())
    for eid, (u, v) in enumerate(g.edges):
        h.update(f"{eid} {u} {v} {float(estimates[eid])!r}".encode())
    return h.hexdigest()


def _cache_path(path: str | FsPath) -> FsPath:
    p = FsPath(path)
    return p if p.suffix == ".npz" else p.with_name(p.name + ".npz")


def store_z_cache(path: str | FsPath, Z: ZMatrix, signature: str) -> None:
    np.savez_compressed(
        _cache_path(path),
        values=Z.require_convergent(),
        beta=np.array([Z.beta]),
        signature=np.array([signature]),
    )


def load_z_cache(path: str | FsPath, signature: str, beta: float) -> ZMatrix | None:
    """Cached estimate-only Z, or None when absent or keyed differently."""
    p = _cache_path(path)
    if not p.exists():
        return None
    with np.load(p, allow_pickle=False) as data:
        if str(data["signature"][0]) != signature or float(data["beta"][0]) != beta:
            return None
        return ZMatrix(beta, data["values"].copy())
