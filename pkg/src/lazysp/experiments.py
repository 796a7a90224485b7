"""Problem generators and the benchmark runner.

Two desk-scale problem families: random partially-connected graphs whose
edges flip a coin between a uniform weight and an infinite one, and roadmaps
over low-discrepancy points in the unit square where axis-aligned boxes knock
out colliding edges.  Estimates are admissible by construction in both, so
every run must return an optimal path (or prove none exists); the runner
verifies that per record.
"""

from __future__ import annotations

import csv as _csv
import io
import json
import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .engine import EngineOptions, run_lazysp
from .graph import Graph, ProblemInstance, Query
from .partition import PartitionSelector, ZMatrix, z_init
from .search import distances_from, shortest_path
from .selectors import SELECTOR_KINDS, SIMPLE_KINDS, SimpleSelector
from .weightsamp import EdgeBeliefModel, WeightSampSelector

__all__ = [
    "BenchRecord",
    "PartConnConfig",
    "UnitSquareConfig",
    "gen_partconn",
    "gen_unitsquare",
    "halton",
    "make_selector",
    "records_to_csv",
    "run_bench",
    "segment_intersects_box",
    "summarize",
]

CSV_HEADER = "class,instance,selector,edges_evaluated,length,optimal,search_ms,selector_ms"


def halton(index: int, base: int) -> float:
    """Radical inverse of ``index`` in ``base``; the low-discrepancy point set.

    Index is 1-based: halton(1, 2) == 0.5.
    """
    if index < 1:
        raise ValueError("index must be >= 1")
    if base < 2:
        raise ValueError("base must be >= 2")
    result = 0.0
    f = 1.0 / base
    i = index
    while i > 0:
        result += f * (i % base)
        i //= base
        f /= base
    return result


@dataclass
class PartConnConfig:
    n_vertices: int = 100
    edge_probability: float = 0.05
    p_infinite: float = 0.5
    finite_weight_lo: float = 1.0
    finite_weight_hi: float = 2.0
    estimate: float = 1.0
    n_instances: int = 1000
    beta: float = 2.0
    ws_samples: int = 1000


@dataclass
class UnitSquareConfig:
    n_points: int = 100
    connection_radius: float = 0.15
    n_query_pairs: int = 30
    n_obstacle_fields: int = 30
    boxes_per_field: int = 10
    box_dim_lo: float = 0.1
    box_dim_hi: float = 0.3
    beta: float = 21.0
    ws_samples: int = 1000
    ws_collision_prob: float = 0.1

    @property
    def n_instances(self) -> int:
        return self.n_query_pairs * self.n_obstacle_fields


def gen_partconn(seed, config: PartConnConfig | None = None) -> ProblemInstance:
    """Random partially-connected instance; deterministic per seed.

    Each vertex pair shares an edge with the configured probability; each
    edge is infinite with probability one half, else uniform on [1, 2], with
    a unit estimate.  The query resamples vertex pairs until connected under
    the estimate graph (regenerating the graph in the rare case none is).
    """
    cfg = config or PartConnConfig()
    rng = np.random.default_rng(seed)
    while True:
        n = cfg.n_vertices
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.shape[0]) < cfg.edge_probability
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
        g = Graph(n, edges, directed=False)
        m = g.n_edges
        finite = rng.uniform(cfg.finite_weight_lo, cfg.finite_weight_hi, size=m)
        is_inf = rng.random(m) < cfg.p_infinite
        true = np.where(is_inf, math.inf, finite)
        estimates = [cfg.estimate] * m

        component = _components(g)
        for _ in range(1000):
            start = int(rng.integers(0, n))
            goal = int(rng.integers(0, n))
            if start != goal and component[start] == component[goal]:
                return ProblemInstance(
                    g, Query(start, goal), [float(w) for w in true], estimates
                )
        # No connected pair found (pathologically fragmented graph): redraw.


def _components(g: Graph) -> list[int]:
    comp = [-1] * g.n_vertices
    cid = 0
    for s in range(g.n_vertices):
        if comp[s] >= 0:
            continue
        stack = [s]
        comp[s] = cid
        while stack:
            v = stack.pop()
            for _, u in g.out_edges[v]:
                if comp[u] < 0:
                    comp[u] = cid
                    stack.append(u)
        cid += 1
    return comp


def segment_intersects_box(
    p0: tuple[float, float],
    p1: tuple[float, float],
    lo: tuple[float, float],
    hi: tuple[float, float],
) -> bool:
    """Parametric (slab) clipping test; touching the boundary counts as a hit."""
    t0, t1 = 0.0, 1.0
    for i in (0, 1):
        d = p1[i] - p0[i]
        if d == 0.0:
            if p0[i] < lo[i] or p0[i] > hi[i]:
                return False
        else:
            ta = (lo[i] - p0[i]) / d
            tb = (hi[i] - p0[i]) / d
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
            if t0 > t1:
                return False
    return True


def _halton_roadmap(cfg: UnitSquareConfig) -> tuple[Graph, list[tuple[float, float]], list[float]]:
    points = [(halton(i, 2), halton(i, 3)) for i in range(1, cfg.n_points + 1)]
    edges = []
    lengths = []
    for i in range(cfg.n_points):
        for j in range(i + 1, cfg.n_points):
            d = math.dist(points[i], points[j])
            if d <= cfg.connection_radius:
                edges.append((i, j))
                lengths.append(d)
    return Graph(cfg.n_points, edges, directed=False), points, lengths


_ROADMAP_CACHE: dict[tuple, tuple[Graph, list[tuple[float, float]], list[float]]] = {}


def _roadmap(cfg: UnitSquareConfig):
    key = (cfg.n_points, cfg.connection_radius)
    if key not in _ROADMAP_CACHE:
        _ROADMAP_CACHE[key] = _halton_roadmap(cfg)
    return _ROADMAP_CACHE[key]


def gen_unitsquare(
    query_seed, obstacle_seed, config: UnitSquareConfig | None = None
) -> ProblemInstance:
    """Roadmap instance: fixed low-discrepancy vertices, seeded query and boxes.

    The point set and connectivity are deterministic; the two seeds pick the
    query pair and the obstacle field.  True weight is infinite when the edge
    segment touches any box, else the Euclidean length, which is also the
    estimate.  A query disconnected in the collision-free graph is still a
    valid instance (no-finite-path is a legal outcome); the flag lands in
    ``meta``.
    """
    cfg = config or UnitSquareConfig()
    g, points, lengths = _roadmap(cfg)

    rng_q = np.random.default_rng(query_seed)
    start = int(rng_q.integers(0, cfg.n_points))
    goal = int(rng_q.integers(0, cfg.n_points))
    while goal == start:
        goal = int(rng_q.integers(0, cfg.n_points))

    rng_o = np.random.default_rng(obstacle_seed)
    corners = rng_o.uniform(0.0, 1.0, size=(cfg.boxes_per_field, 2))
    dims = rng_o.uniform(cfg.box_dim_lo, cfg.box_dim_hi, size=(cfg.boxes_per_field, 2))
    # Boxes sit fully inside the square: placing corners over [0, 1-dim]
    # keeps the stated dimensions fully effective as obstacles.
    corners = corners * (1.0 - dims)
    boxes = [
        ((corners[b][0], corners[b][1]), (corners[b][0] + dims[b][0], corners[b][1] + dims[b][1]))
        for b in range(cfg.boxes_per_field)
    ]

    true = []
    for eid, (u, v) in enumerate(g.edges):
        hit = any(segment_intersects_box(points[u], points[v], lo, hi) for lo, hi in boxes)
        true.append(math.inf if hit else lengths[eid])

    inst = ProblemInstance(g, Query(start, goal), true, list(lengths))
    free_ok = distances_from(g, start, inst.true_weights)[goal] < math.inf
    inst.meta["collision_free_connected"] = free_ok
    inst.meta["points"] = points
    return inst


# ---------------------------------------------------------------------------
# Benchmark runner
# ---------------------------------------------------------------------------


@dataclass
class BenchRecord:
    problem_class: str
    instance_id: int
    selector: str
    edges_evaluated: int
    returned_length: float
    is_optimal: bool
    search_ms: float
    selector_ms: float
    eval_count: int

    def csv_row(self, timings: bool = True) -> list[str]:
        length = "inf" if self.returned_length == math.inf else repr(self.returned_length)
        return [
            self.problem_class,
            str(self.instance_id),
            self.selector,
            str(self.edges_evaluated),
            length,
            "true" if self.is_optimal else "false",
            f"{self.search_ms:.3f}" if timings else "",
            f"{self.selector_ms:.3f}" if timings else "",
        ]


def make_selector(
    kind: str,
    instance: ProblemInstance,
    *,
    beta: float | None = None,
    ws_samples: int = 1000,
    ws_collision_prob: float = 0.1,
    ws_model: EdgeBeliefModel | None = None,
    seed=0,
    z0: ZMatrix | None = None,
):
    """Fresh per-run selector of the given kind.

    The sampling selector defaults to a naive independent belief (fixed
    estimate weight, uniform collision probability) unless a model is given;
    the partition selector needs ``beta`` and optionally a precomputed
    estimate-only matrix.
    """
    if kind in SIMPLE_KINDS:
        return SimpleSelector(kind)
    if kind == "weightsamp":
        model = ws_model
        if model is None:
            est = np.asarray(instance.estimates, dtype=float)
            model = EdgeBeliefModel.fixed(est, ws_collision_prob)
        return WeightSampSelector(instance.graph, model, ws_samples, seed)
    if kind == "partition":
        if beta is None:
            raise ValueError("partition selector requires beta")
        return PartitionSelector(instance.graph, instance.estimates, beta, initial=z0)
    raise ValueError(f"unknown selector kind {kind!r}")


def _partconn_ws_model(cfg: PartConnConfig, m: int) -> EdgeBeliefModel:
    # Sampling from the same distribution the generator used.
    return EdgeBeliefModel.uniform(
        m, cfg.finite_weight_lo, cfg.finite_weight_hi, cfg.p_infinite
    )


def _bench_instance(problem_class: str, index: int, seed: int, cfg) -> ProblemInstance:
    if problem_class == "partconn":
        return gen_partconn(np.random.SeedSequence((seed, index)), cfg)
    if problem_class == "unitsquare":
        qi, oi = divmod(index, cfg.n_obstacle_fields)
        return gen_unitsquare(
            np.random.SeedSequence((seed, 1, qi)),
            np.random.SeedSequence((seed, 2, oi)),
            cfg,
        )
    raise ValueError(f"unknown problem class {problem_class!r}")


def _run_instance(args) -> list[BenchRecord]:
    problem_class, index, seed, cfg, selectors, z0 = args
    inst = _bench_instance(problem_class, index, seed, cfg)
    optimal = shortest_path(inst.graph, inst.query, inst.true_weights).length
    records = []
    for sidx, kind in enumerate(selectors):
        if problem_class == "partconn" and kind == "weightsamp":
            ws_model = _partconn_ws_model(cfg, inst.graph.n_edges)
        else:
            ws_model = None
        selector = make_selector(
            kind,
            inst,
            beta=getattr(cfg, "beta", None),
            ws_samples=getattr(cfg, "ws_samples", 1000),
            ws_collision_prob=getattr(cfg, "ws_collision_prob", 0.1),
            ws_model=ws_model,
            seed=(seed, index, sidx),
            z0=z0 if kind == "partition" else None,
        )
        oracle = inst.oracle()
        result, trace = run_lazysp(
            inst.graph, inst.query, oracle, inst.estimates, selector, EngineOptions()
        )
        if result.path is None:
            is_opt = optimal == math.inf
        else:
            is_opt = math.isclose(result.length, optimal, rel_tol=1e-9, abs_tol=1e-12)
        rec = BenchRecord(
            problem_class,
            index,
            kind,
            trace.edges_evaluated,
            result.length,
            is_opt,
            trace.search_ms,
            trace.selector_ms,
            oracle.evaluation_count,
        )
        if rec.edges_evaluated != rec.eval_count:
            raise AssertionError("trace evaluation total diverged from the oracle counter")
        if not rec.is_optimal:
            # both generators build admissible estimates, so anything else is a bug
            raise AssertionError(
                f"{problem_class} instance {index} {kind}: returned "
                f"{result.length}, optimal {optimal}"
            )
        records.append(rec)
    return records


def run_bench(
    problem_class: str,
    selectors: tuple[str, ...] = SELECTOR_KINDS,
    config=None,
    seed: int = 0,
    n_instances: int | None = None,
    jobs: int = 1,
) -> list[BenchRecord]:
    """One engine run per instance and selector; optimality checked per record."""
    for kind in selectors:
        if kind not in SELECTOR_KINDS:
            raise ValueError(f"unknown selector {kind!r}")
    if problem_class == "partconn":
        cfg = config or PartConnConfig()
    elif problem_class == "unitsquare":
        cfg = config or UnitSquareConfig()
    else:
        raise ValueError(f"unknown problem class {problem_class!r}")
    total = n_instances if n_instances is not None else cfg.n_instances

    z0 = None
    if "partition" in selectors and problem_class == "unitsquare":
        # The roadmap and estimates are shared by every instance, so the
        # estimate-only matrix is too.
        g, _, lengths = _roadmap(cfg)
        from .graph import LazyWeightState

        z0 = z_init(g, cfg.beta, LazyWeightState(lengths))

    tasks = [(problem_class, i, seed, cfg, tuple(selectors), z0) for i in range(total)]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            chunks = pool.map(_run_instance, tasks, chunksize=max(1, total // (jobs * 8)))
    else:
        chunks = [_run_instance(t) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    order = {kind: i for i, kind in enumerate(selectors)}
    records.sort(key=lambda r: (r.instance_id, order[r.selector]))
    return records


def summarize(records: list[BenchRecord]) -> dict:
    """Per (class, selector) mean and standard error of edges evaluated."""
    groups: dict[tuple[str, str], list[int]] = {}
    for r in records:
        groups.setdefault((r.problem_class, r.selector), []).append(r.edges_evaluated)
    out: dict = {}
    for (cls, kind), xs in sorted(groups.items()):
        n = len(xs)
        mean = sum(xs) / n
        if n > 1:
            sd = math.sqrt(sum((x - mean) ** 2 for x in xs) / (n - 1))
            stderr = sd / math.sqrt(n)
        else:
            stderr = 0.0
        out.setdefault(cls, {})[kind] = {"mean": mean, "stderr": stderr, "n": n}
    return out


def records_to_csv(records: list[BenchRecord], timings: bool = True) -> str:
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in records:
        writer.writerow(r.csv_row(timings=timings))
    return buf.getvalue()


def summary_to_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"
