import json
import math

import numpy as np
import pytest

from lazysp.engine import EngineOptions, run_lazysp, verify_suboptimality
from lazysp.graph import Graph, Query, WeightOracle
from lazysp.search import shortest_path
from lazysp.selectors import SimpleSelector


def simulate_reference(g, q, true, est, kind="forward"):
    """Independent straight-line transcription of the lazy loop (oracle).

    No optimizations, no trace machinery: search, check, select, evaluate.
    """
    lazy = list(est)
    evaluated = set()
    evals = 0
    searches = 0
    while True:
        searches += 1
        res = shortest_path(g, q, lazy)
        if res.path is None or res.length == math.inf:
            return None, evals, searches
        if all(e in evaluated for e in res.path.edges):
            return res, evals, searches
        if kind == "forward":
            selected = [next(e for e in res.path.edges if e not in evaluated)]
        else:
            pos = next(i for i, e in enumerate(res.path.edges) if e not in evaluated)
            frontier = res.path.vertices[pos]
            selected = [eid for eid, _ in g.out_edges[frontier]]
        for e in selected:
            if e not in evaluated:
                evaluated.add(e)
                lazy[e] = true[e]
                evals += 1


class TestEngineBasics:
    def test_three_edge_line_forward(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        true = [1.0, 1.0, 1.0]
        res, trace = run_lazysp(
            g, Query(0, 3), WeightOracle(true), true, SimpleSelector("forward")
        )
        assert res.path.edges == (0, 1, 2)
        assert trace.edges_evaluated == 3
        assert trace.searches == 4
        ref, ref_evals, ref_searches = simulate_reference(g, Query(0, 3), true, true)
        assert (trace.edges_evaluated, trace.searches) == (ref_evals, ref_searches)

    def test_immediate_expansion_skips_searches(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        true = [1.0, 1.0, 1.0]
        res, trace = run_lazysp(
            g,
            Query(0, 3),
            WeightOracle(true),
            true,
            SimpleSelector("forward"),
            EngineOptions(immediate_expansion=True),
        )
        assert res.path.edges == (0, 1, 2)
        assert trace.edges_evaluated == 3
        assert trace.searches == 2  # one initial, one confirming

    def test_all_infinite_truths_on_parallel_routes(self):
        # two one-edge routes, finite estimates: both get evaluated, then the
        # next search proves no finite path remains
        g = Graph(2, [(0, 1), (0, 1)])
        oracle = WeightOracle([math.inf, math.inf])
        res, trace = run_lazysp(
            g, Query(0, 1), oracle, [1.0, 1.0], SimpleSelector("forward")
        )
        assert res.path is None and res.length == math.inf
        assert oracle.evaluation_count == 2

    def test_all_infinite_truths_on_serial_path(self):
        # one 2-edge route: the first infinite evaluation already blocks it
        g = Graph(3, [(0, 1), (1, 2)])
        oracle = WeightOracle([math.inf, math.inf])
        res, trace = run_lazysp(
            g, Query(0, 2), oracle, [1.0, 1.0], SimpleSelector("forward")
        )
        assert res.path is None
        assert oracle.evaluation_count == 1

    def test_infinite_estimates_return_without_evaluation(self):
        g = Graph(3, [(0, 1), (1, 2)])
        oracle = WeightOracle([math.inf, math.inf])
        res, trace = run_lazysp(
            g, Query(0, 2), oracle, [math.inf, math.inf], SimpleSelector("forward")
        )
        assert res.path is None
        assert oracle.evaluation_count == 0
        assert trace.searches == 1

    def test_start_equals_goal(self):
        g = Graph(2, [(0, 1)])
        oracle = WeightOracle([1.0])
        res, trace = run_lazysp(g, Query(0, 0), oracle, [1.0], SimpleSelector("forward"))
        assert res.path.edges == () and res.length == 0.0
        assert oracle.evaluation_count == 0

    def test_selector_returning_evaluated_only_is_error(self):
        class Stubborn:
            name = "stubborn"

            def select(self, ctx):
                return [ctx.candidate.edges[0]]

        g = Graph(3, [(0, 1), (1, 2)])
        oracle = WeightOracle([1.0, 1.0])
        sel = Stubborn()
        # first call evaluates edge 0; second call returns it again: error
        with pytest.raises(ValueError, match="unevaluated"):
            run_lazysp(g, Query(0, 2), oracle, [1.0, 1.0], sel)

    def test_max_iterations_cap(self):
        g = Graph(3, [(0, 1), (1, 2)])
        with pytest.raises(RuntimeError, match="max_iterations"):
            run_lazysp(
                g, Query(0, 2), WeightOracle([1.0, 1.0]), [1.0, 1.0],
                SimpleSelector("forward"), EngineOptions(max_iterations=1),
            )


def random_instance(seed, admissible=True):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 12))
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < min(1.0, 3.2 / n)
    ]
    if not edges:
        edges = [(0, n - 1)]
    g = Graph(n, edges)
    m = g.n_edges
    true = [float(w) for w in rng.uniform(0.5, 2.0, m)]
    for k in rng.choice(m, size=m // 4, replace=False):
        true[int(k)] = math.inf
    if admissible:
        est = [min(t, float(rng.uniform(0.2, 1.0))) for t in true]
    else:
        est = [float(rng.uniform(0.2, 3.0)) for _ in range(m)]
    return g, Query(0, n - 1), true, est


class TestEngineProperties:
    def test_matches_reference_simulation(self):
        for seed in range(40):
            g, q, true, est = random_instance(seed)
            for kind in ("forward", "expand"):
                res, trace = run_lazysp(
                    g, q, WeightOracle(true), est, SimpleSelector(kind)
                )
                ref, ref_evals, ref_searches = simulate_reference(g, q, true, est, kind)
                assert trace.edges_evaluated == ref_evals
                assert trace.searches == ref_searches
                if ref is None:
                    assert res.path is None
                else:
                    assert res.path.edges == ref.path.edges

    def test_returned_path_fully_evaluated_and_counts_match(self):
        for seed in range(30):
            g, q, true, est = random_instance(seed)
            oracle = WeightOracle(true)
            res, trace = run_lazysp(g, q, oracle, est, SimpleSelector("alternate"))
            assert trace.edges_evaluated == oracle.evaluation_count <= g.n_edges
            assert trace.edges_evaluated == len(set(trace.evaluated_edge_order))
            if res.path is not None:
                evaluated = set(trace.evaluated_edge_order)
                assert set(res.path.edges) <= evaluated

    def test_exact_estimates_match_true_dijkstra(self):
        for seed in range(20):
            g, q, true, _ = random_instance(seed)
            base = shortest_path(g, q, true)
            for kind in ("expand", "forward", "reverse", "alternate", "bisection"):
                res, _ = run_lazysp(g, q, WeightOracle(true), true, SimpleSelector(kind))
                assert res.length == base.length

    def test_immediate_expansion_never_changes_forward_results(self):
        for seed in range(20):
            g, q, true, est = random_instance(seed, admissible=False)
            res_a, tr_a = run_lazysp(
                g, q, WeightOracle(true), est, SimpleSelector("forward")
            )
            res_b, tr_b = run_lazysp(
                g, q, WeightOracle(true), est, SimpleSelector("forward"),
                EngineOptions(immediate_expansion=True),
            )
            assert tr_a.evaluated_edge_order == tr_b.evaluated_edge_order
            assert res_a.length == res_b.length
            assert tr_b.searches <= tr_a.searches


class TestVerifySuboptimality:
    def test_exact_optimum_at_epsilon_one(self):
        oracle = WeightOracle([1.0, 1.0])
        g = Graph(3, [(0, 1), (1, 2)])
        res, _ = run_lazysp(g, Query(0, 2), oracle, [1.0, 1.0], SimpleSelector("forward"))
        assert verify_suboptimality(res, oracle, 1.0, 2.0)

    def test_loose_bound_accepts(self):
        oracle = WeightOracle([1.5, 1.5])
        g = Graph(3, [(0, 1), (1, 2)])
        res, _ = run_lazysp(g, Query(0, 2), oracle, [1.0, 1.0], SimpleSelector("forward"))
        assert verify_suboptimality(res, oracle, 2.0, 2.0)  # 3.0 <= 4.0

    def test_flags_violation(self):
        oracle = WeightOracle([1.5, 1.5])
        g = Graph(3, [(0, 1), (1, 2)])
        res, _ = run_lazysp(g, Query(0, 2), oracle, [1.0, 1.0], SimpleSelector("forward"))
        assert not verify_suboptimality(res, oracle, 1.0, 2.0)  # 3.0 > 2.0


class TestTrace:
    def test_jsonl_schema_and_totals(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        true = [1.0, 1.0, math.inf, 4.0]
        res, trace = run_lazysp(
            g, Query(0, 3), WeightOracle(true), [1.0] * 4, SimpleSelector("forward")
        )
        lines = [json.loads(ln) for ln in trace.to_jsonl().splitlines()]
        assert [r["iter"] for r in lines] == list(range(1, len(lines) + 1))
        outcome_total = sum(len(r["outcomes"]) for r in lines)
        assert outcome_total == trace.edges_evaluated
        for r in lines:
            assert set(r) == {"iter", "candidate_edge_ids", "candidate_lazy_length", "selected", "outcomes"}
            for o in r["outcomes"]:
                assert set(o) == {"edge", "weight"}
                assert o["weight"] == "inf" or isinstance(o["weight"], float)

    def test_path_bars_partition_each_candidate(self):
        for seed in range(20):
            rng = np.random.default_rng((3, seed))
            g, q, true, est = random_instance(seed)
            res, trace = run_lazysp(g, q, WeightOracle(true), est, SimpleSelector("bisection"))
            bars = trace.path_bars()
            assert [b.edges for b in bars] == trace.candidate_paths()
            for b in bars:
                total = b.already_evaluated + b.newly_valid + b.newly_invalid + b.unevaluated
                assert total == len(b.edges)

    def test_distinct_candidate_paths_counted_once(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        _, trace = run_lazysp(
            g, Query(0, 3), WeightOracle([1.0, 1.0, 1.0]), [1.0] * 3, SimpleSelector("forward")
        )
        assert len(trace.candidate_paths()) == 1
