import math
import statistics

import pytest

from lazysp.engine import run_lazysp
from lazysp.experiments import (
    CSV_HEADER,
    PartConnConfig,
    UnitSquareConfig,
    gen_partconn,
    gen_unitsquare,
    halton,
    make_selector,
    records_to_csv,
    run_bench,
    segment_intersects_box,
    summarize,
)
from lazysp.search import shortest_path
from lazysp.selectors import SimpleSelector


class TestHalton:
    def test_radical_inverse_base2(self):
        assert halton(1, 2) == 0.5
        assert halton(3, 2) == 0.75

    def test_base3(self):
        assert halton(1, 3) == pytest.approx(1 / 3)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            halton(0, 2)
        with pytest.raises(ValueError):
            halton(1, 1)

    def test_values_in_unit_interval(self):
        for i in range(1, 200):
            for base in (2, 3):
                assert 0.0 <= halton(i, base) < 1.0


class TestPartConnGenerator:
    def test_deterministic_per_seed(self):
        a = gen_partconn(123)
        b = gen_partconn(123)
        assert a.graph.edges == b.graph.edges
        assert a.true_weights == b.true_weights
        assert a.query == b.query

    def test_binomial_edge_count(self):
        n_pairs = 100 * 99 // 2
        p = 0.05
        counts = [gen_partconn(s).graph.n_edges for s in range(200)]
        mean = statistics.fmean(counts)
        sigma = math.sqrt(n_pairs * p * (1 - p) / len(counts))
        assert abs(mean - n_pairs * p) <= 3 * sigma

    def test_binomial_infinite_fraction(self):
        fracs = []
        for s in range(120):
            inst = gen_partconn(s)
            ws = inst.true_weights
            fracs.append(sum(1 for w in ws if w == math.inf) / len(ws))
        mean = statistics.fmean(fracs)
        # per-instance sigma ~ sqrt(0.25/m); m ~ 247
        sigma = math.sqrt(0.25 / 247) / math.sqrt(len(fracs))
        assert abs(mean - 0.5) <= 3 * sigma

    def test_estimates_unity_and_query_connected(self):
        inst = gen_partconn(7)
        assert set(inst.estimates) == {1.0}
        assert inst.query.start != inst.query.goal
        assert (
            shortest_path(inst.graph, inst.query, inst.estimates).path is not None
        )

    def test_finite_weights_in_declared_range(self):
        inst = gen_partconn(11)
        finite = [w for w in inst.true_weights if w != math.inf]
        assert all(1.0 <= w <= 2.0 for w in finite)


class TestSegmentBoxIntersection:
    def test_through_center(self):
        assert segment_intersects_box((0, 0), (1, 1), (0.4, 0.4), (0.6, 0.6))

    def test_miss(self):
        assert not segment_intersects_box((0, 0), (1, 0), (0.4, 0.4), (0.6, 0.6))

    def test_touching_counts(self):
        assert segment_intersects_box((0, 0.4), (1, 0.4), (0.4, 0.4), (0.6, 0.6))

    def test_axis_parallel_inside_slab(self):
        assert segment_intersects_box((0.5, 0), (0.5, 1), (0.4, 0.4), (0.6, 0.6))

    def test_fully_inside_box(self):
        assert segment_intersects_box((0.45, 0.45), (0.55, 0.55), (0.4, 0.4), (0.6, 0.6))


class TestUnitSquareGenerator:
    def test_point_set_independent_of_seeds(self):
        a = gen_unitsquare(1, 2)
        b = gen_unitsquare(3, 4)
        assert a.graph.edges == b.graph.edges
        assert a.estimates == b.estimates

    def test_deterministic_per_seed_pair(self):
        a = gen_unitsquare(5, 6)
        b = gen_unitsquare(5, 6)
        assert a.query == b.query and a.true_weights == b.true_weights

    def test_estimates_are_euclidean_and_admissible(self):
        inst = gen_unitsquare(1, 1)
        for est, true in zip(inst.estimates, inst.true_weights):
            assert est <= UnitSquareConfig().connection_radius
            assert true == math.inf or true == est

    def test_zero_obstacles_forward_evaluates_only_path_edges(self):
        cfg = UnitSquareConfig(boxes_per_field=0)
        inst = gen_unitsquare(2, 2, cfg)
        base = shortest_path(inst.graph, inst.query, inst.true_weights)
        res, trace = run_lazysp(
            inst.graph, inst.query, inst.oracle(), inst.estimates, SimpleSelector("forward")
        )
        assert res.length == base.length
        assert trace.edges_evaluated == len(base.path.edges)

    def test_total_blockage_returns_no_path(self):
        cfg = UnitSquareConfig(boxes_per_field=1, box_dim_lo=2.0, box_dim_hi=2.0)
        inst = gen_unitsquare(2, 2, cfg)
        assert all(w == math.inf for w in inst.true_weights)
        res, _ = run_lazysp(
            inst.graph, inst.query, inst.oracle(), inst.estimates, SimpleSelector("forward")
        )
        assert res.path is None

    def test_disconnected_query_still_emitted_with_flag(self):
        cfg = UnitSquareConfig(boxes_per_field=1, box_dim_lo=2.0, box_dim_hi=2.0)
        inst = gen_unitsquare(2, 2, cfg)
        assert inst.meta["collision_free_connected"] is False


class TestRunBench:
    def test_records_shape_and_optimality(self):
        recs = run_bench("partconn", ("forward", "alternate"), n_instances=6, seed=3)
        assert len(recs) == 12
        assert all(r.is_optimal for r in recs)
        assert [r.instance_id for r in recs] == [i for i in range(6) for _ in range(2)]

    def test_csv_format(self):
        recs = run_bench("partconn", ("forward",), n_instances=3, seed=3)
        text = records_to_csv(recs)
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "partconn" and first[2] == "forward"

    def test_csv_timings_can_be_suppressed(self):
        recs = run_bench("partconn", ("forward",), n_instances=2, seed=3)
        a = records_to_csv(recs, timings=False)
        b = records_to_csv(recs, timings=False)
        assert a == b
        for row in a.strip().split("\n")[1:]:
            assert row.endswith(",,")

    def test_deterministic_across_runs_and_jobs(self):
        a = run_bench("partconn", ("forward", "bisection"), n_instances=8, seed=9)
        b = run_bench("partconn", ("forward", "bisection"), n_instances=8, seed=9, jobs=2)
        assert records_to_csv(a, timings=False) == records_to_csv(b, timings=False)

    def test_unitsquare_small_run_all_optimal(self):
        recs = run_bench("unitsquare", ("alternate",), n_instances=8, seed=1)
        assert len(recs) == 8
        assert all(r.is_optimal for r in recs)

    def test_unknown_selector_and_class_rejected(self):
        with pytest.raises(ValueError):
            run_bench("partconn", ("sideways",), n_instances=1)
        with pytest.raises(ValueError):
            run_bench("gridworld", ("forward",), n_instances=1)


class TestSummaries:
    def test_mean_and_stderr_match_reference_oracle(self):
        recs = run_bench("partconn", ("forward", "reverse"), n_instances=10, seed=4)
        summary = summarize(recs)["partconn"]
        for kind in ("forward", "reverse"):
            xs = [r.edges_evaluated for r in recs if r.selector == kind]
            assert summary[kind]["mean"] == pytest.approx(statistics.fmean(xs), abs=1e-12)
            expect_se = statistics.stdev(xs) / math.sqrt(len(xs))
            assert summary[kind]["stderr"] == pytest.approx(expect_se, abs=1e-12)
            assert summary[kind]["n"] == len(xs)

    def test_single_record_stderr_zero(self):
        recs = run_bench("partconn", ("forward",), n_instances=1, seed=4)
        s = summarize(recs)["partconn"]["forward"]
        assert s["stderr"] == 0.0


class TestMakeSelector:
    def test_all_kinds_constructible(self):
        inst = gen_partconn(2)
        for kind in ("expand", "forward", "reverse", "alternate", "bisection"):
            assert make_selector(kind, inst).name == kind
        assert make_selector("weightsamp", inst, ws_samples=8, seed=0).name == "weightsamp"
        assert make_selector("partition", inst, beta=2.0).name == "partition"

    def test_partition_requires_beta(self):
        inst = gen_partconn(2)
        with pytest.raises(ValueError, match="beta"):
            make_selector("partition", inst)

    def test_unknown_kind(self):
        inst = gen_partconn(2)
        with pytest.raises(ValueError):
            make_selector("sideways", inst)
