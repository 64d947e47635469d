import math

import pytest
from scipy import stats as sps

from stochvc import (
    BaseGraph,
    CapacityError,
    EdgeSet,
    ParameterError,
    PartialRealization,
    QueryBudgetError,
    QueryModelError,
    QueryOracle,
    Realization,
    SeedSpec,
    ValidationError,
    enumerate_realizations,
    induced_subgraph,
    sample_conditional,
    sample_realization,
    VertexSet,
)

from conftest import brute_min_cover_size


class TestSampling:
    def test_p_one_all_present(self, triangle):
        r = sample_realization(triangle, 1.0, SeedSpec(0))
        assert r.present == 0b111

    def test_p_out_of_range(self, triangle):
        for bad in (0.0, -0.1, 1.5):
            with pytest.raises(ParameterError):
                sample_realization(triangle, bad, SeedSpec(0))

    def test_per_edge_frequency(self, triangle):
        # 1e5 trials, each edge should land at 0.5 +- 0.01.
        seed = SeedSpec(42)
        trials = 100_000
        counts = [0, 0, 0]
        for t in range(trials):
            r = sample_realization(triangle, 0.5, seed, trial=t)
            for e in range(3):
                counts[e] += r.has_edge(e)
        for e in range(3):
            assert abs(counts[e] / trials - 0.5) < 0.01

    def test_determinism_and_stream_independence(self, triangle):
        a = sample_realization(triangle, 0.5, SeedSpec(7, 1), trial=3)
        b = sample_realization(triangle, 0.5, SeedSpec(7, 1), trial=3)
        assert a.present == b.present
        outcomes = {
            sample_realization(triangle, 0.5, SeedSpec(7, s), trial=3).present
            for s in range(40)
        }
        assert len(outcomes) > 1

    def test_restriction_agrees_with_present_bits(self, triangle):
        r = sample_realization(triangle, 0.5, SeedSpec(11), trial=5)
        sub = induced_subgraph(triangle, VertexSet.from_ids(3, [0, 1]))
        view = r.restrict(sub)
        assert view.has_edge(0) == r.has_edge(sub.edge_map[0])


class TestConditionalSampling:
    def test_all_edges_fixed(self, triangle):
        fixed = PartialRealization(triangle.all_edges(), 0b101)
        r = sample_conditional(triangle, 0.5, fixed, SeedSpec(1), trial=9)
        assert r.present == 0b101

    def test_empty_fixed_matches_unconditional(self, triangle):
        empty = PartialRealization(EdgeSet(3, 0), 0)
        for t in range(50):
            assert (
                sample_conditional(triangle, 0.5, empty, SeedSpec(2), t).present
                == sample_realization(triangle, 0.5, SeedSpec(2), t).present
            )

    def test_forced_absent_edge(self, triangle):
        # Edge 0 pinned absent; the other two edges still come up at rate 0.5.
        fixed = PartialRealization(EdgeSet.from_ids(3, [0]), 0)
        seed = SeedSpec(3)
        trials = 100_000
        counts = [0, 0, 0]
        for t in range(trials):
            r = sample_conditional(triangle, 0.5, fixed, seed, t)
            for e in range(3):
                counts[e] += r.has_edge(e)
        assert counts[0] == 0
        for e in (1, 2):
            assert abs(counts[e] / trials - 0.5) < 0.01

    def test_outcomes_outside_fixed_rejected(self):
        with pytest.raises(ValidationError):
            PartialRealization(EdgeSet.from_ids(3, [0]), 0b10)

    def test_marginalized_conditional_matches_unconditional(self, triangle):
        # Draw the fixed outcomes at rate p, then sample conditionally; the
        # composite law over all 8 realizations must match i.i.d. edges
        # (chi-square, generous alpha on a fixed seed).
        p = 0.5
        fixed_edges = EdgeSet.from_ids(3, [0, 2])
        seed = SeedSpec(17)
        outcome_seed = SeedSpec(18)
        trials = 32_000
        counts = [0] * 8
        for t in range(trials):
            u = outcome_seed.uniforms(t, 3)
            outcome_bits = sum(
                1 << e for e in fixed_edges if u[e] < p
            )
            partial = PartialRealization(fixed_edges, outcome_bits)
            r = sample_conditional(triangle, p, partial, seed, t)
            counts[r.present] += 1
        expected = [trials / 8.0] * 8
        result = sps.chisquare(counts, expected)
        assert result.pvalue > 1e-3


class TestEnumeration:
    def test_single_edge_weights(self, single_edge):
        items = list(enumerate_realizations(single_edge, 0.3))
        weights = {r.present: w for r, w in items}
        assert math.isclose(weights[0], 0.7) and math.isclose(weights[1], 0.3)

    def test_weights_sum_to_one(self, triangle):
        total = sum(w for _, w in enumerate_realizations(triangle, 0.37))
        assert abs(total - 1.0) < 1e-12

    def test_empty_graph_single_item(self):
        g = BaseGraph(3, [])
        items = list(enumerate_realizations(g, 0.5))
        assert len(items) == 1 and items[0][1] == 1.0

    def test_capacity_error(self):
        g = BaseGraph(22, [(i, i + 1) for i in range(21)])
        with pytest.raises(CapacityError):
            list(enumerate_realizations(g, 0.5))

    def test_enumeration_matches_monte_carlo(self, triangle):
        # E[min cover size] by enumeration vs sample mean, within 4 SE.
        p = 0.4
        exact = sum(
            w * brute_min_cover_size(triangle, r.present)
            for r, w in enumerate_realizations(triangle, p)
        )
        seed = SeedSpec(23)
        trials = 20_000
        vals = [
            brute_min_cover_size(
                triangle, sample_realization(triangle, p, seed, t).present
            )
            for t in range(trials)
        ]
        mean = sum(vals) / trials
        var = sum((v - mean) ** 2 for v in vals) / (trials - 1)
        se = (var / trials) ** 0.5
        assert abs(mean - exact) < 4 * max(se, 1e-9)


class TestQueryOracle:
    def test_basic_query(self, single_edge):
        r = Realization(single_edge, 0b1)
        oracle = QueryOracle(r, EdgeSet.from_ids(1, [0]), budget=1)
        assert oracle.query(0) is True
        assert oracle.queries_used == 1

    def test_memoized_repeat(self, single_edge):
        r = Realization(single_edge, 0b1)
        oracle = QueryOracle(r, EdgeSet.from_ids(1, [0]), budget=1)
        assert oracle.query(0) is oracle.query(0)
        assert oracle.queries_used == 1

    def test_disallowed_edge(self, triangle):
        r = Realization(triangle, 0b111)
        oracle = QueryOracle(r, EdgeSet.from_ids(3, [0]), budget=3)
        with pytest.raises(QueryModelError):
            oracle.query(1)

    def test_budget_exhausted(self, triangle):
        r = Realization(triangle, 0b111)
        oracle = QueryOracle(r, triangle.all_edges(), budget=1)
        oracle.query(0)
        with pytest.raises(QueryBudgetError):
            oracle.query(1)

    def test_verify_cover_counts_misses(self, triangle):
        r = Realization(triangle, 0b111)
        oracle = QueryOracle(r, triangle.all_edges(), budget=3)
        assert oracle.verify_cover(VertexSet.from_ids(3, [0, 1])) == 0
        assert oracle.verify_cover(VertexSet.from_ids(3, [0])) == 1
        assert oracle.verify_cover(VertexSet(3, 0)) == 3
