import math

import pytest

from stochvc import (
    BaseGraph,
    ContractError,
    MembershipBands,
    ParameterError,
    PartialRealization,
    Realization,
    SeedContext,
    SeedEstimatorConfig,
    SeedParams,
    SeedSpec,
    VertexSet,
    cover_statistics,
    decided_set,
    enumerate_realizations,
    heavy_set,
    induced_subgraph,
    mvc_exact,
    partition_by_membership,
    planted_seed_instance,
    problematic_set,
    sample_realization,
    undecided_set,
    vertex_seed,
)

from conftest import full_realization, vset


def build_planted_context(pad_pairs=0, seed=7, trials=2000, delta=None):
    """Planted hub instance with the threshold overridden to its hub degree."""
    g = planted_seed_instance(spokes=2, pad_pairs=pad_pairs)
    params = SeedParams(0.1, 0.5, g.n, gamma=2.0 / 3.0, delta=delta)  # threshold 3
    ctx = SeedContext.build(
        g, 0.5, params, SeedSpec(seed), seed_config=SeedEstimatorConfig(trials=trials)
    )
    return g, params, ctx


class TestSeedParams:
    def test_canonical_derivation(self):
        params = SeedParams(0.2, 0.5, 100)
        assert params.delta == 0.2**2
        assert params.gamma == 0.2**5 / 1e3
        assert params.is_canonical
        assert params.degree_threshold == 1.0 / (0.5 * params.gamma)
        assert params.query_budget == math.ceil(2e3 * 100 / (0.2**5 * 0.5))

    def test_epsilon_range(self):
        for bad in (0.0, 0.25, 0.4, -0.1):
            with pytest.raises(ParameterError):
                SeedParams(bad, 0.5, 10)

    def test_overrides_flagged(self):
        params = SeedParams(0.2, 0.5, 10, gamma=0.5)
        assert not params.is_canonical
        assert params.degree_threshold == 4.0


class TestPartition:
    def test_three_bands(self):
        bands = partition_by_membership([1.0, 0.0, 0.5], 0.1)
        assert bands.high.to_list() == [0]
        assert bands.low.to_list() == [1]
        assert bands.mid.to_list() == [2]

    def test_all_zero_goes_low(self):
        bands = partition_by_membership([0.0] * 4, 0.1)
        assert bands.low.size() == 4

    def test_boundaries_inclusive(self):
        eps = 0.1
        bands = partition_by_membership([eps, 1 - 2 * eps], eps)
        assert 0 in bands.low
        assert 1 in bands.high

    def test_bands_partition_everything(self):
        c = [0.0, 0.05, 0.3, 0.61, 0.79, 0.8, 1.0]
        bands = partition_by_membership(c, 0.1)
        union = bands.high | bands.mid | bands.low
        assert union.size() == len(c)
        assert (bands.high & bands.mid).size() == 0
        assert (bands.high & bands.low).size() == 0
        assert (bands.mid & bands.low).size() == 0

    def test_epsilon_and_prob_validation(self):
        with pytest.raises(ParameterError):
            partition_by_membership([0.5], 0.3)
        with pytest.raises(ParameterError):
            partition_by_membership([1.5], 0.1)


class TestDecided:
    def test_empty_queue(self, triangle):
        r = full_realization(triangle)
        vc = vset(triangle, [0, 1])
        assert decided_set([], r, vc).size() == 0

    def test_queued_inside_cover_decides_nothing(self, triangle):
        r = full_realization(triangle)
        vc = vset(triangle, [0, 1])
        assert decided_set([0], r, vc).size() == 0

    def test_star_center_out_of_cover_decides_leaves(self):
        g = BaseGraph(4, [(0, 1), (0, 2), (0, 3)])
        r = full_realization(g)
        vc = vset(g, [1, 2, 3])
        assert decided_set([0], r, vc).to_list() == [1, 2, 3]

    def test_infeasible_cover_rejected(self, triangle):
        r = full_realization(triangle)
        with pytest.raises(ContractError):
            decided_set([0], r, vset(triangle, [0]))

    def test_decided_subset_of_cover(self):
        # With vc the canonical cover, decided vertices are forced into it.
        g = BaseGraph(6, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (1, 2)])
        seed = SeedSpec(3)
        for t in range(200):
            r = sample_realization(g, 0.5, seed, t)
            vc = mvc_exact(r).cover
            for q in range(g.n):
                decided = decided_set([q], r, vc)
                assert decided.issubset(vc)

    def test_partition_of_non_queued(self, triangle):
        r = full_realization(triangle)
        vc = vset(triangle, [1, 2])
        queued = [0]
        dec = decided_set(queued, r, vc)
        und = undecided_set(queued, r, vc)
        assert (dec & und).size() == 0
        assert (dec | und).to_list() == [1, 2]


class TestProblematic:
    def test_unreachable_threshold(self, triangle):
        params = SeedParams(0.2, 0.5, 3)  # canonical: threshold in the millions
        r = full_realization(triangle)
        vc = vset(triangle, [0, 1])
        assert problematic_set([], r, vc, params).size() == 0

    def test_cover_members_excluded(self):
        g = BaseGraph(4, [(0, 1), (0, 2), (0, 3)])
        params = SeedParams(0.2, 0.5, 4, gamma=2.0)  # threshold 1
        r = full_realization(g)
        vc = vset(g, [0])
        out = problematic_set([], r, vc, params)
        assert 0 not in out

    def test_high_degree_center_out_of_cover(self):
        # Star with 3 spokes, threshold 3, center outside the cover.
        g = BaseGraph(4, [(0, 1), (0, 2), (0, 3)])
        params = SeedParams(0.1, 0.5, 4, gamma=2.0 / 3.0)  # threshold 3
        r = full_realization(g)
        vc = vset(g, [1, 2, 3])
        out = problematic_set([], r, vc, params)
        assert out.to_list() == [0]
        # Direct evaluation of the definition as an oracle.
        und = undecided_set([], r, vc)
        expected = [
            v
            for v in range(4)
            if v not in vc
            and len([u for u in range(4) if (g.adj_mask[v] >> u) & 1 and u in und])
            >= params.degree_threshold
        ]
        assert out.to_list() == expected


class TestHeavySet:
    def test_empty_when_degrees_small(self, triangle):
        params = SeedParams(0.2, 0.5, 3)
        r = full_realization(triangle)
        assert heavy_set([], r, vset(triangle, [0, 1]), params).size() == 0

    def test_superset_of_problematic(self):
        g = BaseGraph(5, [(0, 1), (0, 2), (0, 3), (1, 2), (3, 4)])
        params = SeedParams(0.2, 0.5, 5, gamma=1.0)  # threshold 2
        seed = SeedSpec(5)
        for t in range(100):
            r = sample_realization(g, 0.5, seed, t)
            vc = mvc_exact(r).cover
            prob = problematic_set([], r, vc, params)
            heavy = heavy_set([], r, vc, params)
            assert prob.issubset(heavy)

    def test_covered_center_lands_in_heavy_only(self):
        g = BaseGraph(4, [(0, 1), (0, 2), (0, 3)])
        params = SeedParams(0.1, 0.5, 4, gamma=2.0 / 3.0)  # threshold 3
        r = full_realization(g)
        vc = vset(g, [0])
        assert 0 in heavy_set([], r, vc, params)
        assert 0 not in problematic_set([], r, vc, params)


class TestVertexSeedLoop:
    def test_empty_graph(self):
        g = BaseGraph(0, [])
        params = SeedParams(0.2, 0.5, 0)
        seq = vertex_seed(g, 0.5, params, seed=SeedSpec(1))
        assert seq.vertices == []

    def test_low_degrees_terminate_immediately(self, triangle):
        params = SeedParams(0.2, 0.5, 3)  # threshold unreachable
        seq = vertex_seed(triangle, 0.5, params, seed=SeedSpec(1))
        assert seq.vertices == []

    def test_planted_instance_selects_hub(self):
        g, params, ctx = build_planted_context()
        hub = 3
        assert ctx.seed_vertices.to_list() == [hub]
        # Exact oracle for the hub's first-iteration probability.
        exact = 0.0
        for r, w in enumerate_realizations(g, 0.5):
            cover = mvc_exact(r).cover
            local = ctx.mid_sub.to_local(cover)
            sub = r.restrict(ctx.mid_sub)
            prob = problematic_set([], sub, local, params)
            if ctx.mid_sub.vertices.index(hub) in prob:
                exact += w
        assert math.isclose(exact, 0.5)
        step = ctx.sequence.steps[0]
        margin = 3.0 * (0.25 / 2000) ** 0.5
        assert abs(step.estimate - exact) <= margin

    def test_sequence_length_bound(self):
        # Raised probability threshold so the band clears the length-cap gate.
        g, params, ctx = build_planted_context(pad_pairs=7, delta=0.2)
        n_band = ctx.mid_sub.graph.n
        assert n_band >= params.seed_length_gate()
        assert ctx.seed_vertices.size() >= 1
        assert len(ctx.sequence) <= params.seed_length_bound(n_band)

    def test_deterministic_given_seed(self):
        _, _, ctx1 = build_planted_context(seed=13, trials=500)
        _, _, ctx2 = build_planted_context(seed=13, trials=500)
        assert ctx1.seed_vertices == ctx2.seed_vertices
        assert [s.estimate for s in ctx1.sequence.steps] == [
            s.estimate for s in ctx2.sequence.steps
        ]


class TestSeedSets:
    def test_all_seed_in_cover_decides_nothing(self):
        g, params, ctx = build_planted_context()
        boundary = PartialRealization(ctx.boundary_edges, ctx.boundary_edges.bits)
        sset = ctx.seed_set(ctx.seed_vertices, boundary)
        assert sset.decided_part.size() == 0

    def test_absent_boundary_decides_nothing(self):
        g, params, ctx = build_planted_context()
        boundary = PartialRealization(ctx.boundary_edges, 0)
        sset = ctx.seed_set(VertexSet(g.n, 0), boundary)
        assert sset.decided_part.size() == 0
        # Heavy part then depends only on the base degrees inside the band.
        und = ctx.bands.mid - ctx.seed_vertices
        expected = [
            u
            for u in und
            if (g.adj_mask[u] & und.bits).bit_count() >= params.degree_threshold
        ]
        assert sset.heavy_part.to_list() == expected

    def test_contract_errors(self):
        g, params, ctx = build_planted_context()
        with pytest.raises(ContractError):
            ctx.seed_set(vset(g, [0]), PartialRealization(ctx.boundary_edges, 0))
        wrong_edges = ctx.boundary_edges.complement()
        with pytest.raises(ContractError):
            ctx.seed_set(VertexSet(g.n, 0), PartialRealization(wrong_edges, 0))

    def test_indexed_form_matches_direct_construction(self):
        # The (seed-in-cover, boundary) indexed set must equal the four-set
        # construction computed directly on the band subgraph.
        g, params, ctx = build_planted_context()
        seed = SeedSpec(91)
        q_local = [ctx.mid_sub.vertices.index(v) for v in ctx.seed_vertices]
        for t in range(150):
            r = sample_realization(g, 0.5, seed, t)
            via_index = ctx.seed_of_realization(r)
            cover = mvc_exact(r).cover
            vc_local = ctx.mid_sub.to_local(cover)
            sub = r.restrict(ctx.mid_sub)
            dec_direct = ctx.mid_sub.to_global(
                decided_set(q_local, sub, vc_local), g.n
            )
            heavy_direct = ctx.mid_sub.to_global(
                heavy_set(q_local, sub, vc_local, params), g.n
            )
            assert via_index.decided_part == dec_direct
            assert via_index.heavy_part == heavy_direct
            assert via_index.union == (
                ctx.bands.high | ctx.seed_vertices | dec_direct | heavy_direct
            )

    def test_decided_part_always_inside_cover(self):
        g, params, ctx = build_planted_context()
        seed = SeedSpec(101)
        for t in range(150):
            r = sample_realization(g, 0.5, seed, t)
            sset = ctx.seed_of_realization(r)
            assert sset.decided_part.issubset(mvc_exact(r).cover)

    def test_sparsity_and_per_vertex_degree_cap(self):
        g, params, ctx = build_planted_context()
        for q_vc, boundary in ctx.enumerate_pairs():
            sset = ctx.seed_set(q_vc, boundary)
            assert sset.outside_edges <= params.sparsity_bound()
            undecided = ctx.bands.mid - ctx.seed_vertices - sset.decided_part
            for u in ctx.bands.mid - sset.union:
                degree_in = (g.adj_mask[u] & ctx.bands.mid.bits & undecided.bits).bit_count()
                assert degree_in < params.degree_threshold

    def test_high_band_covering_everything(self, triangle):
        # With every vertex banded high, the seed set is the whole vertex set.
        stats = cover_statistics(triangle, 1.0)
        bands = MembershipBands(
            triangle.all_vertices(), VertexSet(3, 0), VertexSet(3, 0), 0.2
        )
        params = SeedParams(0.2, 1.0, 3)
        mid_sub = induced_subgraph(triangle, bands.mid)
        seq = vertex_seed(mid_sub.graph, 1.0, params, seed=SeedSpec(0))
        ctx = SeedContext(triangle, 1.0, params, bands, seq, stats, mid_sub)
        sset = ctx.seed_of_realization(full_realization(triangle))
        assert sset.union == triangle.all_vertices()

    def test_seed_mass_outside_cover_canonical(self):
        # Canonical parameters: the seed machinery commits only the high band,
        # so the exact mass outside the canonical cover obeys the combined
        # band bounds.
        g = BaseGraph(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5)])
        p, eps = 0.5, 0.2
        params = SeedParams(eps, p, g.n)
        ctx = SeedContext.build(g, p, params, SeedSpec(5))
        opt = ctx.stats.opt.mean
        mass = 0.0
        for r, w in enumerate_realizations(g, p):
            sset = ctx.seed_of_realization(r)
            mass += w * (sset.union - mvc_exact(r).cover).size()
        bound = (4 * eps + eps**2 / 100 + eps) * opt
        assert mass <= bound + 1e-9
