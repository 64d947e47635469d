"""Stochastic vertex cover in the edge-query model.

A library plus CLI for the non-adaptive commit-and-query cover algorithm, the
greedy seed-vertex machinery, an exact canonical minimum-vertex-cover oracle,
and empirical tail-bound verification for the cover size of random
realizations.
"""

from .errors import (
    CapacityError,
    ContractError,
    DomainError,
    GraphParseError,
    ParameterError,
    QueryBudgetError,
    QueryModelError,
    StochVcError,
    ValidationError,
)
from .generators import (
    GeneratorSpec,
    clique,
    disjoint_edges,
    erdos_renyi,
    generate,
    planted_seed_instance,
    random_bipartite,
    star,
)
from .graph import (
    BaseGraph,
    EdgeSet,
    InducedSubgraph,
    VertexSet,
    induced_subgraph,
    neighbors_within,
    parse_edge_list,
    serialize_edge_list,
)
from .mvc import (
    CanonicalCover,
    CoverStatistics,
    ProbEstimate,
    cover_statistics,
    edge_cover_probs,
    expected_mvc,
    is_cover,
    membership_probs,
    mvc_brute,
    mvc_exact,
    mvc_size,
)
from .pipeline import ExperimentConfig, PipelineResult, compare_baselines, pipeline_run
from .realization import (
    PartialRealization,
    QueryOracle,
    Realization,
    enumerate_realizations,
    sample_conditional,
    sample_realization,
)
from .rng import SeedSpec, map_trials
from .seeding import (
    MembershipBands,
    SeedContext,
    SeedEstimatorConfig,
    SeedParams,
    SeedSequence,
    SeedSet,
    decided_set,
    heavy_set,
    partition_by_membership,
    problematic_set,
    undecided_set,
    vertex_seed,
)
from .solver import (
    RunResult,
    Solution,
    SolverConfig,
    cover_objective,
    dense_fallback_check,
    run_vertex_cover,
    solve_commit_set,
)
from .structural import (
    STRUCTURAL_CONSTANT,
    GreedyOrdering,
    StructuralSet,
    TailReport,
    cover_objective_tail,
    empirical_tail,
    freedman_bound,
    gaussian_bound,
    greedy_ordering,
    structural_set,
    verify_structural,
)

__all__ = [name for name in dir() if not name.startswith("_")]
