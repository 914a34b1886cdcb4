"""Coarse tree decompositions: ball-coverable separators, distance graphs, and certified bounds."""

from .builders import (
    BuilderParams,
    RoundBuilder,
    SimpleBuilder,
    crowding_alpha,
    decompose_round,
    decompose_simple,
    gamma_bound,
    round_bounds,
    simple_bounds,
    uncrowd,
)
from .decomposition import (
    CoverStats,
    TreeDecomposition,
    TreePartition,
    Violation,
    balanced_bag,
    bfs_layered_tree_partition,
    coverability_stats,
    potential,
    tree_partition_to_tree_decomposition,
    validate_tree_decomposition,
    validate_tree_partition,
)
from .distgraph import (
    DistanceGraph,
    PhiMap,
    QuasiIsometryCert,
    build_distance_graph,
    check_degree_bound,
    check_quasi_isometry,
)
from .errors import (
    BudgetExceeded,
    CapExceeded,
    CoarseError,
    DecompositionFailure,
    InputError,
    InvariantViolation,
)
from .generators import FamilySpec, generate
from .graph import (
    INF,
    Ball,
    Graph,
    WeightedGraph,
    ball,
    components,
    estimate_doubling_dimension,
    is_coverable,
    maximal_distance_r_independent_set,
)
from .separator import (
    SeparatorOracle,
    SeparatorWitness,
    WeightFn,
    bsn_over_indicators,
    exact_treewidth,
    find_separator,
    is_balanced_separator,
)
from .transforms import (
    CoarseningParams,
    LevelClusters,
    coarsen_tree_partition,
    level_clusters,
    lift_decomposition,
    separator_transfer_unweighted,
    separator_transfer_weighted,
)

__version__ = "0.1.0"
