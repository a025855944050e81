"""Approximate mean truncated random-walk hitting times on large directed graphs.

The package computes, for a start vertex or start distribution, the
expected number of steps (capped at a horizon T) a random walk needs to
first reach every vertex of a weighted directed graph.  The approximation
engine needs T-1 passes over the edges and three per-vertex floats of
state, so it also runs over disk-sharded graphs that never fit in memory.
Exact oracles, a Monte-Carlo estimator, synthetic graph generators and an
accuracy benchmark round out the toolkit; an HTTP service plus a thin CLI
expose all of it.
"""

__version__ = "0.1.0"

from .engine import (
    HittingProfile,
    StateTriple,
    approximate_hitting_matrix,
    approximate_hitting_times,
    start_distribution,
)
from .errors import (
    GraphIOError,
    HittimesError,
    NumericalError,
    ResourceLimitError,
    ShardCorruptionError,
    UnsupportedBackendError,
    ValidationError,
)
from .evaluation import (
    AccuracyStats,
    EvalConfig,
    EvalReport,
    evaluate_instance,
    inversion_stats,
    relative_error_stats,
    run_benchmark,
)
from .generators import GenSpec, gen_den, gen_sp1, gen_sp2, generate
from .graph import Graph, build_graph, load_edge_list, save_edge_list
from .instrumentation import EngineStats
from .oracles import (
    HittingMatrix,
    brute_force_paths,
    count_walks,
    exact_first_passage,
    exact_hitting_matrix,
    first_passage_masses,
)
from .sampling import (
    ReturnProbEstimate,
    hitting_via_sampled_diagonal,
    hoeffding_walk_count,
    load_estimate,
    sample_return_probabilities,
)
from .shards import ShardedTransitionMatrix, load_sharded, write_shards
from .transition import TransitionMatrix, build_transition, validate_distribution

__all__ = [
    "__version__",
    "AccuracyStats",
    "EngineStats",
    "EvalConfig",
    "EvalReport",
    "GenSpec",
    "Graph",
    "GraphIOError",
    "HittimesError",
    "HittingMatrix",
    "HittingProfile",
    "NumericalError",
    "ResourceLimitError",
    "ReturnProbEstimate",
    "ShardCorruptionError",
    "ShardedTransitionMatrix",
    "StateTriple",
    "TransitionMatrix",
    "UnsupportedBackendError",
    "ValidationError",
    "approximate_hitting_matrix",
    "approximate_hitting_times",
    "brute_force_paths",
    "build_graph",
    "build_transition",
    "count_walks",
    "evaluate_instance",
    "exact_first_passage",
    "exact_hitting_matrix",
    "first_passage_masses",
    "gen_den",
    "gen_sp1",
    "gen_sp2",
    "generate",
    "hitting_via_sampled_diagonal",
    "hoeffding_walk_count",
    "inversion_stats",
    "load_edge_list",
    "load_estimate",
    "load_sharded",
    "relative_error_stats",
    "run_benchmark",
    "sample_return_probabilities",
    "save_edge_list",
    "start_distribution",
    "validate_distribution",
    "write_shards",
]
