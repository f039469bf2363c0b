"""Fractional budget allocation for influence maximization with affine
activation functions."""

__version__ = "0.1.0"

from .diffusion import (  # noqa: E402
    CascadeOutcome,
    LiveEdgePool,
    SeedingSemantics,
    build_pool,
    estimate_F,
    sigma_hat,
    simulate_cascade,
)
from .graph import Graph, assign_uniform, assign_weighted_cascade, parse_edge_list, read_edge_list  # noqa: E402
from .greedy import (  # noqa: E402
    DegreeAllocator,
    GreedyAllocator,
    GreedyConfig,
    GreedyTrace,
    degree_baseline,
    greedy_allocate,
    lazy_selection,
)
from .marketing import (  # noqa: E402
    ActivationProfile,
    AffineActivation,
    Allocation,
    CoefficientScheme,
    evaluate,
    inverse_at_one,
    sample_profile,
)
from .oracle import GridSpec, check_submodularity, exact_F, exact_sigma, grid_optimum, sigma_table  # noqa: E402
from .datasets import fetch_dataset  # noqa: E402
from .experiment import ExperimentConfig, SweepRecord, emit_results, load_graph, run_sweep  # noqa: E402

__all__ = [
    "ActivationProfile", "AffineActivation", "Allocation", "CascadeOutcome", "CoefficientScheme",
    "ExperimentConfig", "SweepRecord", "emit_results", "fetch_dataset", "load_graph", "run_sweep", "sigma_table",
    "DegreeAllocator", "Graph", "GreedyAllocator", "GreedyConfig", "GreedyTrace", "GridSpec",
    "LiveEdgePool", "SeedingSemantics", "assign_uniform", "assign_weighted_cascade", "build_pool",
    "check_submodularity", "degree_baseline", "estimate_F", "evaluate", "exact_F", "exact_sigma",
    "greedy_allocate", "grid_optimum", "inverse_at_one", "lazy_selection", "parse_edge_list",
    "read_edge_list", "sample_profile", "sigma_hat", "simulate_cascade",
]
