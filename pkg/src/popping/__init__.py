"""Exact popping samplers and all-terminal network reliability estimation.

Three partial-rejection samplers with proven draw-count laws:

  cluster-popping   root-connected subgraphs of a directed graph
  cycle-popping     edge-weighted spanning trees rooted anywhere
  sink-popping      uniform sink-free orientations

plus an annealing estimator for all-terminal reliability driven by the
cluster sampler, and brute-force oracles that verify all of it exactly on
small instances.
"""

from .errors import (DrawBudgetExceeded, ExtremalityViolation,
                     InfeasibleInstanceError, InvalidGraphError,
                     PoppingError, PopVerificationError)
from .graph import (DirectedGraph, UndirectedGraph, arborescence_toward_root,
                    barbell, bidirect, complete, connected_components, cycle,
                    has_tree_component, is_connected, is_root_connected,
                    lollipop, pack_subset, path, unpack_subset)
from .oracle import (ExactDistribution, ExactSummary, exact_cluster_summary,
                     exact_cycle_summary, exact_distribution,
                     exact_sink_summary, expected_empirical_tv, tv_distance)
from .prs import DEFAULT_MAX_DRAWS, PrsInstance, RunStats, run_prs
from .reliability import (AnnealSchedule, GibbsInstance, ReliabilityEstimate,
                          brute_force_Zreach, brute_force_Zrel,
                          estimate_reliability, modified_prob,
                          rho_beta_sample)
from .tables import ResamplingTable, derive_seed, table_value
from . import cluster_popping, cycle_popping, sink_popping

__version__ = "0.1.0"

__all__ = [
    "UndirectedGraph", "DirectedGraph", "bidirect",
    "is_root_connected", "has_tree_component", "connected_components",
    "is_connected", "arborescence_toward_root",
    "lollipop", "barbell", "cycle", "complete", "path",
    "pack_subset", "unpack_subset",
    "ResamplingTable", "derive_seed", "table_value",
    "PrsInstance", "RunStats", "run_prs", "DEFAULT_MAX_DRAWS",
    "cluster_popping", "cycle_popping", "sink_popping",
    "ExactSummary", "ExactDistribution",
    "exact_cluster_summary", "exact_cycle_summary", "exact_sink_summary",
    "exact_distribution", "tv_distance", "expected_empirical_tv",
    "modified_prob", "GibbsInstance", "AnnealSchedule", "rho_beta_sample",
    "estimate_reliability", "ReliabilityEstimate",
    "brute_force_Zrel", "brute_force_Zreach",
    "PoppingError", "InvalidGraphError", "InfeasibleInstanceError",
    "DrawBudgetExceeded", "ExtremalityViolation", "PopVerificationError",
]
