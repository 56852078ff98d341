"""Lower bounds from the branching dual, applied to minimum bandwidth."""

from .dual import (INF, BoundCertificate, BranchTree, DomainSpec, GreedySelector,
                   LayeredSelector, SearchBudget, check_relaxation_contract, dual_value,
                   expand, run_bfs, run_dfs, run_worst_bound, worst_bound_step)
from .bandwidth import Graph, PartialLayout, bandwidth, bandwidth_domain

__all__ = [
    "INF", "BoundCertificate", "BranchTree", "DomainSpec", "GreedySelector",
    "LayeredSelector", "SearchBudget", "check_relaxation_contract", "dual_value",
    "expand", "run_bfs", "run_dfs", "run_worst_bound", "worst_bound_step",
    "Graph", "PartialLayout", "bandwidth", "bandwidth_domain",
]
