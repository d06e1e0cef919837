"""Convex clustering paths by ADMM and (accelerated) AMA."""

from .admm import AdmmConfig, AdmmResult, solve_admm
from .ama import AmaConfig, AmaResult, solve_ama
from .graph import (
    WeightGraph,
    build_knn_gaussian_weights,
    complete_graph,
    is_connected,
    spectral_step_bound,
)
from .model import (
    ClusterProblem,
    DataMatrix,
    PenaltyNorm,
    dual_objective,
    duality_gap,
    primal_objective,
    split_objective,
)
from .path import ClusterPath, assign_clusters, default_grid, reconstruct_v, solve_path
from .prox import project_ball, project_simplex, prox

__version__ = "0.1.0"

__all__ = [
    "AdmmConfig",
    "AdmmResult",
    "solve_admm",
    "AmaConfig",
    "AmaResult",
    "solve_ama",
    "WeightGraph",
    "build_knn_gaussian_weights",
    "complete_graph",
    "is_connected",
    "spectral_step_bound",
    "ClusterProblem",
    "DataMatrix",
    "PenaltyNorm",
    "dual_objective",
    "duality_gap",
    "primal_objective",
    "split_objective",
    "ClusterPath",
    "assign_clusters",
    "default_grid",
    "reconstruct_v",
    "solve_path",
    "project_ball",
    "project_simplex",
    "prox",
]
