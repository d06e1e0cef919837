"""Regularization paths and cluster assignment."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .admm import AdmmConfig, LaplacianFactor, solve_admm
from .ama import AmaConfig, default_step, solve_ama
from .graph import connected_components
from .model import ClusterProblem, primal_objective
from .prox import prox

__all__ = [
    "SOLVERS",
    "PathEntry",
    "ClusterPath",
    "gamma_grid",
    "reconstruct_v",
    "assign_clusters",
    "solve_path",
    "default_grid",
]

SOLVERS = ("ama", "ama-fast", "admm")


@dataclass
class PathEntry:
    gamma: float
    centroids: np.ndarray
    assignments: np.ndarray
    num_clusters: int
    iterations: int
    converged: bool
    objective: float
    gap: float | None = None
    primal_residual: float | None = None
    dual_residual: float | None = None


@dataclass
class ClusterPath:
    entries: list[PathEntry] = field(default_factory=list)
    solver: str = "ama"

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def gammas(self) -> np.ndarray:
        return np.array([e.gamma for e in self.entries])

    @property
    def num_clusters(self) -> np.ndarray:
        return np.array([e.num_clusters for e in self.entries])


def gamma_grid(values) -> np.ndarray:
    """Validate a grid: finite, nonnegative, strictly increasing."""
    grid = np.asarray(values, dtype=np.float64).ravel()
    if grid.size == 0:
        raise ValueError("gamma grid is empty")
    if not np.all(np.isfinite(grid)) or np.any(grid < 0):
        raise ValueError("gamma values must be finite and nonnegative")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("gamma grid must be strictly increasing")
    return grid


def reconstruct_v(U, lambdas, nu, gamma, graph, norm) -> np.ndarray:
    """Split variables ``v_l = prox_{gamma w_l / nu}(u_l1 - u_l2 - lambda_l / nu)``.

    Thresholding makes ``v_l`` exactly zero on fused edges.
    """
    return prox(norm, graph.differences(U) - lambdas / nu, gamma * graph.weights / nu)


def assign_clusters(V, graph, zero_tol: float = 0.0):
    """Clusters are connected components of the edges with ``||v_l||_2 <= zero_tol``.

    Returns ``(assignments, num_clusters)``; ids are contiguous from 0 in
    order of first discovery from the lowest-index node.
    """
    V = np.asarray(V, dtype=np.float64)
    if V.shape[0] != graph.n_edges:
        raise ValueError(f"V has {V.shape[0]} rows, graph has {graph.n_edges} edges")
    fused = np.linalg.norm(V, axis=1) <= zero_tol if V.size else np.zeros(graph.n_edges, bool)
    return connected_components(graph.n, graph.heads, graph.tails, mask=fused)


def _solve_one(problem, solver, ama_config, admm_config, warm, factor):
    if solver == "admm":
        res = solve_admm(problem, admm_config, warm_start=warm, factor=factor)
        info = dict(primal_residual=res.primal_residual, dual_residual=res.dual_residual)
        return res.centroids, res.V, res.lambdas, res.step, res.iterations, res.converged, info
    res = solve_ama(problem, ama_config, warm_start=warm)
    return res.centroids, None, res.lambdas, res.step, res.iterations, res.converged, dict(gap=res.gap)


def _configs(solver, ama_config, admm_config):
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
    if solver == "admm":
        return None, admm_config or AdmmConfig()
    cfg = ama_config or AmaConfig()
    if (solver == "ama-fast") != cfg.accelerated:
        cfg = AmaConfig(cfg.step, cfg.tol, cfg.max_iters, solver == "ama-fast", cfg.trace)
    return cfg, None


def solve_path(
    problem: ClusterProblem,
    grid,
    solver: str = "ama",
    ama_config: AmaConfig | None = None,
    admm_config: AdmmConfig | None = None,
    warm_start: bool = True,
    zero_tol: float = 0.0,
) -> ClusterPath:
    """Solve ``problem`` (its own ``gamma`` is ignored) at every grid value.

    Values are visited in increasing order; each solve is warm-started from
    the previous one unless ``warm_start=False``. Non-convergence at a grid
    point is recorded in the entry and does not stop the path.
    """
    grid = gamma_grid(grid)
    ama_config, admm_config = _configs(solver, ama_config, admm_config)
    factor = None
    if solver == "admm" and problem.graph.n_edges and not problem.graph.is_complete:
        factor = LaplacianFactor(problem.graph, admm_config.step)

    path = ClusterPath(solver=solver)
    warm = None
    for gamma in grid:
        prob = problem.with_gamma(gamma)
        U, V, lambdas, nu, iters, converged, info = _solve_one(
            prob, solver, ama_config, admm_config, warm if warm_start else None, factor
        )
        if solver == "admm":
            warm = (U, V, lambdas)
        else:
            # the solver re-projects onto the (larger) balls of the next gamma
            warm = lambdas
        V_hat = reconstruct_v(U, lambdas, nu, gamma, prob.graph, prob.norm)
        labels, k = assign_clusters(V_hat, prob.graph, zero_tol)
        path.entries.append(PathEntry(
            gamma=float(gamma), centroids=U, assignments=labels, num_clusters=int(k),
            iterations=int(iters), converged=bool(converged),
            objective=primal_objective(prob, U), **info,
        ))
    return path


def default_grid(
    problem: ClusterProblem,
    count: int,
    ama_config: AmaConfig | None = None,
    zero_tol: float = 0.0,
    max_doublings: int = 60,
) -> np.ndarray:
    """``{0}`` plus ``count - 1`` log-spaced values ending where clusters coalesce.

    The upper end starts at the smallest two-point fusion level
    ``min_l ||x_l1 - x_l2||_2 / (2 w_l)`` and is doubled until an AMA solve
    leaves one cluster per connected component of the weight graph. The
    lower end is a thousandth of the upper.
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    graph = problem.graph
    if graph.n_edges == 0:
        return gamma_grid(np.concatenate([[0.0], np.logspace(-3, 0, count - 1)]))
    cfg = ama_config or AmaConfig(accelerated=True)
    dist = np.linalg.norm(problem.edge_data_differences, axis=1)
    positive = dist > 0
    if np.any(positive):
        hi = float(np.min(dist[positive] / (2.0 * graph.weights[positive])))
    else:
        hi = 1.0
    nu = cfg.step if cfg.step is not None else default_step(problem)
    target = graph.n_components
    warm = None
    for _ in range(max_doublings):
        prob = problem.with_gamma(hi)
        res = solve_ama(prob, cfg, warm_start=warm)
        warm = res.lambdas
        V_hat = reconstruct_v(res.centroids, res.lambdas, nu, hi, graph, problem.norm)
        if assign_clusters(V_hat, graph, zero_tol)[1] == target:
            break
        hi *= 2.0
    else:
        raise RuntimeError("centroids did not coalesce; increase max_doublings")
    if count == 2:
        return gamma_grid([0.0, hi])
    lo = hi / 1e3
    return gamma_grid(np.concatenate([[0.0], np.geomspace(lo, hi, count - 1)]))
