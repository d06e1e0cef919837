"""Alternating minimization (AMA) and its Nesterov-accelerated variant.

AMA is projected gradient ascent on the dual. Each step forms the node
sums ``Delta = Phi^T Lambda``, the centroids ``U = X + Delta`` and the edge
gradients ``g = Phi U``, then projects ``lambda_l - nu * g_l`` onto the dual
ball of radius ``gamma * w_l``. The duality gap comes almost for free from
the same quantities and is the stopping certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import spectral_step_bound
from .model import ClusterProblem
from .prox import project_ball

__all__ = [
    "AmaConfig",
    "AmaState",
    "AmaResult",
    "compute_deltas",
    "ama_centroids",
    "momentum_update",
    "initial_state",
    "state_gap",
    "ama_step",
    "solve_ama",
    "default_step",
]


@dataclass(frozen=True)
class AmaConfig:
    """Solver settings. ``step=None`` means ``1 / spectral_step_bound``."""

    step: float | None = None
    tol: float = 1e-6
    max_iters: int = 100_000
    accelerated: bool = False
    trace: bool = False

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True, eq=False)
class AmaState:
    """Iterate bundle.

    ``lambdas`` is always the projected (feasible) iterate. ``deltas`` and
    ``grads`` are the node sums and edge gradients belonging to it; the
    ``prev_*`` fields hold the same for the previous projected iterate and
    are only used by the accelerated extrapolation.
    """

    lambdas: np.ndarray
    deltas: np.ndarray
    grads: np.ndarray
    prev_lambdas: np.ndarray
    prev_grads: np.ndarray
    momentum: float = 1.0
    prev_momentum: float = 1.0
    iteration: int = 0


@dataclass
class AmaResult:
    centroids: np.ndarray
    lambdas: np.ndarray
    gap: float
    iterations: int
    converged: bool
    step: float
    gaps: list = field(default_factory=list)
    duals: list = field(default_factory=list)


def compute_deltas(lambdas, graph) -> np.ndarray:
    """``Delta_i = sum_{l: l1 = i} lambda_l - sum_{l: l2 = i} lambda_l``."""
    return graph.adjoint(np.asarray(lambdas, dtype=np.float64))


def ama_centroids(X, deltas) -> np.ndarray:
    return np.asarray(getattr(X, "values", X)) + deltas


def momentum_update(alpha_prev: float) -> float:
    if alpha_prev < 1:
        raise ValueError("momentum must be at least 1")
    return (1.0 + math.sqrt(1.0 + 4.0 * alpha_prev * alpha_prev)) / 2.0


def default_step(problem: ClusterProblem) -> float:
    if problem.graph.n_edges == 0:
        return 1.0
    return 1.0 / spectral_step_bound(problem.graph)


def _check_step(problem, step):
    if problem.graph.n_edges and step >= 2.0 / spectral_step_bound(problem.graph):
        raise ValueError(
            f"step {step} violates the convergence bound nu < 2/{spectral_step_bound(problem.graph)}"
        )


def _with_grads(problem, lambdas):
    deltas = compute_deltas(lambdas, problem.graph)
    grads = problem.edge_data_differences + problem.graph.differences(deltas)
    return deltas, grads


def initial_state(problem: ClusterProblem, lambdas=None) -> AmaState:
    """Start from ``lambdas`` (zeros by default) projected onto the dual balls."""
    shape = (problem.graph.n_edges, problem.data.p)
    if lambdas is None:
        lambdas = np.zeros(shape)
    else:
        lambdas = np.asarray(lambdas, dtype=np.float64)
        if lambdas.shape != shape:
            raise ValueError(f"warm start has shape {lambdas.shape}, expected {shape}")
        lambdas = project_ball(problem.norm, lambdas, problem.radii)
    deltas, grads = _with_grads(problem, lambdas)
    return AmaState(lambdas, deltas, grads, lambdas, grads)


def state_gap(problem: ClusterProblem, state: AmaState) -> float:
    """Duality gap ``F(X + Delta) - D(Lambda)`` at the state's feasible iterate.

    Written per edge as ``gamma w_l ||g_l|| + <lambda_l, g_l>``, each term
    nonnegative for feasible ``lambda_l``; negative round-off in a term
    is clamped to zero.
    """
    if problem.graph.n_edges == 0:
        return 0.0
    terms = problem.radii * problem.norm.norm(state.grads) + np.sum(state.lambdas * state.grads, axis=1)
    # each term is >= 0 by Hoelder; clamping removes round-off and only raises the gap
    return float(np.sum(np.maximum(terms, 0.0)))


def ama_step(state: AmaState, problem: ClusterProblem, config: AmaConfig, step: float | None = None) -> AmaState:
    """One AMA iteration.

    In accelerated mode the gradient step is taken from the extrapolated
    point ``lambda + ((alpha_{m-1} - 1) / alpha_m) (lambda - lambda_prev)``;
    the gradient there is the same affine combination of the stored
    gradients, so no extra matrix products are needed.
    """
    nu = step if step is not None else (config.step or default_step(problem))
    if config.accelerated:
        c = (state.prev_momentum - 1.0) / state.momentum
        y = state.lambdas + c * (state.lambdas - state.prev_lambdas)
        gy = state.grads + c * (state.grads - state.prev_grads)
    else:
        y, gy = state.lambdas, state.grads
    lambdas = project_ball(problem.norm, y - nu * gy, problem.radii)
    deltas, grads = _with_grads(problem, lambdas)
    if config.accelerated:
        momentum, prev_momentum = momentum_update(state.momentum), state.momentum
    else:
        momentum, prev_momentum = state.momentum, state.prev_momentum
    return AmaState(
        lambdas, deltas, grads, state.lambdas, state.grads,
        momentum, prev_momentum, state.iteration + 1,
    )


def solve_ama(problem: ClusterProblem, config: AmaConfig | None = None, warm_start=None) -> AmaResult:
    """Run (accelerated) AMA until the duality gap drops to ``config.tol``.

    Returns the first iterate with gap ``<= tol``. If ``max_iters`` is hit,
    the iterate with the smallest gap seen is returned with
    ``converged=False``.
    """
    config = config or AmaConfig()
    nu = config.step if config.step is not None else default_step(problem)
    _check_step(problem, nu)

    state = initial_state(problem, warm_start)
    gaps, duals = [], []
    best = None
    while True:
        gap = state_gap(problem, state)
        if config.trace:
            gaps.append(gap)
            duals.append(-0.5 * float(np.sum(state.deltas**2))
                         - float(np.sum(state.lambdas * problem.edge_data_differences)))
        if best is None or gap < best[0]:
            best = (gap, state)
        if gap <= config.tol or state.iteration >= config.max_iters:
            break
        state = ama_step(state, problem, config, nu)

    gap, final = best
    return AmaResult(
        centroids=ama_centroids(problem.X, final.deltas),
        lambdas=final.lambdas,
        gap=gap,
        iterations=state.iteration,
        converged=gap <= config.tol,
        step=nu,
        gaps=gaps,
        duals=duals,
    )
