"""ADMM for convex clustering.

The centroid update solves ``M U = X + Phi^T (Lambda + nu V)`` with
``M = I + nu L``. On a complete graph ``M`` is a diagonal plus rank-one
matrix and the solve is closed form (Sherman-Morrison); otherwise a
Cholesky factor of ``M`` is computed once per ``(graph, nu)`` and reused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .model import ClusterProblem
from .prox import prox

__all__ = [
    "AdmmConfig",
    "AdmmResult",
    "LaplacianFactor",
    "admm_u_complete",
    "admm_u_sparse",
    "admm_v",
    "admm_lambda",
    "residuals",
    "solve_admm",
]

COMPLETE = "complete"
SPARSE = "sparse"


@dataclass(frozen=True)
class AdmmConfig:
    """Step ``nu``, residual tolerances and centroid-update mode.

    ``mode=None`` selects the closed-form update exactly when the edge set
    is all pairs.
    """

    step: float = 1.0
    abs_tol: float = 1e-6
    rel_tol: float = 1e-4
    max_iters: int = 100_000
    mode: str | None = None

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not (self.abs_tol > 0 and self.rel_tol >= 0):
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.mode not in (None, COMPLETE, SPARSE):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class AdmmResult:
    centroids: np.ndarray
    V: np.ndarray
    lambdas: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    step: float


class LaplacianFactor:
    """Cached Cholesky factor of ``M = I + nu * L`` for one graph and step."""

    def __init__(self, graph, nu):
        self.graph = graph
        self.nu = float(nu)
        M = np.eye(graph.n) + self.nu * graph.laplacian().toarray()
        self._factor = cho_factor(M, lower=True)

    def matches(self, graph, nu) -> bool:
        return self.graph is graph and self.nu == float(nu)

    def solve(self, B):
        return cho_solve(self._factor, B)


def _rhs(X, V, lambdas, nu, graph):
    return X + graph.adjoint(lambdas + nu * V)


def admm_u_complete(X, V, lambdas, nu, graph) -> np.ndarray:
    """Closed-form centroid update on a complete graph."""
    if not graph.is_complete:
        raise ValueError("closed-form update requires the complete graph")
    X = np.asarray(getattr(X, "values", X), dtype=np.float64)
    n = X.shape[0]
    Y = _rhs(X, V, lambdas, nu, graph)
    return Y / (1.0 + n * nu) + (n * nu / (1.0 + n * nu)) * X.mean(axis=0)


def admm_u_sparse(X, V, lambdas, nu, graph, factor: LaplacianFactor) -> np.ndarray:
    """Centroid update by two triangular solves with the cached factor."""
    if not factor.matches(graph, nu):
        raise ValueError("stale factorization: graph or step changed")
    X = np.asarray(getattr(X, "values", X), dtype=np.float64)
    return factor.solve(_rhs(X, V, lambdas, nu, graph))


def admm_v(U, lambdas, nu, gamma, graph, norm) -> np.ndarray:
    """``v_l = prox_{sigma_l ||.||}(u_l1 - u_l2 - lambda_l / nu)`` with ``sigma_l = gamma w_l / nu``."""
    return prox(norm, graph.differences(U) - lambdas / nu, gamma * graph.weights / nu)


def admm_lambda(lambdas, V, U, nu, graph) -> np.ndarray:
    return lambdas + nu * (V - graph.differences(U))


def residuals(U, V, V_prev, nu, graph) -> tuple[float, float]:
    """Norms of the primal residual ``V - Phi U`` and dual residual ``nu Phi^T (V - V_prev)``."""
    r = np.linalg.norm(V - graph.differences(U))
    s = nu * np.linalg.norm(graph.adjoint(V - V_prev))
    return float(r), float(s)


def solve_admm(
    problem: ClusterProblem,
    config: AdmmConfig | None = None,
    warm_start=None,
    factor: LaplacianFactor | None = None,
) -> AdmmResult:
    """Run ADMM from ``V = Lambda = 0`` or a warm start ``(U, V, Lambda)``.

    Stops when ``||r|| <= eps_abs sqrt(|E| p) + eps_rel max(||Phi U||, ||V||)``
    and ``||s|| <= eps_abs sqrt(n p) + eps_rel ||Phi^T Lambda||``.
    """
    config = config or AdmmConfig()
    graph, X, nu = problem.graph, problem.X, config.step
    n, p = X.shape
    m = graph.n_edges
    mode = config.mode or (COMPLETE if graph.is_complete else SPARSE)

    if warm_start is None:
        V = np.zeros((m, p))
        lambdas = np.zeros((m, p))
    else:
        _, V, lambdas = warm_start
        V = np.array(V, dtype=np.float64)
        lambdas = np.array(lambdas, dtype=np.float64)
    if m == 0:
        return AdmmResult(X.copy(), V, lambdas, 0, True, 0.0, 0.0, nu)
    if problem.gamma == 0.0:
        # no fusion penalty: U = X, V = Phi X, Lambda = 0 is optimal
        return AdmmResult(X.copy(), graph.differences(X), np.zeros((m, p)), 0, True, 0.0, 0.0, nu)

    if mode == COMPLETE:
        update_u = lambda V, lam: admm_u_complete(X, V, lam, nu, graph)  # noqa: E731
    else:
        if factor is None or not factor.matches(graph, nu):
            factor = LaplacianFactor(graph, nu)
        update_u = lambda V, lam: admm_u_sparse(X, V, lam, nu, graph, factor)  # noqa: E731

    eps_pri_abs = config.abs_tol * np.sqrt(m * p)
    eps_dual_abs = config.abs_tol * np.sqrt(n * p)
    r = s = np.inf
    converged = False
    it = 0
    U = X.copy()
    while it < config.max_iters:
        it += 1
        U = update_u(V, lambdas)
        V_prev = V
        V = admm_v(U, lambdas, nu, problem.gamma, graph, problem.norm)
        lambdas = admm_lambda(lambdas, V, U, nu, graph)
        r, s = residuals(U, V, V_prev, nu, graph)
        AU = graph.differences(U)
        eps_pri = eps_pri_abs + config.rel_tol * max(np.linalg.norm(AU), np.linalg.norm(V))
        eps_dual = eps_dual_abs + config.rel_tol * np.linalg.norm(graph.adjoint(lambdas))
        if r <= eps_pri and s <= eps_dual:
            converged = True
            break
    return AdmmResult(U, V, lambdas, it, converged, r, s, nu)
