"""Independent reference computations used to validate the solvers.

Nothing here calls into the production kernels (``prox``, ``graph``
operators, solvers): objectives are evaluated with explicit loops, the
proximal maps by one-dimensional convex minimization, the clustering
problem by plain subgradient descent, and Laplacian spectra by dense
eigendecomposition. Everything is slow and meant for small instances.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "OracleReport",
    "norm_reference",
    "dual_norm_reference",
    "objective_reference",
    "dual_reference",
    "two_point_closed_form",
    "prox_reference",
    "subgradient_reference",
    "dense_laplacian_spectrum",
]


@dataclass
class OracleReport:
    """Append-only log of reference-vs-tested comparisons."""

    rows: list = field(default_factory=list)

    def add(self, description, reference, tested, seed=None):
        ref = np.atleast_1d(np.asarray(reference, dtype=np.float64))
        val = np.atleast_1d(np.asarray(tested, dtype=np.float64))
        abs_err = float(np.max(np.abs(ref - val))) if ref.size else 0.0
        scale = float(np.max(np.abs(ref))) if ref.size else 0.0
        rel_err = abs_err / scale if scale > 0 else abs_err
        self.rows.append(dict(description=description, seed=seed, abs_error=abs_err,
                              rel_error=rel_err, reference=ref.tolist(), tested=val.tolist()))
        return abs_err, rel_err

    def max_abs_error(self):
        return max((r["abs_error"] for r in self.rows), default=0.0)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["description", "seed", "abs_error", "rel_error"])
            for r in self.rows:
                w.writerow([r["description"], r["seed"], repr(r["abs_error"]), repr(r["rel_error"])])


def _kind(norm):
    kind = getattr(norm, "kind", norm)
    groups = getattr(norm, "groups", None)
    return kind, groups


def norm_reference(norm, v) -> float:
    kind, groups = _kind(norm)
    v = [float(t) for t in v]
    if kind == "l1":
        return sum(abs(t) for t in v)
    if kind == "l2":
        return math.sqrt(sum(t * t for t in v))
    if kind == "linf":
        return max((abs(t) for t in v), default=0.0)
    return sum(math.sqrt(sum(v[i] ** 2 for i in g)) for g in groups)


def dual_norm_reference(norm, v) -> float:
    kind, groups = _kind(norm)
    v = [float(t) for t in v]
    if kind == "l1":
        return max((abs(t) for t in v), default=0.0)
    if kind == "l2":
        return math.sqrt(sum(t * t for t in v))
    if kind == "linf":
        return sum(abs(t) for t in v)
    return max(math.sqrt(sum(v[i] ** 2 for i in g)) for g in groups)


def objective_reference(X, edges, norm, gamma, U) -> float:
    """Clustering objective by explicit loops; ``edges`` holds ``(i, j, w)``."""
    X, U = np.asarray(X, float), np.asarray(U, float)
    total = 0.0
    for i in range(X.shape[0]):
        for k in range(X.shape[1]):
            total += 0.5 * (X[i, k] - U[i, k]) ** 2
    for i, j, w in edges:
        total += gamma * w * norm_reference(norm, U[int(i)] - U[int(j)])
    return total


def dual_reference(X, edges, norm, gamma, lambdas) -> float:
    """Dual function by explicit loops, ``-inf`` outside the dual balls."""
    X, lambdas = np.asarray(X, float), np.asarray(lambdas, float)
    n, p = X.shape
    delta = [[0.0] * p for _ in range(n)]
    value = 0.0
    for (i, j, w), lam in zip(edges, lambdas):
        i, j = int(i), int(j)
        if dual_norm_reference(norm, lam) > gamma * w * (1 + 1e-12):
            return -math.inf
        for k in range(p):
            delta[i][k] += lam[k]
            delta[j][k] -= lam[k]
            value -= lam[k] * (X[i, k] - X[j, k])
    value -= 0.5 * sum(d * d for row in delta for d in row)
    return value


def two_point_closed_form(x1, x2, w, gamma):
    """Exact minimizer for two points joined by one edge under the l2 norm.

    With ``d = x1 - x2`` the centroid difference is
    ``[1 - 2 gamma w / ||d||]_+ d`` around the fixed midpoint, so the two
    centroids fuse exactly when ``gamma w >= ||d|| / 2``.
    """
    x1 = np.atleast_1d(np.asarray(x1, dtype=np.float64))
    x2 = np.atleast_1d(np.asarray(x2, dtype=np.float64))
    d = x1 - x2
    nd = math.sqrt(float(d @ d))
    shrink = max(1.0 - 2.0 * gamma * w / nd, 0.0) if nd > 0 else 0.0
    delta = shrink * d
    mid = 0.5 * (x1 + x2)
    return mid + 0.5 * delta, mid - 0.5 * delta


def _argmin_1d(f, hi):
    if hi <= 0:
        return 0.0
    res = minimize_scalar(f, bounds=(0.0, hi), method="bounded",
                          options={"xatol": 1e-13 * max(1.0, hi), "maxiter": 2000})
    # the bounded search never evaluates the endpoints exactly
    return min((0.0, res.x, hi), key=f)


def _radial_prox(v, sigma):
    r = math.sqrt(sum(t * t for t in v))
    if r == 0:
        return np.zeros(len(v))
    t = _argmin_1d(lambda t: sigma * t + 0.5 * (t - r) ** 2, r)
    return np.asarray(v, float) * (t / r)


def prox_reference(norm, v, sigma) -> np.ndarray:
    """Proximal map ``argmin_u sigma ||u|| + 1/2 ||u - v||^2`` from first principles.

    l1 compares the three candidates ``0, v_k - sigma, v_k + sigma`` per
    coordinate. l2 and group norms minimize along the ray through ``v``.
    linf minimizes over the clipping level ``theta`` of ``u = clip(v, theta)``.
    """
    kind, groups = _kind(norm)
    v = np.asarray(v, dtype=np.float64)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if kind == "l1":
        out = np.empty_like(v)
        for k, vk in enumerate(v):
            cands = (0.0, vk - sigma, vk + sigma)
            out[k] = min(cands, key=lambda u: sigma * abs(u) + 0.5 * (u - vk) ** 2)
        return out
    if kind == "l2":
        return _radial_prox(v, sigma)
    if kind == "group":
        out = np.empty_like(v)
        for g in groups:
            out[list(g)] = _radial_prox(v[list(g)], sigma)
        return out
    a = np.abs(v)
    top = float(a.max(initial=0.0))

    def f(theta):
        return sigma * theta + 0.5 * float(np.sum(np.maximum(a - theta, 0.0) ** 2))

    theta = _argmin_1d(f, top)
    return np.sign(v) * np.minimum(a, theta)


_KIND_CODES = {"l1": 0, "l2": 1, "linf": 2, "group": 3}


@numba.njit(cache=True)
def _subgradient_loop(X, heads, tails, w, gamma, code, group_of, n_groups, c, iters):
    n, p = X.shape
    U = X.copy()
    best = U.copy()
    best_f = math.inf
    G = np.empty((n, p))
    z = np.empty(p)
    sq = np.empty(n_groups)
    for m in range(1, iters + 1):
        f = 0.0
        for i in range(n):
            for k in range(p):
                G[i, k] = U[i, k] - X[i, k]
                f += 0.5 * G[i, k] * G[i, k]
        for l in range(heads.shape[0]):
            a = heads[l]
            b = tails[l]
            gw = gamma * w[l]
            for k in range(p):
                z[k] = U[a, k] - U[b, k]
            if code == 0:
                for k in range(p):
                    f += gw * abs(z[k])
                    if z[k] != 0.0:
                        sk = gw if z[k] > 0 else -gw
                        G[a, k] += sk
                        G[b, k] -= sk
            elif code == 2:
                top = 0
                for k in range(p):
                    if abs(z[k]) > abs(z[top]):
                        top = k
                f += gw * abs(z[top])
                if z[top] != 0.0:
                    sk = gw if z[top] > 0 else -gw
                    G[a, top] += sk
                    G[b, top] -= sk
            else:
                # l2 is the single-group case
                for g in range(n_groups):
                    sq[g] = 0.0
                for k in range(p):
                    sq[group_of[k]] += z[k] * z[k]
                for g in range(n_groups):
                    sq[g] = math.sqrt(sq[g])
                    f += gw * sq[g]
                for k in range(p):
                    r = sq[group_of[k]]
                    if r > 0:
                        G[a, k] += gw * z[k] / r
                        G[b, k] -= gw * z[k] / r
        if f < best_f:
            best_f = f
            for i in range(n):
                for k in range(p):
                    best[i, k] = U[i, k]
        step = c / math.sqrt(m)
        for i in range(n):
            for k in range(p):
                U[i, k] -= step * G[i, k]
    return best, best_f


def subgradient_reference(problem, iterations: int = 1_000_000, seed: int = 0, scale: float | None = None):
    """Minimize the clustering objective by subgradient descent.

    Steps are ``c / sqrt(m)`` with ``c = 0.1 * scale`` (``scale`` defaults to
    the data's standard deviation); the best-objective iterate is returned.
    The starting point is ``X``, so ``seed`` only labels the run.
    """
    X = np.asarray(problem.data.values, dtype=np.float64)
    graph = problem.graph
    kind, groups = _kind(problem.norm)
    p = X.shape[1]
    group_of = np.zeros(p, dtype=np.int64)
    n_groups = 1
    if kind == "group":
        n_groups = len(groups)
        for gi, g in enumerate(groups):
            for k in g:
                group_of[k] = gi
    if scale is None:
        scale = float(np.std(X)) or 1.0
    best, _ = _subgradient_loop(
        X, np.ascontiguousarray(graph.heads), np.ascontiguousarray(graph.tails),
        np.ascontiguousarray(graph.weights), float(problem.gamma), _KIND_CODES[kind],
        group_of, n_groups, 0.1 * scale, int(iterations),
    )
    return best


def dense_laplacian_spectrum(graph) -> np.ndarray:
    """Eigenvalues (ascending) of ``Phi^T Phi`` built densely from the edge list."""
    if graph.n > 50:
        raise ValueError("dense spectrum is meant for n <= 50")
    Phi = np.zeros((graph.n_edges, graph.n))
    for l, (a, b) in enumerate(zip(graph.heads, graph.tails)):
        Phi[l, a] = 1.0
        Phi[l, b] = -1.0
    return np.linalg.eigvalsh(Phi.T @ Phi)
