"""Problem definition and primal/dual objective evaluation.

Centroids, edge differences and dual variables are plain float64 arrays:
centroids are ``(n, p)`` with one row per point, and edge-indexed
quantities (``V``, ``lambdas``) are ``(n_edges, p)`` in the graph's edge
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graph import WeightGraph

__all__ = [
    "DataMatrix",
    "PenaltyNorm",
    "ClusterProblem",
    "FEASIBILITY_SLACK",
    "is_feasible",
    "primal_objective",
    "split_objective",
    "dual_objective",
    "duality_gap",
]

# relative slack on ||lambda_l||_dual <= gamma * w_l
FEASIBILITY_SLACK = 1e-12


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """Observations stored row-wise, ``values`` has shape ``(n, p)``."""

    values: np.ndarray
    grand_mean: np.ndarray = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"data must be a non-empty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("data contains non-finite entries")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "grand_mean", _frozen(values.mean(axis=0)))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PenaltyNorm:
    """Norm used in the fusion penalty.

    ``kind`` is one of ``"l1"``, ``"l2"``, ``"linf"`` or ``"group"``. The
    group norm is a sum of Euclidean norms over ``groups``, a partition of
    the (0-based) feature indices.
    """

    kind: str
    groups: tuple[tuple[int, ...], ...] | None = None

    KINDS = ("l1", "l2", "linf", "group")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown norm {self.kind!r}; expected one of {self.KINDS}")
        if self.kind == "group":
            if not self.groups:
                raise ValueError("group norm needs a non-empty partition of features")
            groups = tuple(tuple(int(i) for i in g) for g in self.groups)
            if any(len(g) == 0 for g in groups):
                raise ValueError("groups must be nonempty")
            flat = [i for g in groups for i in g]
            if len(flat) != len(set(flat)):
                raise ValueError("groups must be disjoint")
            if sorted(flat) != list(range(len(flat))):
                raise ValueError("groups must cover features 0..p-1")
            object.__setattr__(self, "groups", groups)
        elif self.groups is not None:
            raise ValueError(f"groups only apply to the group norm, not {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "PenaltyNorm":
        """Parse ``l1``, ``l2``, ``linf`` or ``group:0,1;2,3``."""
        text = text.strip().lower()
        if text.startswith("group:"):
            spec = text[len("group:"):]
            groups = tuple(
                tuple(int(i) for i in part.split(",")) for part in spec.split(";") if part
            )
            return cls("group", groups)
        return cls(text)

    def __str__(self):
        if self.kind == "group":
            return "group:" + ";".join(",".join(map(str, g)) for g in self.groups)
        return self.kind

    def check_dimension(self, p: int) -> None:
        if self.kind == "group" and sum(len(g) for g in self.groups) != p:
            raise ValueError(f"group partition covers {sum(map(len, self.groups))} features, data has {p}")

    def _group_norms(self, v):
        return np.stack([np.linalg.norm(v[..., list(g)], axis=-1) for g in self.groups], axis=-1)

    def norm(self, v) -> np.ndarray:
        """Norm of ``v`` along the last axis."""
        v = np.asarray(v, dtype=np.float64)
        if self.kind == "l1":
            return np.abs(v).sum(axis=-1)
        if self.kind == "l2":
            return np.linalg.norm(v, axis=-1)
        if self.kind == "linf":
            return np.abs(v).max(axis=-1, initial=0.0)
        return self._group_norms(v).sum(axis=-1)

    def dual_norm(self, v) -> np.ndarray:
        """Dual norm of ``v`` along the last axis."""
        v = np.asarray(v, dtype=np.float64)
        if self.kind == "l1":
            return np.abs(v).max(axis=-1, initial=0.0)
        if self.kind == "l2":
            return np.linalg.norm(v, axis=-1)
        if self.kind == "linf":
            return np.abs(v).sum(axis=-1)
        return self._group_norms(v).max(axis=-1)


@dataclass(frozen=True, eq=False)
class ClusterProblem:
    """Convex clustering instance at a fixed regularization level ``gamma``."""

    data: DataMatrix
    graph: WeightGraph
    norm: PenaltyNorm
    gamma: float

    def __post_init__(self):
        if not isinstance(self.data, DataMatrix):
            object.__setattr__(self, "data", DataMatrix(self.data))
        if isinstance(self.norm, str):
            object.__setattr__(self, "norm", PenaltyNorm.parse(self.norm))
        if self.graph.n != self.data.n:
            raise ValueError(f"graph has {self.graph.n} nodes but data has {self.data.n} rows")
        gamma = float(self.gamma)
        if not np.isfinite(gamma) or gamma < 0:
            raise ValueError(f"gamma must be a finite nonnegative number, got {self.gamma}")
        object.__setattr__(self, "gamma", gamma)
        self.norm.check_dimension(self.data.p)

    def with_gamma(self, gamma: float) -> "ClusterProblem":
        new = ClusterProblem(self.data, self.graph, self.norm, gamma)
        # gamma-independent caches carry over
        for key in ("edge_data_differences",):
            if key in self.__dict__:
                new.__dict__[key] = self.__dict__[key]
        return new

    @property
    def X(self) -> np.ndarray:
        return self.data.values

    @cached_property
    def edge_data_differences(self) -> np.ndarray:
        """Rows ``x_{l1} - x_{l2}``, one per edge."""
        return self.graph.differences(self.X)

    @property
    def radii(self) -> np.ndarray:
        """Dual-ball radii ``gamma * w_l``."""
        return self.gamma * self.graph.weights


def _check_centroids(problem, U):
    U = np.asarray(U, dtype=np.float64)
    if U.shape != problem.X.shape:
        raise ValueError(f"centroids have shape {U.shape}, expected {problem.X.shape}")
    return U


def _check_edge_array(problem, A, name):
    A = np.asarray(A, dtype=np.float64)
    expected = (problem.graph.n_edges, problem.data.p)
    if A.shape != expected:
        raise ValueError(f"{name} has shape {A.shape}, expected {expected}")
    return A


def is_feasible(problem: ClusterProblem, lambdas) -> bool:
    """True iff every ``lambda_l`` lies in its dual ball of radius ``gamma * w_l``."""
    lambdas = _check_edge_array(problem, lambdas, "lambdas")
    if lambdas.shape[0] == 0:
        return True
    radii = problem.radii
    return bool(np.all(problem.norm.dual_norm(lambdas) <= radii * (1.0 + FEASIBILITY_SLACK)))


def primal_objective(problem: ClusterProblem, U) -> float:
    """Clustering objective ``1/2 sum ||x_i - u_i||^2 + gamma sum w_l ||u_l1 - u_l2||``."""
    U = _check_centroids(problem, U)
    fit = 0.5 * float(np.sum((problem.X - U) ** 2))
    if problem.graph.n_edges == 0 or problem.gamma == 0.0:
        return fit
    pen = problem.norm.norm(problem.graph.differences(U))
    return fit + problem.gamma * float(problem.graph.weights @ pen)


def split_objective(problem: ClusterProblem, U, V) -> float:
    """Objective of the split problem, ``1/2 sum ||x_i - u_i||^2 + gamma sum w_l ||v_l||``."""
    U = _check_centroids(problem, U)
    V = _check_edge_array(problem, V, "V")
    fit = 0.5 * float(np.sum((problem.X - U) ** 2))
    if V.shape[0] == 0:
        return fit
    return fit + problem.gamma * float(problem.graph.weights @ problem.norm.norm(V))


def dual_objective(problem: ClusterProblem, lambdas) -> float:
    """Dual function value, ``-inf`` when some ``lambda_l`` leaves its ball."""
    lambdas = _check_edge_array(problem, lambdas, "lambdas")
    if not is_feasible(problem, lambdas):
        return -np.inf
    deltas = problem.graph.adjoint(lambdas)
    return -0.5 * float(np.sum(deltas**2)) - float(np.sum(lambdas * problem.edge_data_differences))


def duality_gap(problem: ClusterProblem, U, lambdas) -> float:
    """Primal minus dual objective. Raises if ``lambdas`` is infeasible."""
    dual = dual_objective(problem, lambdas)
    if dual == -np.inf:
        raise ValueError("duality gap requested for infeasible dual variables")
    return primal_objective(problem, U) - dual
