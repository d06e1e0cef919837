"""Sparse weight graphs over the data points."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

__all__ = [
    "WeightGraph",
    "DisconnectedGraphWarning",
    "build_knn_gaussian_weights",
    "complete_graph",
    "connected_components",
    "is_connected",
    "spectral_step_bound",
]


class DisconnectedGraphWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class WeightGraph:
    """Undirected weighted graph stored as an edge list.

    Nodes are 0-based. Edge ``l`` joins ``heads[l] < tails[l]`` with weight
    ``weights[l] > 0``; edges are kept in lexicographic order.
    """

    n: int
    heads: np.ndarray
    tails: np.ndarray
    weights: np.ndarray
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError("graph needs at least one node")
        heads = np.asarray(self.heads, dtype=np.int64).ravel()
        tails = np.asarray(self.tails, dtype=np.int64).ravel()
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        if not (heads.shape == tails.shape == weights.shape):
            raise ValueError("heads, tails and weights must have equal length")
        if heads.size:
            if np.any(heads >= tails):
                raise ValueError("edges must satisfy head < tail")
            if heads.min() < 0 or tails.max() >= n:
                raise ValueError("edge endpoint out of range")
            if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
                raise ValueError("edge weights must be finite and strictly positive")
            order = np.lexsort((tails, heads))
            heads, tails, weights = heads[order], tails[order], weights[order]
            dup = (np.diff(heads) == 0) & (np.diff(tails) == 0)
            if np.any(dup):
                raise ValueError("duplicate edges")
        degrees = np.bincount(heads, minlength=n) + np.bincount(tails, minlength=n)
        for name, arr in (("heads", heads), ("tails", tails), ("weights", weights), ("degrees", degrees)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_edges(cls, n, edges):
        """Build from ``(i, j, w)`` triples with ``i != j`` in any orientation."""
        edges = list(edges)
        if not edges:
            return cls(n, [], [], [])
        i, j, w = (np.asarray(c) for c in zip(*edges))
        return cls(n, np.minimum(i, j), np.maximum(i, j), w)

    @property
    def n_edges(self) -> int:
        return self.heads.size

    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """Oriented edge-vertex incidence matrix, ``+1`` at the head and ``-1`` at the tail."""
        m = self.n_edges
        rows = np.repeat(np.arange(m), 2)
        cols = np.column_stack([self.heads, self.tails]).ravel()
        vals = np.tile([1.0, -1.0], m)
        return sp.csr_matrix((vals, (rows, cols)), shape=(m, self.n))

    @cached_property
    def _incidence_t(self) -> sp.csr_matrix:
        return self.incidence.T.tocsr()

    def differences(self, U) -> np.ndarray:
        """Rows ``u_{l1} - u_{l2}`` for every edge."""
        return self.incidence @ U

    def adjoint(self, E) -> np.ndarray:
        """Per-node sums ``sum_{l1=i} e_l - sum_{l2=i} e_l`` of edge rows."""
        return self._incidence_t @ E

    @property
    def is_complete(self) -> bool:
        return self.n_edges == self.n * (self.n - 1) // 2

    @cached_property
    def components(self) -> tuple[np.ndarray, int]:
        return connected_components(self.n, self.heads, self.tails)

    @property
    def n_components(self) -> int:
        return self.components[1]

    @property
    def connected(self) -> bool:
        return self.n_components == 1

    def laplacian(self) -> sp.csr_matrix:
        """Unweighted Laplacian ``Phi^T Phi``."""
        return (self._incidence_t @ self.incidence).tocsr()


def connected_components(n, heads, tails, mask=None):
    """Label the connected components of an edge list by breadth-first search.

    Labels are assigned in order of discovery, scanning start nodes from the
    lowest index, so node 0 is always in component 0.

    Returns
    -------
    labels : ndarray of int, shape (n,)
    count : int
    """
    heads = np.asarray(heads, dtype=np.int64)
    tails = np.asarray(tails, dtype=np.int64)
    if mask is not None:
        heads, tails = heads[mask], tails[mask]
    # CSR adjacency
    src = np.concatenate([heads, tails])
    dst = np.concatenate([tails, heads])
    order = np.argsort(src, kind="stable")
    dst = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    dst = dst.tolist()
    indptr = indptr.tolist()
    labels = [-1] * n
    count = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        labels[start] = count
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nb in dst[indptr[node]:indptr[node + 1]]:
                if labels[nb] < 0:
                    labels[nb] = count
                    queue.append(nb)
        count += 1
    labels = np.asarray(labels, dtype=np.int64)
    return labels, count


def is_connected(graph: WeightGraph) -> bool:
    return graph.connected


def spectral_step_bound(graph: WeightGraph) -> float:
    """Upper bound on the largest Laplacian eigenvalue.

    Uses ``min(n, max{d(i) + d(j) : (i, j) in E})``. The AMA step ``1/bound``
    is always admissible.
    """
    if graph.n_edges == 0:
        raise ValueError("step bound undefined for a graph without edges")
    deg = graph.degrees
    return float(min(graph.n, int(np.max(deg[graph.heads] + deg[graph.tails]))))


def complete_graph(n: int, weights=None) -> WeightGraph:
    """All pairs ``i < j``, with unit weights unless given (in ``triu`` order)."""
    heads, tails = np.triu_indices(n, k=1)
    if weights is None:
        weights = np.ones(heads.size)
    return WeightGraph(n, heads, tails, weights)


def _knn_indices(X, k, block_entries=1 << 22):
    """Indices of the ``k`` nearest neighbors of every row, ties to lower index.

    Distances are computed in row blocks of about ``block_entries`` values,
    so peak memory does not grow as ``n^2``.
    """
    n = X.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    step = max(1, block_entries // n)
    for start in range(0, n, step):
        stop = min(n, start + step)
        d2 = cdist(X[start:stop], X, "sqeuclidean")
        d2[np.arange(stop - start), np.arange(start, stop)] = np.inf
        # k-th smallest distance per row; everything strictly closer is in,
        # and the remaining slots go to the lowest-index points at that distance
        kth = np.partition(d2, k - 1, axis=1)[:, k - 1:k]
        closer = d2 < kth
        tied = d2 == kth
        room = k - closer.sum(axis=1, keepdims=True)
        chosen = closer | (tied & (np.cumsum(tied, axis=1) <= room))
        # nonzero walks rows in order and each row has exactly k chosen entries
        out[start:stop] = np.nonzero(chosen)[1].reshape(-1, k)
    return out


def build_knn_gaussian_weights(data, k: int, phi: float, warn: bool = True) -> WeightGraph:
    """Symmetric k-nearest-neighbor graph with Gaussian kernel weights.

    Points ``i`` and ``j`` are joined when either is among the other's ``k``
    nearest neighbors (Euclidean distance, ties broken by lower index), with
    weight ``exp(-phi * ||x_i - x_j||^2)``.

    Parameters
    ----------
    data : DataMatrix or array of shape (n, p)
    k : int
        Number of neighbors, ``1 <= k <= n - 1``.
    phi : float
        Kernel bandwidth; ``phi = 0`` gives uniform unit weights.
    warn : bool
        Emit a ``DisconnectedGraphWarning`` when the result is disconnected.
    """
    X = np.asarray(getattr(data, "values", data), dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not (1 <= k <= n - 1):
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    if phi < 0 or not np.isfinite(phi):
        raise ValueError(f"phi must be finite and nonnegative, got {phi}")

    nbrs = _knn_indices(X, k)

    rows = np.repeat(np.arange(n), k)
    cols = nbrs.ravel()
    heads = np.minimum(rows, cols)
    tails = np.maximum(rows, cols)
    pairs = np.unique(heads * n + tails)
    heads, tails = pairs // n, pairs % n

    dist2 = np.sum((X[heads] - X[tails]) ** 2, axis=1)
    weights = np.exp(-phi * dist2)
    if np.any(weights <= 0):
        raise ValueError("phi is too large: some kernel weights underflow to zero")
    graph = WeightGraph(n, heads, tails, weights)
    if warn and not graph.connected:
        warnings.warn(
            f"k-NN graph has {graph.n_components} connected components; "
            "the objective separates over them",
            DisconnectedGraphWarning,
            stacklevel=2,
        )
    return graph
