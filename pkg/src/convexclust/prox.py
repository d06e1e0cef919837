"""Proximal maps of the penalty norms and projections onto dual-norm balls.

All functions act on the last axis, so a stack of edge vectors of shape
``(m, p)`` is handled in one call; ``sigma`` and ``radius`` may then be
scalars or length-``m`` arrays.
"""

from __future__ import annotations

import numpy as np

from .model import PenaltyNorm

__all__ = ["prox", "project_ball", "project_simplex", "project_l1_ball", "moreau_check"]


def _as_column(t, z):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise ValueError("threshold/radius must be nonnegative")
    if t.ndim and z.ndim > 1:
        t = t[..., None]
    return t


def project_simplex(z, radius=1.0):
    """Euclidean projection of ``z`` onto ``{y >= 0, sum(y) = radius}``.

    Sort-and-threshold in ``O(p log p)``; works row-wise on 2-D input.
    """
    z = np.asarray(z, dtype=np.float64)
    radius = np.asarray(radius, dtype=np.float64)
    if np.any(radius <= 0):
        raise ValueError("simplex radius must be positive")
    squeeze = z.ndim == 1
    Z = np.atleast_2d(z)
    r = np.broadcast_to(radius, Z.shape[:1])
    mu = -np.sort(-Z, axis=1)
    css = np.cumsum(mu, axis=1) - r[:, None]
    idx = np.arange(1, Z.shape[1] + 1)
    # last position where the sorted entry exceeds the running threshold
    cond = mu - css / idx > 0
    # the first entry always qualifies in exact arithmetic; rounding can hide it
    cond[:, 0] = True
    rho = Z.shape[1] - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(Z.shape[0]), rho - 1] / rho
    out = np.maximum(Z - theta[:, None], 0.0)
    return out[0] if squeeze else out


def project_l1_ball(z, radius):
    """Euclidean projection onto ``{y : ||y||_1 <= radius}``."""
    z = np.asarray(z, dtype=np.float64)
    squeeze = z.ndim == 1
    Z = np.atleast_2d(z)
    r = np.broadcast_to(np.asarray(radius, dtype=np.float64), Z.shape[:1])
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    out = Z.copy()
    outside = np.abs(Z).sum(axis=1) > r
    zero = outside & (r == 0)
    out[zero] = 0.0
    rows = outside & ~zero
    if np.any(rows):
        A = np.abs(Z[rows])
        out[rows] = np.sign(Z[rows]) * project_simplex(A, r[rows])
    return out[0] if squeeze else out


def _group_scale(norm, Z, t, shrink):
    out = np.empty_like(Z)
    for g in norm.groups:
        g = list(g)
        out[..., g] = _l2_scale(Z[..., g], t, shrink)
    return out


def _l2_scale(Z, t, shrink):
    nrm = np.linalg.norm(Z, axis=-1, keepdims=True)
    t = np.broadcast_to(t, nrm.shape) if np.ndim(t) else t
    safe = np.where(nrm > 0, nrm, 1.0)
    if shrink:
        # block soft-thresholding; v = 0 maps to 0
        factor = np.where(nrm > 0, np.maximum(1.0 - t / safe, 0.0), 0.0)
    else:
        # radial projection onto the ball of radius t
        factor = np.where(nrm > t, t / safe, 1.0)
    return factor * Z


def prox(norm: PenaltyNorm, v, sigma):
    """Proximal map ``argmin_u sigma * ||u|| + 1/2 ||u - v||_2^2``."""
    if isinstance(norm, str):
        norm = PenaltyNorm.parse(norm)
    v = np.asarray(v, dtype=np.float64)
    s = _as_column(sigma, v)
    if norm.kind == "l1":
        return np.sign(v) * np.maximum(np.abs(v) - s, 0.0)
    if norm.kind == "l2":
        return _l2_scale(v, s, shrink=True)
    if norm.kind == "group":
        return _group_scale(norm, v, s, shrink=True)
    # linf: Moreau with the l1 ball
    return v - project_l1_ball(v, sigma)


def project_ball(norm: PenaltyNorm, z, radius):
    """Project onto the ball of the *dual* norm of ``norm`` with given radius.

    The balls are: l1 -> l-infinity box (clamp), l2 -> l2 ball, linf -> l1
    ball, group -> per-group l2 balls.
    """
    if isinstance(norm, str):
        norm = PenaltyNorm.parse(norm)
    z = np.asarray(z, dtype=np.float64)
    r = _as_column(radius, z)
    if norm.kind == "l1":
        return np.clip(z, -r, r)
    if norm.kind == "l2":
        return _l2_scale(z, r, shrink=False)
    if norm.kind == "group":
        return _group_scale(norm, z, r, shrink=False)
    return project_l1_ball(z, radius)


def moreau_check(norm: PenaltyNorm, z, t):
    """Return ``(prox_{t||.||}(z), P_{tB}(z))``; the two sum to ``z``."""
    return prox(norm, z, t), project_ball(norm, z, t)
