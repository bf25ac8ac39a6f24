"""Grid estimators for moduli of continuity and smoothness.

Every estimator scans a uniform grid and is a lower approximation of
the true supremum (converging as the resolution grows); consumers that
need a safe upper bound must either inflate these values or use the
catalog's exact formulas.  Functions are anything callable on ``(G, d)``
batches, in particular :class:`~kantorov.catalog.CatalogFunction`.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import SIMPLEX, Domain, uniform_grid

_BLOCK = 512


def _dist(diff: np.ndarray, metric: str) -> np.ndarray:
    if metric == "l2":
        return np.sqrt((diff**2).sum(axis=-1))
    if metric == "l1":
        return np.abs(diff).sum(axis=-1)
    raise ValueError(f"unknown metric {metric!r}")


def _values(f, pts: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(pts), dtype=float)
    if vals.shape != (pts.shape[0],):
        raise ValueError("function must map (G, d) points to (G,) values")
    return vals


def omega1(f, domain: Domain, delta: float, m: int, metric: str = "l2") -> float:
    """First modulus: sup |f(x)-f(y)| over grid pairs with dist <= delta."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if m < 2:
        raise ValueError("resolution m must be >= 2")
    pts = uniform_grid(domain, m)
    fv = _values(f, pts)
    best = 0.0
    for i in range(0, pts.shape[0], _BLOCK):
        diff = pts[i : i + _BLOCK, None, :] - pts[None, :, :]
        mask = _dist(diff, metric) <= delta
        gaps = np.abs(fv[i : i + _BLOCK, None] - fv[None, :])
        best = max(best, float(np.max(np.where(mask, gaps, 0.0))))
    return best


def _midpoint_index(domain: Domain, m: int) -> np.ndarray:
    """Map a multi-index on the 2m grid to its flat grid position."""
    shape = (2 * m + 1,) * domain.dim
    if domain.kind != SIMPLEX:
        return np.arange(np.prod(shape)).reshape(shape)
    posmap = np.full(shape, -1)
    idx = np.indices(shape).reshape(domain.dim, -1).T
    keep = idx.sum(axis=1) <= 2 * m
    posmap[tuple(idx[keep].T)] = np.arange(int(keep.sum()))
    return posmap


def omega2(f, domain: Domain, delta: float, m: int) -> float:
    """Second modulus: sup |f(x) - 2f((x+y)/2) + f(y)|, dist(x,y) <= 2*delta."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if m < 2:
        raise ValueError("resolution m must be >= 2")
    pts = uniform_grid(domain, m)
    pts2 = uniform_grid(domain, 2 * m)
    fv = _values(f, pts)
    fv2 = _values(f, pts2)
    idx = np.rint(pts * m).astype(int)
    posmap = _midpoint_index(domain, m)
    best = 0.0
    for i in range(0, pts.shape[0], _BLOCK):
        ib = idx[i : i + _BLOCK]
        diff = pts[i : i + _BLOCK, None, :] - pts[None, :, :]
        mask = _dist(diff, "l2") <= 2.0 * delta
        midpos = posmap[tuple((ib[:, None, :] + idx[None, :, :]).transpose(2, 0, 1))]
        second = np.abs(fv[i : i + _BLOCK, None] - 2.0 * fv2[midpos] + fv[None, :])
        best = max(best, float(np.max(np.where(mask, second, 0.0))))
    return best


def _grid_quad_weights(domain: Domain, m: int) -> np.ndarray:
    """L^p quadrature weights on the uniform grid (total = volume).

    Tensor trapezoid on the interval/hypercube; uniform weights on the
    simplex (a documented low-order approximation).
    """
    if domain.kind == SIMPLEX:
        count = uniform_grid(domain, m).shape[0]
        return np.full(count, domain.volume / count)
    w1 = np.full(m + 1, 1.0 / m)
    w1[0] = w1[-1] = 0.5 / m
    w = w1
    for _ in range(domain.dim - 1):
        w = (w[:, None] * w1[None, :]).reshape(-1)
    return w


def tau_p(f, domain: Domain, delta: float, p: float, m: int) -> float:
    """Averaged modulus: L^p norm of the local oscillation over
    Euclidean balls of radius delta/2."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    pts = uniform_grid(domain, m)
    fv = _values(f, pts)
    lo = np.empty(pts.shape[0])
    hi = np.empty(pts.shape[0])
    for i in range(0, pts.shape[0], _BLOCK):
        diff = pts[i : i + _BLOCK, None, :] - pts[None, :, :]
        mask = _dist(diff, "l2") <= delta / 2.0
        vals = np.where(mask, fv[None, :], np.nan)
        hi[i : i + _BLOCK] = np.nanmax(vals, axis=1)
        lo[i : i + _BLOCK] = np.nanmin(vals, axis=1)
    osc = hi - lo
    w = _grid_quad_weights(domain, m)
    return float((w @ osc**p) ** (1.0 / p))


def _directions(domain: Domain, seed: int = 0) -> np.ndarray:
    """Unit directions for difference sampling: axes, diagonals, and a
    fixed-seed random batch in d >= 2."""
    d = domain.dim
    if d == 1:
        return np.array([[1.0], [-1.0]])
    axes = np.concatenate([np.eye(d), -np.eye(d)])
    corners = np.array(
        [c for c in np.indices((2,) * d).reshape(d, -1).T], dtype=float
    )
    diags = (2.0 * corners - 1.0) / math.sqrt(d)
    rng = np.random.default_rng(seed)
    rand = rng.normal(size=(16, d))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    return np.concatenate([axes, diags, rand])


def _inside_tol(domain: Domain, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    ok = (pts >= -tol).all(axis=1) & (pts <= 1.0 + tol).all(axis=1)
    if domain.kind == SIMPLEX:
        ok &= pts.sum(axis=1) <= 1.0 + tol
    return ok


_N_MAGNITUDES = 16


def omega_kp(f, domain: Domain, k: int, delta: float, p: float, m: int, seed: int = 0) -> float:
    """Order-k L^p modulus: max over sampled steps h with |h| <= delta
    of the L^p norm of the k-th forward difference (zero once x + k h
    leaves the domain)."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if k < 1:
        raise ValueError("difference order k must be >= 1")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    pts = uniform_grid(domain, m)
    w = _grid_quad_weights(domain, m)
    coeffs = np.array([(-1.0) ** (k - l) * math.comb(k, l) for l in range(k + 1)])
    best = 0.0
    for u in _directions(domain, seed):
        for j in range(1, _N_MAGNITUDES + 1):
            h = (delta * j / _N_MAGNITUDES) * u
            valid = _inside_tol(domain, pts + k * h)
            if not np.any(valid):
                continue
            xs = pts[valid]
            acc = np.zeros(xs.shape[0])
            for l in range(k + 1):
                acc += coeffs[l] * _values(f, xs + l * h)
            norm = float((w[valid] @ np.abs(acc) ** p) ** (1.0 / p))
            best = max(best, norm)
    return best


def lipschitz_estimate(f, domain: Domain, m: int, metric: str = "l2") -> float:
    """Largest grid secant quotient |f(x)-f(y)| / dist(x,y)."""
    if m < 2:
        raise ValueError("resolution m must be >= 2")
    pts = uniform_grid(domain, m)
    fv = _values(f, pts)
    best = 0.0
    for i in range(0, pts.shape[0], _BLOCK):
        diff = pts[i : i + _BLOCK, None, :] - pts[None, :, :]
        dist = _dist(diff, metric)
        gaps = np.abs(fv[i : i + _BLOCK, None] - fv[None, :])
        quot = np.where(dist > 0.0, gaps / np.where(dist > 0.0, dist, 1.0), 0.0)
        best = max(best, float(np.max(quot)))
    return best


def total_modulus_upper(f, domain: Domain, delta: float, m: int) -> float:
    """Upper bound for the total modulus via the plain first modulus at
    the domain-scaled argument (an equality on the interval)."""
    return omega1(f, domain, delta * domain.modulus_scale, m)
