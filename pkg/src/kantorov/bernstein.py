"""Bernstein-type positive operators B_n built from the canonical
vertex selections: tensor-product basis on the interval/hypercube,
multinomial basis on the simplex.

B_n(f)(x) = sum_h basis(n, h, x) * f(h/n) over the admissible lattice.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .geometry import HYPERCUBE, INTERVAL, SIMPLEX, Domain, as_point, as_points, contains

# Above this order, basis evaluation moves to log-gamma form.
_DIRECT_N = 60

_CHUNK = 2048


@lru_cache(maxsize=None)
def _binom_row(n: int) -> np.ndarray:
    return np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)


@lru_cache(maxsize=None)
def lattice(domain: Domain, n: int) -> np.ndarray:
    """Admissible multi-indices, shape ``(L, d)``, dtype int.

    Hypercube/interval: ``{0..n}^d`` in lexicographic order.  Simplex:
    ``|h| <= n`` in colexicographic order.
    """
    d = domain.dim
    if domain.kind == SIMPLEX:
        rows = [
            rev[::-1]
            for rev in itertools.product(range(n + 1), repeat=d)
            if sum(rev) <= n
        ]
        return np.array(rows, dtype=int)
    idx = np.indices((n + 1,) * d).reshape(d, -1).T
    return idx


@lru_cache(maxsize=None)
def _multinomial_coeffs(domain: Domain, n: int) -> np.ndarray:
    """n! / (h_1! ... h_d! (n-|h|)!) over the simplex lattice."""
    latt = lattice(domain, n)
    out = np.empty(latt.shape[0])
    for j, h in enumerate(latt):
        c = math.factorial(n)
        for hi in h:
            c //= math.factorial(int(hi))
        c //= math.factorial(n - int(h.sum()))
        out[j] = float(c)
    return out


@lru_cache(maxsize=None)
def _log_multinomial_coeffs(domain: Domain, n: int) -> np.ndarray:
    latt = lattice(domain, n)
    rem = n - latt.sum(axis=1)
    lg = gammaln(n + 1) - gammaln(rem + 1.0)
    for i in range(latt.shape[1]):
        lg = lg - gammaln(latt[:, i] + 1.0)
    return lg


def _pow_table(t: np.ndarray, n: int) -> np.ndarray:
    """``t^k`` for k = 0..n via a cumulative product, shape ``(G, n+1)``."""
    out = np.ones((t.shape[0], n + 1))
    if n >= 1:
        np.cumprod(np.broadcast_to(t[:, None], (t.shape[0], n)), axis=1, out=out[:, 1:])
    return out


def _bern1d(n: int, t: np.ndarray) -> np.ndarray:
    """One-dimensional Bernstein basis row, shape ``(G, n+1)``."""
    t = np.asarray(t, dtype=float)
    if n <= _DIRECT_N:
        tk = _pow_table(t, n)
        sk = _pow_table(1.0 - t, n)[:, ::-1]
        return _binom_row(n) * tk * sk
    k = np.arange(n + 1)
    out = np.zeros((t.shape[0], n + 1))
    logc = gammaln(n + 1) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    interior = (t > 0.0) & (t < 1.0)
    ti = t[interior][:, None]
    out[interior] = np.exp(logc + k * np.log(ti) + (n - k) * np.log1p(-ti))
    out[t == 0.0, 0] = 1.0
    out[t == 1.0, n] = 1.0
    return out


def _simplex_basis_block(domain: Domain, n: int, xs: np.ndarray) -> np.ndarray:
    """Dense simplex basis values for a block of points, shape ``(g, L)``."""
    latt = lattice(domain, n)
    rem = n - latt.sum(axis=1)
    s = np.maximum(1.0 - xs.sum(axis=1), 0.0)
    if n <= _DIRECT_N:
        vals = np.broadcast_to(_multinomial_coeffs(domain, n), (xs.shape[0], latt.shape[0])).copy()
        for i in range(domain.dim):
            vals *= _pow_table(xs[:, i], n)[:, latt[:, i]]
        vals *= _pow_table(s, n)[:, rem]
        return vals
    logc = _log_multinomial_coeffs(domain, n)
    logs = np.where(s > 0.0, np.log(np.where(s > 0.0, s, 1.0)), 0.0)
    exps = logc + rem * logs[:, None]
    dead = (s[:, None] == 0.0) & (rem > 0)
    for i in range(domain.dim):
        xi = xs[:, i]
        logx = np.where(xi > 0.0, np.log(np.where(xi > 0.0, xi, 1.0)), 0.0)
        exps = exps + latt[:, i] * logx[:, None]
        dead |= (xi[:, None] == 0.0) & (latt[:, i] > 0)
    vals = np.exp(exps)
    vals[dead] = 0.0
    return vals


def _check_batch(domain: Domain, xs: np.ndarray) -> None:
    if xs.size == 0:
        raise ValueError("empty point batch")
    if np.min(xs) < 0.0 or (domain.kind != SIMPLEX and np.max(xs) > 1.0):
        raise ValueError("batch contains points outside the domain")
    if domain.kind == SIMPLEX and np.max(xs.sum(axis=1)) > 1.0 + 1e-12:
        raise ValueError("batch contains points outside the simplex")


def basis_weights(domain: Domain, n: int, xs: np.ndarray) -> np.ndarray:
    """All basis values at a batch of points, shape ``(G, L)``."""
    _check_batch(domain, xs)
    if domain.kind == SIMPLEX:
        return np.concatenate(
            [_simplex_basis_block(domain, n, xs[i : i + _CHUNK]) for i in range(0, xs.shape[0], _CHUNK)]
        )
    rows = _bern1d(n, xs[:, 0])
    for i in range(1, domain.dim):
        ri = _bern1d(n, xs[:, i])
        rows = (rows[:, :, None] * ri[:, None, :]).reshape(xs.shape[0], -1)
    return rows


def apply_lattice_values(domain: Domain, n: int, values: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Contract lattice values against the basis at each point.

    ``values`` has one entry per lattice multi-index (in ``lattice``
    order); returns ``sum_h basis(h, x) * values[h]`` for each row of
    ``xs``, using a per-axis tensor contraction on the hypercube.
    """
    _check_batch(domain, xs)
    d = domain.dim
    if domain.kind == SIMPLEX:
        out = np.empty(xs.shape[0])
        for i in range(0, xs.shape[0], _CHUNK):
            block = _simplex_basis_block(domain, n, xs[i : i + _CHUNK])
            out[i : i + _CHUNK] = block @ values
        return out
    tensor = values.reshape((n + 1,) * d)
    if d == 1:
        return _bern1d(n, xs[:, 0]) @ tensor
    if d == 2:
        tmp = _bern1d(n, xs[:, 0]) @ tensor
        return np.einsum("gj,gj->g", tmp, _bern1d(n, xs[:, 1]))
    tmp = np.einsum("gi,ijk->gjk", _bern1d(n, xs[:, 0]), tensor)
    tmp = np.einsum("gj,gjk->gk", _bern1d(n, xs[:, 1]), tmp)
    return np.einsum("gk,gk->g", _bern1d(n, xs[:, 2]), tmp)


def _validate_index(domain: Domain, n: int, h) -> np.ndarray:
    harr = np.atleast_1d(np.asarray(h, dtype=int))
    if harr.shape != (domain.dim,):
        raise ValueError(f"multi-index {h!r} does not match domain dim {domain.dim}")
    if np.any(harr < 0) or np.any(harr > n):
        raise ValueError(f"multi-index {h!r} out of range for order {n}")
    if domain.kind == SIMPLEX and harr.sum() > n:
        raise ValueError(f"multi-index {h!r} exceeds simplex order {n}")
    return harr


def basis(domain: Domain, n: int, h, x) -> float:
    """Single basis value P_{n,h}(x)."""
    harr = _validate_index(domain, n, h)
    p = as_point(domain, x)
    if not contains(domain, p):
        raise ValueError(f"point {p} outside the domain")
    if domain.kind == SIMPLEX:
        latt = lattice(domain, n)
        pos = int(np.nonzero(np.all(latt == harr, axis=1))[0][0])
        return float(_simplex_basis_block(domain, n, p[None, :])[0, pos])
    val = 1.0
    for i in range(domain.dim):
        val *= float(_bern1d(n, p[i : i + 1])[0, harr[i]])
    return val


def lattice_points(domain: Domain, n: int) -> np.ndarray:
    """The evaluation points h/n of B_n, shape ``(L, d)``."""
    return lattice(domain, n) / n


def eval_Bn(domain: Domain, n: int, f, x):
    """B_n(f) at a point or an ``(G, d)`` batch of points.

    The scalar path uses compensated summation over the lattice.
    """
    if n < 1:
        raise ValueError("operator index n must be >= 1")
    values = np.asarray(f(lattice_points(domain, n)), dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        pt = lattice_points(domain, n)[np.nonzero(bad)[0][0]]
        raise ValueError(f"function non-finite at lattice point {pt}")
    xs, single = as_points(domain, x)
    if single:
        if not contains(domain, xs[0]):
            raise ValueError(f"point {xs[0]} outside the domain")
        w = basis_weights(domain, n, xs)[0]
        return math.fsum((w * values).tolist())
    return apply_lattice_values(domain, n, values, xs)
