"""Domains (interval, hypercube, simplex), grids and quadrature rules.

Points are float numpy arrays of shape ``(d,)``; batches of points have
shape ``(G, d)``.  Functions handed to the integrators must accept a
``(Q, d)`` array and return a ``(Q,)`` array.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError

INTERVAL = "interval"
HYPERCUBE = "hypercube"
SIMPLEX = "simplex"

_KINDS = (INTERVAL, HYPERCUBE, SIMPLEX)

MAX_DIM = 3


@dataclass(frozen=True)
class Domain:
    """One of: unit interval, unit hypercube ``[0,1]^d``, unit simplex
    ``{x >= 0, sum(x) <= 1}``."""

    kind: str
    dim: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == INTERVAL and self.dim != 1:
            raise ValueError("interval domain must have dim=1")
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dim must be in [1, {MAX_DIM}], got {self.dim}")

    @classmethod
    def interval(cls) -> "Domain":
        return cls(INTERVAL, 1)

    @classmethod
    def hypercube(cls, dim: int) -> "Domain":
        return cls(HYPERCUBE, dim)

    @classmethod
    def simplex(cls, dim: int) -> "Domain":
        return cls(SIMPLEX, dim)

    @property
    def volume(self) -> float:
        """Lebesgue volume: 1, except 1/d! for the simplex."""
        if self.kind == SIMPLEX:
            return 1.0 / math.factorial(self.dim)
        return 1.0

    @property
    def diameter(self) -> float:
        """Euclidean diameter."""
        if self.kind == HYPERCUBE:
            return math.sqrt(self.dim)
        if self.kind == SIMPLEX:
            return math.sqrt(2.0) if self.dim >= 2 else 1.0
        return 1.0

    @property
    def modulus_scale(self) -> float:
        """Scale factor converting a total-modulus argument into a
        plain first-modulus argument: 1 for the interval and simplex,
        sqrt(d) for the hypercube."""
        if self.kind == HYPERCUBE:
            return math.sqrt(self.dim)
        return 1.0

    def vertices(self) -> np.ndarray:
        """Extreme points, shape ``(V, d)``.

        Interval: 0, 1.  Hypercube: the 2^d binary corners in
        lexicographic order.  Simplex: the origin followed by the
        canonical unit vectors.
        """
        d = self.dim
        if self.kind == INTERVAL:
            return np.array([[0.0], [1.0]])
        if self.kind == HYPERCUBE:
            verts = list(itertools.product((0.0, 1.0), repeat=d))
            return np.array(verts)
        verts = np.zeros((d + 1, d))
        for i in range(d):
            verts[i + 1, i] = 1.0
        return verts


def as_point(domain: Domain, x) -> np.ndarray:
    """Coerce ``x`` to a ``(d,)`` float array, checking the dimension."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.shape != (domain.dim,):
        raise ValueError(
            f"point of shape {p.shape} does not match domain dim {domain.dim}"
        )
    return p


def as_points(domain: Domain, xs) -> tuple[np.ndarray, bool]:
    """Coerce ``xs`` to a ``(G, d)`` batch.  Returns (batch, was_single)."""
    arr = np.asarray(xs, dtype=float)
    if arr.ndim <= 1:
        return as_point(domain, arr)[None, :], True
    if arr.ndim != 2 or arr.shape[1] != domain.dim:
        raise ValueError(
            f"point batch of shape {arr.shape} does not match domain dim {domain.dim}"
        )
    return arr, False


def contains(domain: Domain, x) -> bool:
    """Exact membership test (tolerance 0).

    Callers holding points that are inside only up to rounding noise
    must clamp them explicitly before calling.
    """
    p = as_point(domain, x)
    if domain.kind == SIMPLEX:
        return bool(np.all(p >= 0.0)) and math.fsum(p.tolist()) <= 1.0
    return bool(np.all(p >= 0.0) and np.all(p <= 1.0))


def uniform_grid(domain: Domain, m: int) -> np.ndarray:
    """Lattice ``{i/m}`` restricted to the domain, shape ``(G, d)``.

    Ordering is lexicographic in the index tuple.  Rows are constructed
    so that ``contains`` holds exactly for every returned point (on the
    simplex the last coordinate of boundary rows is computed as one
    minus the float sum of the others, which keeps the float coordinate
    sum at or below one).
    """
    if m < 1:
        raise ValueError("grid resolution m must be >= 1")
    d = domain.dim
    idx = np.indices((m + 1,) * d).reshape(d, -1).T
    if domain.kind == SIMPLEX:
        sums = idx.sum(axis=1)
        idx = idx[sums <= m]
        pts = idx / m
        boundary = idx.sum(axis=1) == m
        if d > 1:
            for row in np.nonzero(boundary)[0]:
                pts[row, -1] = 1.0 - math.fsum(pts[row, :-1].tolist())
        else:
            pts[boundary, 0] = 1.0
        return pts
    return idx / m


@dataclass(frozen=True)
class QuadratureRule:
    """Positive-weight rule: nodes ``(Q, d)`` inside the domain, raw
    (unnormalized) weights summing to the domain volume."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes.ndim != 2 or self.weights.ndim != 1:
            raise ValueError("nodes must be (Q, d) and weights (Q,)")
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise ValueError("nodes/weights length mismatch")
        if np.any(self.weights <= 0.0):
            raise ValueError("quadrature weights must be positive")


def _gauss01(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(level)
    return (x + 1.0) / 2.0, w / 2.0


def _tensor(nodes_1d: np.ndarray, weights_1d: np.ndarray, d: int):
    grids = np.meshgrid(*([nodes_1d] * d), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=1)
    wgrids = np.meshgrid(*([weights_1d] * d), indexing="ij")
    weights = np.ones(nodes.shape[0])
    for wg in wgrids:
        weights = weights * wg.reshape(-1)
    return nodes, weights


def simplex_from_cube(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse map from the unit cube onto the simplex.

    ``x_1 = u_1``, ``x_j = u_j * prod_{i<j}(1 - u_i)``.  Returns the
    mapped points and the Jacobian ``prod_{j<d} (1-u_j)^(d-j)``.
    """
    u = np.atleast_2d(u)
    d = u.shape[1]
    x = np.empty_like(u)
    shrink = np.ones(u.shape[0])
    jac = np.ones(u.shape[0])
    for j in range(d):
        x[:, j] = u[:, j] * shrink
        if j < d - 1:
            shrink = shrink * (1.0 - u[:, j])
            jac = jac * (1.0 - u[:, j]) ** (d - 1 - j)
    return x, jac


def quadrature_rule(domain: Domain, level: int) -> QuadratureRule:
    """Rule exact for all monomials of total degree <= 2*level - 1.

    Interval/hypercube: tensor Gauss-Legendre with ``level`` nodes per
    axis.  Simplex: a collapsed (cube-to-simplex) tensor rule; the map's
    Jacobian raises per-axis degrees, so ``level + 1`` nodes per axis
    are used there to keep the same total-degree exactness.
    """
    if level < 1:
        raise ValueError("quadrature level must be >= 1")
    d = domain.dim
    if domain.kind == SIMPLEX:
        n1, w1 = _gauss01(level + 1)
        unodes, uweights = _tensor(n1, w1, d)
        nodes, jac = simplex_from_cube(unodes)
        return QuadratureRule(nodes, uweights * jac)
    n1, w1 = _gauss01(level)
    nodes, weights = _tensor(n1, w1, d)
    return QuadratureRule(nodes, weights)


def integrate(domain: Domain, f, rule: QuadratureRule) -> float:
    """Apply the rule to ``f`` with compensated summation.

    Raises :class:`NumericError` (carrying the node) if ``f`` produces a
    non-finite value.
    """
    values = np.asarray(f(rule.nodes), dtype=float)
    if values.shape != (rule.nodes.shape[0],):
        raise ValueError("integrand must map (Q, d) nodes to (Q,) values")
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = rule.nodes[np.nonzero(bad)[0][0]]
        raise NumericError(f"integrand non-finite at node {node}", point=node)
    return math.fsum((rule.weights * values).tolist())
