"""The blended positive operators C_n and their auxiliary I_n.

C_n(f)(x) = sum_h basis(n, h, x) * J_{n,h} with inner integrals
J_{n,h} = integral of f((h + a*s)/(n+a)) against mu_n(s).  Equivalently
C_n = B_n composed with I_n(f)(x) = integral of f(nx/(n+a) + at/(n+a)).
The parameter a >= 0 and the measure sequence (mu_n) select the family:
a = 0 gives back B_n, a = 1 with Lebesgue measures gives the classical
cell-averaging operators.

Closed-form first and second moments (affine, bilinear, quadratic) are
provided as analytic oracles for the quadrature paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bernstein import apply_lattice_values, basis_weights, lattice, lattice_points
from .errors import ConfigError, NumericError
from .geometry import SIMPLEX, Domain, as_points, contains, quadrature_rule
from .markov import MarkovOpId, markov_values
from .measures import (
    CONSTANT_LEBESGUE,
    DIRAC_SHIFT,
    MAX_RULE_NODES,
    MeasureSeqSpec,
    MeasureSpec,
    integrate_measure,
    measure_nodes,
    resolve,
    rule_node_count,
)

_MAX_LEVEL = 32
_LADDER_TOL = 1e-11
_BLOCK_POINTS = 1 << 21


@dataclass(frozen=True)
class AffineForm:
    """h(x) = constant + gradient . x; callable on ``(G, d)`` batches."""

    constant: float
    gradient: tuple

    def __post_init__(self):
        grad = tuple(float(g) for g in self.gradient)
        object.__setattr__(self, "gradient", grad)
        object.__setattr__(self, "constant", float(self.constant))
        if not math.isfinite(self.constant) or not all(math.isfinite(g) for g in grad):
            raise ValueError("affine form coefficients must be finite")

    @property
    def dim(self) -> int:
        return len(self.gradient)

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.constant + pts @ np.asarray(self.gradient)

    def value(self, x) -> float:
        return float(self.constant + np.dot(np.atleast_1d(x), self.gradient))


def coordinate_form(domain: Domain, i: int) -> AffineForm:
    """The i-th coordinate projection (0-based) as an affine form."""
    if not 0 <= i < domain.dim:
        raise ValueError(f"coordinate index {i} out of range for dim {domain.dim}")
    grad = [0.0] * domain.dim
    grad[i] = 1.0
    return AffineForm(0.0, tuple(grad))


@dataclass(frozen=True)
class OperatorConfig:
    domain: Domain
    op: MarkovOpId
    a: float
    measures: MeasureSeqSpec
    quad_level: int = 8

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        if not math.isfinite(self.a) or self.a < 0.0:
            raise ConfigError("blend parameter a must be finite and >= 0")
        if self.op.domain != self.domain:
            raise ConfigError("Markov operator domain does not match config domain")
        if self.measures.kind == DIRAC_SHIFT and self.a == 0.0:
            raise ConfigError("dirac_shift measure sequences require a > 0")
        if self.quad_level < 1:
            raise ConfigError("quad_level must be >= 1")


def _resolved(cfg: OperatorConfig, n: int) -> MeasureSpec:
    return resolve(cfg.measures, n, cfg.domain)


def _blend_at_level(
    cfg: OperatorConfig, mu: MeasureSpec, n: int, f, base: np.ndarray, level: int
) -> np.ndarray:
    """integral of f(p + (a/(n+a)) s) dmu(s) for each row p of ``base``."""
    nodes, weights, _ = measure_nodes(mu, cfg.domain, level)
    c = cfg.a / (n + cfg.a)
    m, q, d = base.shape[0], nodes.shape[0], cfg.domain.dim
    out = np.empty(m)
    block = max(1, _BLOCK_POINTS // q)
    for i in range(0, m, block):
        pb = base[i : i + block]
        pts = (pb[:, None, :] + c * nodes[None, :, :]).reshape(-1, d)
        vals = np.asarray(f(pts), dtype=float)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            pt = pts[np.nonzero(bad)[0][0]]
            raise NumericError(f"function non-finite at {pt}", point=pt)
        out[i : i + block] = vals.reshape(pb.shape[0], q) @ weights
    return out


def _blend_integrals(cfg: OperatorConfig, n: int, f, base: np.ndarray) -> np.ndarray:
    """Adaptive version of :func:`_blend_at_level`.

    Exact measures (discrete / power-of-discrete) are applied once; the
    quadrature-backed ones double the level until two successive values
    agree within 1e-11 (capped, and bounded by the rule node budget).
    """
    if cfg.a == 0.0:
        vals = np.asarray(f(base), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NumericError("function non-finite on the lattice")
        return vals
    mu = _resolved(cfg, n)
    exact = mu.kind == "discrete" or (mu.kind == "power" and mu.base.kind == "discrete")
    level = cfg.quad_level
    vals = _blend_at_level(cfg, mu, n, f, base, level)
    if exact:
        return vals
    while level < _MAX_LEVEL:
        nxt = min(2 * level, _MAX_LEVEL)
        if rule_node_count(mu, cfg.domain, nxt) > MAX_RULE_NODES:
            break
        nxt_vals = _blend_at_level(cfg, mu, n, f, base, nxt)
        done = float(np.max(np.abs(nxt_vals - vals))) <= _LADDER_TOL
        vals, level = nxt_vals, nxt
        if done:
            break
    return vals


@lru_cache(maxsize=512)
def _inner_values(cfg: OperatorConfig, n: int, f) -> np.ndarray:
    """J_{n,h} for all lattice h (x-independent, cached per (cfg, n, f))."""
    base = lattice(cfg.domain, n) / (n + cfg.a)
    return _blend_integrals(cfg, n, f, base)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("operator index n must be >= 1")


def eval_In(cfg: OperatorConfig, n: int, f, x):
    """I_n(f) at a point or batch: the measure-blended pullback of f."""
    _check_n(n)
    xs, single = as_points(cfg.domain, x)
    if cfg.a == 0.0:
        out = np.asarray(f(xs), dtype=float)
    else:
        out = _blend_integrals(cfg, n, f, xs * (n / (n + cfg.a)))
    return float(out[0]) if single else out


def eval_Cn(cfg: OperatorConfig, n: int, f, x):
    """C_n(f) at a point or batch via cached inner integrals."""
    _check_n(n)
    values = _inner_values(cfg, n, f)
    xs, single = as_points(cfg.domain, x)
    if single:
        if not contains(cfg.domain, xs[0]):
            raise ValueError(f"point {xs[0]} outside the domain")
        w = basis_weights(cfg.domain, n, xs)[0]
        return math.fsum((w * values).tolist())
    return apply_lattice_values(cfg.domain, n, values, xs)


def _cell_values_at_level(cfg: OperatorConfig, n: int, f, level: int) -> np.ndarray:
    """Per-cell averages of f over the lattice cells, explicit geometry."""
    domain, a = cfg.domain, cfg.a
    latt = lattice(domain, n)
    rule = quadrature_rule(domain, level)
    scale = a / (n + a)
    norm = math.factorial(domain.dim) if domain.kind == SIMPLEX else 1.0
    out = np.empty(latt.shape[0])
    q = rule.nodes.shape[0]
    block = max(1, _BLOCK_POINTS // q)
    for i in range(0, latt.shape[0], block):
        lo = latt[i : i + block] / (n + a)
        pts = (lo[:, None, :] + scale * rule.nodes[None, :, :]).reshape(-1, domain.dim)
        vals = np.asarray(f(pts), dtype=float)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            pt = pts[np.nonzero(bad)[0][0]]
            raise NumericError(f"function non-finite at {pt}", point=pt)
        out[i : i + block] = vals.reshape(lo.shape[0], q) @ (norm * rule.weights)
    return out


@lru_cache(maxsize=512)
def _cell_values(cfg: OperatorConfig, n: int, f) -> np.ndarray:
    level = cfg.quad_level
    vals = _cell_values_at_level(cfg, n, f, level)
    while level < _MAX_LEVEL:
        nxt = min(2 * level, _MAX_LEVEL)
        nxt_vals = _cell_values_at_level(cfg, n, f, nxt)
        done = float(np.max(np.abs(nxt_vals - vals))) <= _LADDER_TOL
        vals, level = nxt_vals, nxt
        if done:
            break
    return vals


def eval_Cn_cells(cfg: OperatorConfig, n: int, f, x):
    """C_n(f) via basis-weighted cell averages.

    Each lattice index h owns the cell with corner h/(n+a) and edge
    scale a/(n+a) (an axis box on the hypercube, a shrunken copy of the
    reference simplex on the simplex); requires a > 0 and Lebesgue
    measures, where C_n(f) = sum_h basis(h, x) * avg_{cell(h)} f.
    """
    _check_n(n)
    if cfg.a <= 0.0 or cfg.measures.kind != CONSTANT_LEBESGUE:
        raise ConfigError("cell form needs a > 0 and constant Lebesgue measures")
    values = _cell_values(cfg, n, f)
    xs, single = as_points(cfg.domain, x)
    if single:
        if not contains(cfg.domain, xs[0]):
            raise ValueError(f"point {xs[0]} outside the domain")
        w = basis_weights(cfg.domain, n, xs)[0]
        return math.fsum((w * values).tolist())
    return apply_lattice_values(cfg.domain, n, values, xs)


def measure_moments(cfg: OperatorConfig, n: int) -> tuple[np.ndarray, np.ndarray]:
    """First and second coordinate moments of mu_n, shape ``(d,)`` each."""
    mu = _resolved(cfg, n)
    d = cfg.domain.dim
    m1 = np.array(
        [integrate_measure(mu, cfg.domain, lambda p, i=i: p[:, i], cfg.quad_level) for i in range(d)]
    )
    m2 = np.array(
        [integrate_measure(mu, cfg.domain, lambda p, i=i: p[:, i] ** 2, cfg.quad_level) for i in range(d)]
    )
    return m1, m2


def cn_affine_moment(cfg: OperatorConfig, n: int, h: AffineForm, x):
    """Closed form C_n(h) = (a/(n+a)) mean_mu(h) + (n/(n+a)) h."""
    _check_n(n)
    xs, single = as_points(cfg.domain, x)
    if cfg.a == 0.0:
        mean = 0.0
    else:
        mean = integrate_measure(_resolved(cfg, n), cfg.domain, h, cfg.quad_level)
    out = (cfg.a / (n + cfg.a)) * mean + (n / (n + cfg.a)) * h(xs)
    return float(out[0]) if single else out


def cn_quadratic_moment(cfg: OperatorConfig, n: int, i: int, x):
    """Closed form C_n(pr_i^2) (0-based coordinate i).

    Combines the second-moment identity with B_n(pr_i^2) =
    (1/n) pr_i + ((n-1)/n) pr_i^2, which holds for all three canonical
    vertex selections.
    """
    _check_n(n)
    if not 0 <= i < cfg.domain.dim:
        raise ValueError(f"coordinate index {i} out of range")
    xs, single = as_points(cfg.domain, x)
    xi = xs[:, i]
    a = cfg.a
    denom = (n + a) ** 2
    if a == 0.0:
        out = xi / n + (n - 1) / n * xi**2
    else:
        m1, m2 = measure_moments(cfg, n)
        out = (
            a**2 * m2[i] / denom
            + 2 * n * a * m1[i] / denom * xi
            + n / denom * xi
            + n * (n - 1) / denom * xi**2
        )
    return float(out[0]) if single else out


def cn_bilinear_moment(cfg: OperatorConfig, n: int, h: AffineForm, k: AffineForm, x):
    """Closed form for C_n(h k) with affine h, k."""
    _check_n(n)
    xs, single = as_points(cfg.domain, x)
    a = cfg.a
    denom = (n + a) ** 2

    def hk(pts):
        return h(pts) * k(pts)

    bn_hk = markov_values(cfg.op, hk, xs) / n + (n - 1) / n * h(xs) * k(xs)
    if a == 0.0:
        out = n**2 / denom * bn_hk
    else:
        mu = _resolved(cfg, n)
        mean_hk = integrate_measure(mu, cfg.domain, hk, cfg.quad_level)
        mean_h = integrate_measure(mu, cfg.domain, h, cfg.quad_level)
        mean_k = integrate_measure(mu, cfg.domain, k, cfg.quad_level)
        out = (
            a**2 / denom * mean_hk
            + n * a / denom * (mean_h * k(xs) + mean_k * h(xs))
            + n**2 / denom * bn_hk
        )
    return float(out[0]) if single else out
