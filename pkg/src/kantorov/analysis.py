"""Convergence experiments, bound verification and shape-preservation
checks: the layer that turns operator evaluations into pass/fail
reports and rate tables.

Grid moduli are lower estimates; wherever one feeds the large side of
an inequality it is either replaced by the catalog's exact modulus or
inflated by a 2% safety factor (and the pass tolerance widened to
match).  Closed-form sides use a 1e-6 tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .bernstein import eval_Bn
from .errors import ConfigError
from .geometry import HYPERCUBE, SIMPLEX, Domain, simplex_from_cube, uniform_grid
from .kantorovich import (
    AffineForm,
    OperatorConfig,
    cn_affine_moment,
    cn_quadratic_moment,
    coordinate_form,
    eval_Cn,
    eval_Cn_cells,
    eval_In,
    measure_moments,
)
from .markov import markov_values
from .measures import CONSTANT_LEBESGUE
from .moduli import lipschitz_estimate, omega1

TOL_CLOSED = 1e-6
TOL_GRID = 0.02
_OMEGA_INFLATE = 1.02

BOUND_IDS = (
    "omega_total",
    "omega_pointwise",
    "omega_uniform",
    "lambda_p_bound",
    "lp_equibounded",
)


# ---------------------------------------------------------------------------
# report rows


@dataclass(frozen=True)
class ErrorRow:
    n: int
    sup_error: float
    lp_error: Optional[float] = None
    bound_value: Optional[float] = None
    bound_id: Optional[str] = None


@dataclass(frozen=True)
class BoundRow:
    n: int
    measured: float
    bound: float
    ratio: float


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    rows: tuple
    tol: float

    @property
    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)

    @property
    def n_range(self) -> tuple:
        return (self.rows[0].n, self.rows[-1].n) if self.rows else (0, 0)

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0 + self.tol

    def __bool__(self) -> bool:
        return self.passed


# ---------------------------------------------------------------------------
# norms and random inputs


def lp_norm(domain: Domain, g, p: float, level: int = 8) -> float:
    """(integral of |g|^p over the domain, plain Lebesgue)^(1/p).

    Composite Gauss rule with ``level`` panels per axis (rounded up to
    even so that midpoint kinks sit on panel boundaries).
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    panels = max(2, int(level))
    panels += panels % 2
    order = 7 if domain.kind == SIMPLEX else 6
    gx, gw = np.polynomial.legendre.leggauss(order)
    gx = (gx + 1.0) / 2.0
    nodes1 = ((np.arange(panels)[:, None] + gx[None, :]) / panels).reshape(-1)
    weights1 = np.tile(gw / (2.0 * panels), panels)
    d = domain.dim
    grids = np.meshgrid(*([nodes1] * d), indexing="ij")
    nodes = np.stack([g2.reshape(-1) for g2 in grids], axis=1)
    weights = np.ones(nodes.shape[0])
    for wg in np.meshgrid(*([weights1] * d), indexing="ij"):
        weights = weights * wg.reshape(-1)
    if domain.kind == SIMPLEX:
        nodes, jac = simplex_from_cube(nodes)
        weights = weights * jac
    vals = np.abs(np.asarray(g(nodes), dtype=float))
    return float((weights @ vals**p) ** (1.0 / p))


def random_points(domain: Domain, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed points of the domain, shape ``(count, d)``."""
    if domain.kind == SIMPLEX:
        bary = rng.dirichlet(np.ones(domain.dim + 1), size=count)
        return bary[:, : domain.dim]
    return rng.uniform(0.0, 1.0, size=(count, domain.dim))


def random_affine_forms(
    domain: Domain, count: int, rng: np.random.Generator, scale: float = 1.0
) -> list[AffineForm]:
    return [
        AffineForm(
            rng.uniform(-scale, scale),
            tuple(rng.uniform(-scale, scale, domain.dim)),
        )
        for _ in range(count)
    ]


# ---------------------------------------------------------------------------
# error measurements


def sup_error(cfg: OperatorConfig, n: int, f, m: int) -> float:
    """max over the uniform grid of |C_n(f) - f|."""
    xs = uniform_grid(cfg.domain, m)
    return float(np.max(np.abs(eval_Cn(cfg, n, f, xs) - np.asarray(f(xs)))))


def _cn_evaluator(cfg: OperatorConfig, n: int, f) -> Callable[[np.ndarray], np.ndarray]:
    if cfg.a > 0.0 and cfg.measures.kind == CONSTANT_LEBESGUE:
        return lambda pts: eval_Cn_cells(cfg, n, f, pts)
    return lambda pts: eval_Cn(cfg, n, f, pts)


def lp_error(cfg: OperatorConfig, n: int, f, p: float, level: int = 8) -> float:
    """L^p distance between C_n(f) and f (cell form where available)."""
    cn = _cn_evaluator(cfg, n, f)
    return lp_norm(cfg.domain, lambda pts: cn(pts) - np.asarray(f(pts)), p, level)


def _phi_diffs(cfg: OperatorConfig, n: int) -> list:
    """Callables x -> (C_n(phi_i) - phi_i)(x) for the Korovkin family
    1, pr_1..pr_d, sum pr_i^2, via the closed-form moments."""
    d = cfg.domain.dim
    diffs = [lambda pts: np.zeros(np.atleast_2d(pts).shape[0])]
    for i in range(d):
        form = coordinate_form(cfg.domain, i)
        diffs.append(
            lambda pts, form=form: cn_affine_moment(cfg, n, form, np.atleast_2d(pts))
            - form(pts)
        )

    def quad_diff(pts):
        pts = np.atleast_2d(pts)
        total = np.zeros(pts.shape[0])
        for i in range(d):
            total += cn_quadratic_moment(cfg, n, i, pts) - pts[:, i] ** 2
        return total

    diffs.append(quad_diff)
    return diffs


def _is_sup(p) -> bool:
    return (isinstance(p, str) and p in ("inf", "sup")) or (
        isinstance(p, float) and math.isinf(p)
    )


def lambda_n(cfg: OperatorConfig, n: int, p, m_or_level: int = 8) -> float:
    """max_i ||C_n(phi_i) - phi_i|| over the Korovkin test family.

    ``p`` is a real >= 1 or the sup-norm marker ("inf"/math.inf); the
    last argument is the grid resolution (sup norm) or the quadrature
    level (L^p norm).
    """
    best = 0.0
    for diff in _phi_diffs(cfg, n):
        if _is_sup(p):
            xs = uniform_grid(cfg.domain, m_or_level)
            val = float(np.max(np.abs(diff(xs))))
        else:
            val = lp_norm(cfg.domain, diff, float(p), m_or_level)
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# grid modulus with conservative inflation


class _GridOmega:
    """Binned first-modulus profile of f: evaluates a (slightly
    conservative) grid omega at arbitrary arguments."""

    _BINS = 4096

    def __init__(self, f, domain: Domain, m: int):
        pts = uniform_grid(domain, m)
        fv = np.asarray(f(pts), dtype=float)
        self._width = domain.diameter / self._BINS
        binmax = np.zeros(self._BINS + 1)
        block = 512
        for i in range(0, pts.shape[0], block):
            diff = pts[i : i + block, None, :] - pts[None, :, :]
            dist = np.sqrt((diff**2).sum(axis=-1))
            gaps = np.abs(fv[i : i + block, None] - fv[None, :])
            idx = np.minimum(np.ceil(dist / self._width).astype(int), self._BINS)
            np.maximum.at(binmax, idx.reshape(-1), gaps.reshape(-1))
        self._pref = np.maximum.accumulate(binmax)

    def __call__(self, delta) -> np.ndarray:
        b = np.clip(np.floor(np.asarray(delta) / self._width).astype(int), 0, self._BINS)
        return self._pref[b]


def _omega_fn(f, domain: Domain, m: int):
    """(omega(delta) callable, exact flag) for the bound checks."""
    meta = getattr(f, "meta", None)
    if meta is not None and meta.exact_omega is not None:
        exact = meta.exact_omega
        return lambda delta: np.vectorize(exact, otypes=[float])(delta), True
    grid = _GridOmega(f, domain, m)
    return lambda delta: _OMEGA_INFLATE * grid(delta), False


def _te2_gap_sup(domain: Domain) -> float:
    """sup over the domain of T(e_2) - e_2 = sum x_i (1 - x_i)."""
    d = domain.dim
    if domain.kind == SIMPLEX:
        return 0.25 if d == 1 else 1.0 - 1.0 / d
    return d / 4.0


def _ratio(measured: float, bound: float) -> float:
    if bound > 1e-14:
        return measured / bound
    return 0.0 if measured <= 1e-12 else math.inf


# ---------------------------------------------------------------------------
# bound verification


def _check_omega_total(cfg, f, n_list, m):
    omega, exact = _omega_fn(f, cfg.domain, m)
    scale = cfg.domain.modulus_scale
    rows = []
    for n in n_list:
        delta = math.sqrt((4.0 * cfg.a**2 + 1.0) / (n + cfg.a))
        bound = 2.0 * float(omega(delta * scale))
        measured = sup_error(cfg, n, f, m)
        rows.append(BoundRow(n, measured, bound, _ratio(measured, bound)))
    return rows, exact


def _check_omega_uniform(cfg, f, n_list, m):
    omega, exact = _omega_fn(f, cfg.domain, m)
    gap = _te2_gap_sup(cfg.domain)
    rows = []
    for n in n_list:
        delta = max(cfg.a * cfg.domain.diameter**2, gap) / math.sqrt(n + cfg.a)
        bound = 2.0 * float(omega(delta))
        measured = sup_error(cfg, n, f, m)
        rows.append(BoundRow(n, measured, bound, _ratio(measured, bound)))
    return rows, exact


def _check_omega_pointwise(cfg, f, n_list, m):
    omega, exact = _omega_fn(f, cfg.domain, m)
    xs = uniform_grid(cfg.domain, m)
    fv = np.asarray(f(xs))
    gap_x = markov_values(cfg.op, lambda v: (v**2).sum(axis=1), xs) - (xs**2).sum(axis=1)
    rows = []
    for n in n_list:
        if cfg.a > 0.0:
            m1, m2 = measure_moments(cfg, n)
            i2 = float(m2.sum()) - 2.0 * xs @ m1 + (xs**2).sum(axis=1)
        else:
            i2 = np.zeros(xs.shape[0])
        cn_dx2 = (cfg.a**2 * i2 + n * gap_x) / (n + cfg.a) ** 2
        deltas = np.sqrt(np.maximum(cn_dx2, 0.0))
        bounds = 2.0 * np.asarray(omega(deltas), dtype=float)
        errs = np.abs(eval_Cn(cfg, n, f, xs) - fv)
        ratios = np.array([_ratio(e, b) for e, b in zip(errs, bounds)])
        worst = int(np.argmax(ratios))
        rows.append(BoundRow(n, float(errs[worst]), float(bounds[worst]), float(ratios[worst])))
    return rows, exact


def lambda_p_bound_value(domain: Domain, a: float, n: int, p: float) -> float:
    """Closed-form decay bound for lambda_{n,p}."""
    if domain.kind == SIMPLEX:
        return 3.0 * (a + 1.0) ** 2 / (math.factorial(domain.dim) ** (1.0 / p) * (n + a))
    return 3.0 * domain.dim * (a + 1.0) ** 2 / (n + a)


def equibounded_constant(domain: Domain, a: float) -> float:
    """sup_n of the cell-overcount factor in the L^p contraction bound."""
    if a <= 0.0:
        raise ConfigError("equiboundedness constant needs a > 0")
    scalar = 1.0 / a if a <= 1.0 else (1.0 + a) / (2.0 * a)
    m = scalar**domain.dim
    if domain.kind == SIMPLEX:
        m *= math.factorial(domain.dim)
    return m


def _require_lebesgue(cfg: OperatorConfig, bound_id: str) -> None:
    if cfg.measures.kind != CONSTANT_LEBESGUE:
        raise ConfigError(f"{bound_id} is stated for constant Lebesgue measures")


def _check_lambda_p(cfg, n_list, level, p):
    _require_lebesgue(cfg, "lambda_p_bound")
    if _is_sup(p):
        raise ConfigError("lambda_p_bound needs finite p")
    rows = []
    for n in n_list:
        measured = lambda_n(cfg, n, p, level)
        bound = lambda_p_bound_value(cfg.domain, cfg.a, n, float(p))
        rows.append(BoundRow(n, measured, bound, _ratio(measured, bound)))
    return rows


def _check_lp_equibounded(cfg, f, n_list, level, p):
    _require_lebesgue(cfg, "lp_equibounded")
    if _is_sup(p):
        raise ConfigError("lp_equibounded needs finite p")
    if cfg.a <= 0.0:
        raise ConfigError("lp_equibounded needs a > 0")
    fnorm = lp_norm(cfg.domain, f, float(p), level)
    bound = equibounded_constant(cfg.domain, cfg.a) ** (1.0 / float(p)) * fnorm
    rows = []
    for n in n_list:
        cn = _cn_evaluator(cfg, n, f)
        measured = lp_norm(cfg.domain, cn, float(p), level)
        rows.append(BoundRow(n, measured, bound, _ratio(measured, bound)))
    return rows


def check_bound(
    cfg: OperatorConfig,
    f,
    n_list: Sequence[int],
    bound_id: str,
    m_or_level: int = 8,
    p: float = 2.0,
) -> BoundReport:
    """Measure an error quantity against one of the named closed-form bounds.

    ``m_or_level`` is a grid resolution for the sup-norm (omega_*)
    bounds and a quadrature level for the L^p ones.
    """
    if bound_id not in BOUND_IDS:
        raise ConfigError(f"unknown bound_id {bound_id!r}; know {BOUND_IDS}")
    n_list = sorted(int(n) for n in n_list)
    if bound_id == "omega_total":
        rows, exact = _check_omega_total(cfg, f, n_list, m_or_level)
        tol = TOL_CLOSED if exact else TOL_GRID
    elif bound_id == "omega_uniform":
        rows, exact = _check_omega_uniform(cfg, f, n_list, m_or_level)
        tol = TOL_CLOSED if exact else TOL_GRID
    elif bound_id == "omega_pointwise":
        rows, exact = _check_omega_pointwise(cfg, f, n_list, m_or_level)
        tol = TOL_CLOSED if exact else TOL_GRID
    elif bound_id == "lambda_p_bound":
        rows, tol = _check_lambda_p(cfg, n_list, m_or_level, p), TOL_CLOSED
    else:
        rows, tol = _check_lp_equibounded(cfg, f, n_list, m_or_level, p), TOL_CLOSED
    return BoundReport(bound_id, tuple(rows), tol)


# ---------------------------------------------------------------------------
# shape preservation


@dataclass(frozen=True)
class ConvexityReport:
    mode: str
    passed: bool
    worst_violation: float
    witness: Optional[tuple]
    tol: float

    def __bool__(self) -> bool:
        return self.passed


_MODES = ("convex", "coordinate_convex", "axially_convex")


def convexity_report(
    g, domain: Domain, mode: str, m: int, tol: float = 1e-10
) -> ConvexityReport:
    """Midpoint convexity scan over grid pairs.

    ``convex`` checks all pairs; ``coordinate_convex`` only pairs along
    one axis; ``axially_convex`` (simplex) pairs along axes or vertex
    differences e_i - e_j.  ``g`` is a callable (evaluated on the
    doubled grid) or a precomputed value array on ``uniform_grid(2m)``.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown convexity mode {mode!r}")
    if mode == "axially_convex" and domain.kind != SIMPLEX:
        raise ValueError("axially_convex applies to the simplex")
    pts = uniform_grid(domain, m)
    pts2 = uniform_grid(domain, 2 * m)
    g2 = np.asarray(g(pts2) if callable(g) else g, dtype=float)
    if g2.shape != (pts2.shape[0],):
        raise ValueError("g must provide values on the doubled grid")
    idx = np.rint(pts * m).astype(int)
    shape = (2 * m + 1,) * domain.dim
    if domain.kind == SIMPLEX:
        posmap = np.full(shape, -1)
        full = np.indices(shape).reshape(domain.dim, -1).T
        keep = full.sum(axis=1) <= 2 * m
        posmap[tuple(full[keep].T)] = np.arange(int(keep.sum()))
    else:
        posmap = np.arange(np.prod(shape)).reshape(shape)
    gv = g2[posmap[tuple((2 * idx).T)]]
    worst = -math.inf
    witness = None
    block = 512
    for i in range(0, pts.shape[0], block):
        ib = idx[i : i + block]
        delta = ib[:, None, :] - idx[None, :, :]
        nz = np.count_nonzero(delta, axis=2)
        if mode == "convex":
            mask = nz > 0
        elif mode == "coordinate_convex":
            mask = nz == 1
        else:
            # moves along e_i, or along e_i - e_j (two opposite equal steps)
            axis_pairs = nz == 1
            diag_pairs = (nz == 2) & (delta.sum(axis=2) == 0)
            mask = axis_pairs | diag_pairs
        mid = posmap[tuple((ib[:, None, :] + idx[None, :, :]).transpose(2, 0, 1))]
        viol = g2[mid] - 0.5 * (gv[i : i + block, None] + gv[None, :])
        viol = np.where(mask, viol, -math.inf)
        j = np.unravel_index(int(np.argmax(viol)), viol.shape)
        if viol[j] > worst:
            worst = float(viol[j])
            witness = (pts[i + j[0]].copy(), pts[j[1]].copy())
    return ConvexityReport(mode, worst <= tol, worst, witness, tol)


@dataclass(frozen=True)
class SandwichReport:
    passed: bool
    below_violation: float  # max of f - B_n(f)
    above_violation: float  # max of B_n(f) - T(f)
    blend_violation: float  # max of C_n(f) - C_n(T(f))
    tol: float

    def __bool__(self) -> bool:
        return self.passed


def sandwich_check(cfg: OperatorConfig, n: int, f, m: int, tol: float = 1e-11) -> SandwichReport:
    """Grid check of f <= B_n(f) <= T(f) and C_n(f) <= C_n(T f)."""
    xs = uniform_grid(cfg.domain, m)
    fv = np.asarray(f(xs))
    bn = eval_Bn(cfg.domain, n, f, xs)
    tf = markov_values(cfg.op, f, xs)
    below = float(np.max(fv - bn))
    above = float(np.max(bn - tf))
    cnf = eval_Cn(cfg, n, f, xs)
    cntf = eval_Cn(cfg, n, lambda pts: markov_values(cfg.op, f, pts), xs)
    blend = float(np.max(cnf - cntf))
    return SandwichReport(
        below <= tol and above <= tol and blend <= tol, below, above, blend, tol
    )


@dataclass(frozen=True)
class LipschitzReport:
    passed: bool
    constant: float
    estimate: float
    tol: float

    def __bool__(self) -> bool:
        return self.passed


def lipschitz_preservation(
    cfg: OperatorConfig, n: int, f, m: int, tol: float = 1e-6
) -> LipschitzReport:
    """C_n should not enlarge the l1-Lipschitz constant of f."""
    meta = getattr(f, "meta", None)
    if meta is None or meta.lipschitz_l1 is None:
        raise ValueError("function needs a known l1-Lipschitz constant")
    est = lipschitz_estimate(lambda pts: eval_Cn(cfg, n, f, pts), cfg.domain, m, "l1")
    return LipschitzReport(est <= meta.lipschitz_l1 + tol, meta.lipschitz_l1, est, tol)


# ---------------------------------------------------------------------------
# rate diagnostics


def loglog_slope(ns: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(n)."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors > 0.0
    if keep.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(ns[keep]), np.log(errors[keep]), 1)[0])


def tau_delta_argument(a: float, n: int) -> float:
    """Argument fed to the averaged modulus in the L^p rate estimate."""
    return math.sqrt((3.0 * n + a**2) / (12.0 * (n + a) ** 2))


def berens_rate_constant(domain: Domain, a: float) -> float:
    """Constant M with lambda_{n,inf} <= M/(n+a) for the canonical ops."""
    r = domain.modulus_scale
    return max(2.0 * a * r, (2.0 * a + 2.0 * a * domain.dim + 2.0) * r**2)


def convergence_table(
    cfg: OperatorConfig,
    f,
    n_list: Sequence[int],
    m: int,
    p: Optional[float] = None,
    level: int = 8,
) -> list[ErrorRow]:
    """sup / L^p error rows for a list of n (sorted)."""
    rows = []
    for n in sorted(int(n) for n in n_list):
        lp = lp_error(cfg, n, f, float(p), level) if p is not None else None
        rows.append(ErrorRow(n, sup_error(cfg, n, f, m), lp))
    return rows
