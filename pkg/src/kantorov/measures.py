"""Probability measures on a domain and per-n measure sequences.

Measures come in three concrete flavors: normalized Lebesgue (mass 1,
i.e. ``d! * lambda_d`` on the simplex), discrete, and the "averaging
power" of a base measure (the law of the mean of ``exponent`` i.i.d.
draws).  Power measures are kept lazy (base + exponent) and only turned
into finite node/weight rules inside integrals.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, NumericError
from .geometry import SIMPLEX, Domain, as_point, contains, quadrature_rule

LEBESGUE = "lebesgue"
DISCRETE = "discrete"
POWER = "power"

# Cost ceiling for tensor integration of power-of-Lebesgue measures.
MAX_POWER_DIMS = 6
# Node budget for a single materialized measure rule.
MAX_RULE_NODES = 4_000_000


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported probability measure."""

    atoms: np.ndarray  # (k, d)
    weights: np.ndarray  # (k,)

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        if atoms.shape[0] != weights.shape[0]:
            raise ValueError("atoms/weights length mismatch")
        if np.any(weights < 0.0):
            raise ValueError("discrete measure weights must be >= 0")
        total = math.fsum(weights.tolist())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(
                f"discrete measure weights sum to {total!r}, not 1 (not renormalizing)"
            )


def discrete_measure(atoms, weights, domain: Optional[Domain] = None) -> DiscreteMeasure:
    mu = DiscreteMeasure(np.asarray(atoms, dtype=float), np.asarray(weights, dtype=float))
    if domain is not None:
        for atom in mu.atoms:
            if not contains(domain, atom):
                raise ValueError(f"atom {atom} lies outside the domain")
    return mu


def dirac(point, domain: Optional[Domain] = None) -> DiscreteMeasure:
    point = np.atleast_1d(np.asarray(point, dtype=float))
    return discrete_measure(point[None, :], [1.0], domain)


@dataclass(frozen=True)
class MeasureSpec:
    """A single measure: ``lebesgue``, ``discrete`` or ``power``."""

    kind: str
    discrete: Optional[DiscreteMeasure] = None
    base: Optional["MeasureSpec"] = None
    exponent: int = 1

    def __post_init__(self):
        if self.kind not in (LEBESGUE, DISCRETE, POWER):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == DISCRETE and self.discrete is None:
            raise ValueError("discrete measure spec needs a DiscreteMeasure")
        if self.kind == POWER:
            if self.base is None:
                raise ValueError("power measure spec needs a base measure")
            if not isinstance(self.exponent, int) or self.exponent < 1:
                raise ValueError("power measure exponent must be an integer >= 1")
            if self.base.kind == POWER:
                raise ValueError("nested power measures are not supported")


def lebesgue_measure() -> MeasureSpec:
    return MeasureSpec(LEBESGUE)


def discrete_spec(mu: DiscreteMeasure) -> MeasureSpec:
    return MeasureSpec(DISCRETE, discrete=mu)


def power_measure(base: MeasureSpec, exponent: int) -> MeasureSpec:
    return MeasureSpec(POWER, base=base, exponent=exponent)


CONSTANT_LEBESGUE = "constant_lebesgue"
DIRAC_SHIFT = "dirac_shift"
POWER_OF_BASE = "power_of_base"
EXPLICIT_LIST = "explicit_list"


@dataclass(frozen=True, eq=False)
class MeasureSeqSpec:
    """The sequence (mu_n) feeding the operator family.

    ``dirac_shift`` carries a rule ``n -> point`` giving the atom of
    mu_n (for a shift sequence (b_n) and parameter a, the atom is
    b_n / a).
    """

    kind: str
    point_rule: Optional[Callable[[int], np.ndarray]] = None
    base: Optional[MeasureSpec] = None
    exponent: int = 1
    measures: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in (CONSTANT_LEBESGUE, DIRAC_SHIFT, POWER_OF_BASE, EXPLICIT_LIST):
            raise ValueError(f"unknown measure sequence kind {self.kind!r}")
        if self.kind == DIRAC_SHIFT and self.point_rule is None:
            raise ValueError("dirac_shift needs a point rule n -> point")
        if self.kind == POWER_OF_BASE:
            if self.base is None:
                raise ValueError("power_of_base needs a base measure")
            if not isinstance(self.exponent, int) or self.exponent < 1:
                raise ValueError("power_of_base exponent must be an integer >= 1")
        if self.kind == EXPLICIT_LIST and not self.measures:
            raise ValueError("explicit_list needs at least one measure")


def constant_lebesgue() -> MeasureSeqSpec:
    return MeasureSeqSpec(CONSTANT_LEBESGUE)


def dirac_shift(rule) -> MeasureSeqSpec:
    """``rule`` is either a fixed point or a callable ``n -> point``."""
    if callable(rule):
        return MeasureSeqSpec(DIRAC_SHIFT, point_rule=rule)
    point = np.atleast_1d(np.asarray(rule, dtype=float))
    return MeasureSeqSpec(DIRAC_SHIFT, point_rule=lambda n: point)


def power_of_base(base: MeasureSpec, exponent: int) -> MeasureSeqSpec:
    return MeasureSeqSpec(POWER_OF_BASE, base=base, exponent=exponent)


def explicit_list(measures: Sequence[MeasureSpec]) -> MeasureSeqSpec:
    return MeasureSeqSpec(EXPLICIT_LIST, measures=tuple(measures))


def resolve(seq: MeasureSeqSpec, n: int, domain: Optional[Domain] = None) -> MeasureSpec:
    """Measure mu_n of the sequence (list indexing starts at n = 1)."""
    if n < 1:
        raise ValueError("operator index n must be >= 1")
    if seq.kind == CONSTANT_LEBESGUE:
        return lebesgue_measure()
    if seq.kind == DIRAC_SHIFT:
        point = np.atleast_1d(np.asarray(seq.point_rule(n), dtype=float))
        if domain is not None and not contains(domain, point):
            raise ValueError(f"dirac_shift point {point} outside the domain at n={n}")
        return discrete_spec(DiscreteMeasure(point[None, :], np.array([1.0])))
    if seq.kind == POWER_OF_BASE:
        return power_measure(seq.base, seq.exponent)
    if n > len(seq.measures):
        raise IndexError(
            f"explicit measure list has {len(seq.measures)} entries; n={n} out of range"
        )
    return seq.measures[n - 1]


def _lebesgue_nodes(domain: Domain, level: int) -> tuple[np.ndarray, np.ndarray]:
    rule = quadrature_rule(domain, level)
    weights = rule.weights
    if domain.kind == SIMPLEX:
        weights = weights * math.factorial(domain.dim)
    return rule.nodes, weights


def rule_node_count(mu: MeasureSpec, domain: Domain, level: int) -> int:
    """Number of nodes ``measure_nodes`` would materialize."""
    d = domain.dim
    per_level = (level + 1) ** d if domain.kind == SIMPLEX else level**d
    if mu.kind == LEBESGUE:
        return per_level
    if mu.kind == DISCRETE:
        return mu.discrete.atoms.shape[0]
    if mu.base.kind == DISCRETE:
        k = mu.base.discrete.atoms.shape[0]
        return math.comb(k + mu.exponent - 1, mu.exponent)
    return per_level**mu.exponent


def measure_nodes(
    mu: MeasureSpec, domain: Domain, level: int
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Finite rule (nodes, weights, exact) integrating against ``mu``.

    ``exact`` is True when the rule represents the measure with no
    quadrature error (discrete and power-of-discrete cases).
    """
    if mu.kind == LEBESGUE:
        nodes, weights = _lebesgue_nodes(domain, level)
        return nodes, weights, False
    if mu.kind == DISCRETE:
        return mu.discrete.atoms, mu.discrete.weights, True

    a = mu.exponent
    base = mu.base
    if base.kind == DISCRETE:
        atoms, bw = base.discrete.atoms, base.discrete.weights
        k = atoms.shape[0]
        nodes, weights = [], []
        fact_a = math.factorial(a)
        for combo in itertools.combinations_with_replacement(range(k), a):
            counts = Counter(combo)
            coef = fact_a
            w = 1.0
            for idx, c in counts.items():
                coef //= math.factorial(c)
                w *= bw[idx] ** c
            nodes.append(atoms[list(combo)].mean(axis=0))
            weights.append(coef * w)
        return np.array(nodes), np.array(weights), True

    if a * domain.dim > MAX_POWER_DIMS:
        raise ConfigError(
            f"power measure with exponent {a} on a {domain.dim}-d Lebesgue base "
            f"needs {a * domain.dim} tensor dimensions (limit {MAX_POWER_DIMS})"
        )
    bnodes, bweights = _lebesgue_nodes(domain, level)
    q = bnodes.shape[0]
    if q**a > MAX_RULE_NODES:
        raise ConfigError(
            f"power measure rule would need {q**a} nodes (limit {MAX_RULE_NODES})"
        )
    idx = np.indices((q,) * a).reshape(a, -1)
    nodes = bnodes[idx].mean(axis=0)
    weights = np.ones(idx.shape[1])
    for row in idx:
        weights = weights * bweights[row]
    return nodes, weights, False


def apply_rule(nodes: np.ndarray, weights: np.ndarray, f) -> float:
    values = np.asarray(f(nodes), dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = nodes[np.nonzero(bad)[0][0]]
        raise NumericError(f"integrand non-finite at measure node {node}", point=node)
    return math.fsum((weights * values).tolist())


def integrate_measure(mu: MeasureSpec, domain: Domain, f, level: int = 8) -> float:
    """Integral of ``f`` against ``mu`` (probability-normalized)."""
    nodes, weights, _ = measure_nodes(mu, domain, level)
    return apply_rule(nodes, weights, f)


def power_average_integral(
    base: MeasureSpec, a: int, domain: Domain, f, level: int = 8
) -> float:
    """Integral of ``f((y_1 + ... + y_a)/a)`` over i.i.d. draws from ``base``."""
    return integrate_measure(power_measure(base, a), domain, f, level)
