import math

import numpy as np
import pytest

from kantorov.analysis import (
    check_bound,
    convergence_table,
    convexity_report,
    equibounded_constant,
    lambda_n,
    lambda_p_bound_value,
    lipschitz_preservation,
    loglog_slope,
    lp_error,
    lp_norm,
    random_points,
    sandwich_check,
    sup_error,
    tau_delta_argument,
)
from kantorov.bernstein import eval_Bn
from kantorov.catalog import lookup
from kantorov.errors import ConfigError
from kantorov.geometry import Domain, contains
from kantorov.kantorovich import OperatorConfig, eval_Cn
from kantorov.markov import canonical_markov
from kantorov.measures import constant_lebesgue, dirac_shift, lebesgue_measure, power_of_base

I = Domain.interval()
Q2 = Domain.hypercube(2)
K2 = Domain.simplex(2)


def cfg_for(domain, a, measures=None):
    return OperatorConfig(domain, canonical_markov(domain), a, measures or constant_lebesgue())


KANT1 = cfg_for(I, 1.0)


def test_lp_norm_oracles():
    assert lp_norm(I, lambda p: p[:, 0], 2.0) == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-13)
    assert lp_norm(I, lambda p: p[:, 0] - 0.5, 1.0) == pytest.approx(0.25, abs=1e-13)
    # raw (unnormalized) Lebesgue on the simplex: ||1||_1 = 1/2
    assert lp_norm(K2, lambda p: np.ones(p.shape[0]), 1.0) == pytest.approx(0.5, abs=1e-13)
    assert lp_norm(Q2, lambda p: p[:, 0] * p[:, 1], 2.0) == pytest.approx(1.0 / 3.0, abs=1e-13)


def test_random_points_stay_inside():
    rng = np.random.default_rng(42)
    for dom in (I, Q2, K2):
        pts = random_points(dom, 200, rng)
        assert pts.shape == (200, dom.dim)
        assert all(contains(dom, p) for p in pts)


def test_sup_error_hand_value():
    # ||C_4(id) - id||_inf = max |x/5 + 1/10 - x| peaks at x = 1
    f = lookup("affine", [0.0, 1.0], I)
    assert sup_error(KANT1, 4, f, 200) == pytest.approx(0.1, abs=1e-12)


def test_lp_error_hand_value():
    # ||C_1(id) - id||_1 = int |1/4 - x/2| dx = 1/8
    f = lookup("affine", [0.0, 1.0], I)
    assert lp_error(KANT1, 1, f, 1.0) == pytest.approx(0.125, abs=1e-6)


def test_lambda_inf_hand_value():
    # interval, a = 1, n = 1: the squares term dominates at 5/12
    assert lambda_n(KANT1, 1, math.inf, 800) == pytest.approx(5.0 / 12.0, abs=1e-9)


def test_lambda_bound_holds_for_small_n():
    for dom in (I, Q2, K2):
        cfg = cfg_for(dom, 1.0)
        for n in (1, 3, 10):
            for p in (1.0, 2.0):
                measured = lambda_n(cfg, n, p)
                assert measured <= lambda_p_bound_value(dom, 1.0, n, p) * (1.0 + 1e-12)


def test_lambda_decays_like_1_over_n():
    vals = [lambda_n(KANT1, n, 2.0) for n in (4, 16, 64)]
    slope = loglog_slope([4, 16, 64], vals)
    assert slope == pytest.approx(-1.0, abs=0.12)


def test_equibounded_constant_values():
    assert equibounded_constant(Q2, 1.0) == 1.0  # exactly
    assert equibounded_constant(I, 0.5) == pytest.approx(2.0)
    assert equibounded_constant(I, 2.0) == pytest.approx(0.75)
    assert equibounded_constant(K2, 1.0) == pytest.approx(2.0)
    with pytest.raises(ConfigError):
        equibounded_constant(I, 0.0)


def test_check_bound_rejects_bad_ids_and_measures():
    f = lookup("abs_dist", [0.5], I)
    with pytest.raises(ConfigError):
        check_bound(KANT1, f, [1, 2], "no_such_bound")
    cfg = cfg_for(I, 1.0, dirac_shift([0.25]))
    with pytest.raises(ConfigError):
        check_bound(cfg, f, [1, 2], "lambda_p_bound")


def test_omega_total_bound_with_exact_modulus():
    f = lookup("abs_dist", [0.5], I)
    rep = check_bound(KANT1, f, [4, 16, 64], "omega_total", 400)
    assert rep.passed and rep.bound_id == "omega_total"
    assert rep.max_ratio < 0.5  # comfortable margin in practice
    assert rep.n_range == (4, 64)


def test_omega_total_bound_grid_modulus():
    f = lookup("runge", [], I)  # no closed-form modulus
    rep = check_bound(KANT1, f, [8, 32], "omega_total", 400)
    assert rep.passed


def test_omega_pointwise_and_uniform_bounds():
    f = lookup("abs_dist", [0.5], I)
    for bound_id in ("omega_pointwise", "omega_uniform"):
        for a in (0.0, 1.0):
            rep = check_bound(cfg_for(I, a), f, [4, 32], bound_id, 300)
            assert rep.passed, (bound_id, a, rep.max_ratio)
    f2 = lookup("abs_dist_coord", [1, 0.5], K2)
    rep = check_bound(cfg_for(K2, 0.5), f2, [3, 9], "omega_pointwise", 30)
    assert rep.passed


def test_lambda_p_bound_report():
    rep = check_bound(cfg_for(Q2, 2.0), None, [1, 5, 25], "lambda_p_bound", 8, p=2.0)
    assert rep.passed
    assert [r.n for r in rep.rows] == [1, 5, 25]
    assert all(r.bound == lambda_p_bound_value(Q2, 2.0, r.n, 2.0) for r in rep.rows)


def test_lp_equibounded_report():
    f = lookup("exp_sum", [], I)
    rep = check_bound(cfg_for(I, 1.0), f, [1, 4, 16], "lp_equibounded", 8, p=2.0)
    assert rep.passed
    with pytest.raises(ConfigError):
        check_bound(cfg_for(I, 0.0), f, [1], "lp_equibounded")
    with pytest.raises(ConfigError):
        check_bound(cfg_for(I, 1.0), f, [1], "lp_equibounded", p=math.inf)


def test_convexity_preserved_on_interval():
    f = lookup("abs_dist", [0.5], I)
    for n in (1, 2, 7):
        rep = convexity_report(lambda p: eval_Cn(KANT1, n, f, p), I, "convex", 80)
        assert rep.passed, rep.worst_violation


def test_convexity_scan_flags_violations():
    # a genuinely non-convex function is caught with a witness
    g = lambda p: -((p[:, 0] - 0.5) ** 2)
    rep = convexity_report(g, I, "convex", 40)
    assert not rep.passed
    assert rep.worst_violation > 1e-3
    assert rep.witness is not None


def test_product12_counterexample_on_square():
    # B_2 of x*y equals x*y itself: coordinate-convex but not convex
    f = lookup("product12", [], Q2)
    vals = lambda p: eval_Bn(Q2, 2, f, p)
    assert convexity_report(vals, Q2, "coordinate_convex", 16).passed
    # worst pair is (0,1) vs (1,0): midpoint value 1/4 above the chord
    rep = convexity_report(vals, Q2, "convex", 16)
    assert not rep.passed
    assert rep.worst_violation == pytest.approx(0.25, abs=1e-12)


def test_axially_convex_on_simplex():
    f = lookup("abs_diff12", [], K2)
    vals = lambda p: eval_Bn(K2, 2, f, p)
    assert convexity_report(vals, K2, "axially_convex", 16).passed
    # the same surface fails the full convexity scan
    assert not convexity_report(vals, K2, "convex", 16).passed
    with pytest.raises(ValueError):
        convexity_report(vals, Q2, "axially_convex", 8)


def test_sandwich_between_f_and_markov():
    for dom in (I, Q2, K2):
        cfg = cfg_for(dom, 1.0)
        f = lookup("exp_sum", [], dom)
        for n in (1, 3):
            rep = sandwich_check(cfg, n, f, 20)
            assert rep, (dom.kind, n, rep)


def test_sandwich_detects_violation():
    # concave function flips the lower inequality
    cfg = KANT1
    g = lookup("constant", [0.0], I)

    def concave(p):
        return p[:, 0] * (1.0 - p[:, 0])

    concave.meta = g.meta
    rep = sandwich_check(cfg, 2, concave, 40)
    assert not rep.passed
    assert rep.below_violation > 0.01


def test_lipschitz_preservation_reports():
    f = lookup("abs_dist", [0.5], I)
    rep = lipschitz_preservation(KANT1, 5, f, 200)
    assert rep.passed
    assert rep.estimate <= rep.constant + rep.tol
    plain = lookup("runge", [], I)
    rep = lipschitz_preservation(cfg_for(I, 2.0, power_of_base(lebesgue_measure(), 2)), 4, plain, 200)
    assert rep.passed


def test_convergence_table_rows():
    f = lookup("abs_dist", [0.5], I)
    rows = convergence_table(KANT1, f, [16, 4, 64], 200, p=2.0)
    assert [r.n for r in rows] == [4, 16, 64]
    sups = [r.sup_error for r in rows]
    assert sups[0] > sups[1] > sups[2] > 0.0
    assert all(r.lp_error is not None and r.lp_error <= r.sup_error + 1e-12 for r in rows)


def test_loglog_slope_recovers_exponent():
    ns = [4, 8, 16, 32]
    errs = [3.0 * n ** -0.5 for n in ns]
    assert loglog_slope(ns, errs) == pytest.approx(-0.5, abs=1e-12)


def test_tau_delta_argument_decays():
    vals = [tau_delta_argument(1.0, n) for n in (1, 10, 100)]
    assert vals[0] > vals[1] > vals[2]
    assert tau_delta_argument(1.0, 100) == pytest.approx(
        math.sqrt(301.0 / (12.0 * 101.0**2)), abs=1e-15
    )
