import math

import numpy as np
import pytest

from kantorov.errors import NumericError
from kantorov.geometry import (
    Domain,
    contains,
    integrate,
    quadrature_rule,
    simplex_from_cube,
    uniform_grid,
)

I = Domain.interval()
Q2 = Domain.hypercube(2)
Q3 = Domain.hypercube(3)
K2 = Domain.simplex(2)
K3 = Domain.simplex(3)


def test_domain_constructors():
    assert I.dim == 1 and I.kind == "interval"
    assert Q2.dim == 2 and K3.dim == 3
    with pytest.raises(ValueError):
        Domain.hypercube(0)
    with pytest.raises(ValueError):
        Domain.simplex(4)  # capped at dim 3


def test_volume_and_diameter():
    assert I.volume == 1.0
    assert Q3.volume == 1.0
    assert K2.volume == 0.5
    assert K3.volume == pytest.approx(1.0 / 6.0)
    assert I.diameter == 1.0
    assert Q2.diameter == pytest.approx(math.sqrt(2.0))
    assert K2.diameter == pytest.approx(math.sqrt(2.0))
    assert Domain.simplex(1).diameter == 1.0


def test_vertices():
    np.testing.assert_array_equal(I.vertices(), [[0.0], [1.0]])
    v = Q2.vertices()
    np.testing.assert_array_equal(v, [[0, 0], [0, 1], [1, 0], [1, 1]])
    v = K2.vertices()
    np.testing.assert_array_equal(v, [[0, 0], [1, 0], [0, 1]])


def test_contains():
    assert contains(I, [0.5]) and contains(I, [0.0]) and contains(I, [1.0])
    assert not contains(I, [1.0 + 1e-9])
    assert contains(K2, [0.5, 0.5])
    assert not contains(K2, [0.6, 0.5])
    # fsum keeps near-boundary barycentric points exact
    assert contains(K3, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])


def test_uniform_grid_interval():
    g = uniform_grid(I, 4)
    np.testing.assert_allclose(g[:, 0], [0.0, 0.25, 0.5, 0.75, 1.0])


def test_uniform_grid_counts():
    assert uniform_grid(Q2, 5).shape == (36, 2)
    # simplex keeps the points with coordinate sum <= 1
    assert uniform_grid(K2, 5).shape == (21, 2)
    assert uniform_grid(K3, 4).shape == (35, 3)


@pytest.mark.parametrize("m", [3, 7, 13])
def test_uniform_grid_simplex_stays_inside(m):
    for dom in (K2, K3):
        pts = uniform_grid(dom, m)
        assert all(contains(dom, p) for p in pts)


def test_quadrature_positive_weights():
    for dom in (I, Q2, K2, K3):
        rule = quadrature_rule(dom, 6)
        assert np.all(rule.weights > 0.0)
        assert all(contains(dom, p) for p in rule.nodes)


def test_quadrature_normalization():
    # weights integrate the constant 1 to the domain volume
    for dom in (I, Q2, Q3, K2, K3):
        rule = quadrature_rule(dom, 5)
        assert math.fsum(rule.weights) == pytest.approx(dom.volume, abs=1e-14)


@pytest.mark.parametrize(
    "dom,expo,value",
    [
        (I, (3,), 0.25),                 # int t^3 = 1/4
        (Q2, (2, 4), (1 / 3) * (1 / 5)),
        (K2, (1, 1), 1.0 / 24.0),        # int_{K2} x y = 1/24
        (K2, (2, 0), 1.0 / 12.0),
        (K3, (1, 1, 1), 1.0 / 720.0),
    ],
)
def test_quadrature_monomials(dom, expo, value):
    rule = quadrature_rule(dom, 8)
    f = lambda p: np.prod(p ** np.asarray(expo), axis=1)
    assert integrate(dom, f, rule) == pytest.approx(value, abs=1e-14)


def test_simplex_quadrature_degree():
    # level L integrates total degree 2L-1 exactly through the cube map
    for level in (2, 4):
        rule = quadrature_rule(K2, level)
        deg = 2 * level - 1
        exact = (
            math.factorial(deg) * math.factorial(0)
            / math.factorial(deg + 0 + 2)
        )  # int x^deg over K2 = deg! / (deg+2)!
        got = integrate(K2, lambda p: p[:, 0] ** deg, rule)
        assert got == pytest.approx(exact, rel=1e-13)


def test_simplex_from_cube_jacobian():
    # pushing the cube rule through the map reproduces simplex volume
    u = uniform_grid(Q2, 50) * 0.999 + 0.0005
    x, jac = simplex_from_cube(u)
    assert x.shape == u.shape and jac.shape == (u.shape[0],)
    assert np.all(jac >= 0.0)
    assert all(contains(K2, p) for p in x)


def test_integrate_rejects_nonfinite():
    rule = quadrature_rule(I, 4)
    with np.errstate(divide="ignore"):
        with pytest.raises(NumericError) as err:
            integrate(I, lambda p: 1.0 / (p[:, 0] - rule.nodes[0, 0]), rule)
    assert err.value.point is not None
