import numpy as np
import pytest
from math import factorial

from helmdg.quadrature import (UnsupportedDegreeError, edge_rule,
                               triangle_rule)


def tri_monomial_integral(a, b):
    """Exact integral of x^a y^b over the reference triangle."""
    return factorial(a) * factorial(b) / factorial(a + b + 2)


@pytest.mark.parametrize("degree", [0, 1, 2, 3, 5, 8, 13, 16, 21])
def test_triangle_monomial_exactness(degree):
    rule = triangle_rule(degree)
    x, y = rule.points[:, 0], rule.points[:, 1]
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            got = np.sum(rule.weights * x**a * y**b)
            assert got == pytest.approx(tri_monomial_integral(a, b), abs=1e-15)


def test_triangle_specific_value():
    # integral of x^2 y^2 over the reference triangle is 2!2!/6! = 1/180
    rule = triangle_rule(4)
    got = np.sum(rule.weights * rule.points[:, 0]**2 * rule.points[:, 1]**2)
    assert got == pytest.approx(1.0 / 180.0, abs=1e-16)


def test_triangle_weights_positive_points_interior():
    for degree in (1, 7, 20, 41):
        rule = triangle_rule(degree)
        assert (rule.weights > 0).all()
        x, y = rule.points[:, 0], rule.points[:, 1]
        assert (x > 0).all() and (y > 0).all() and (x + y < 1).all()
        assert rule.weights.sum() == pytest.approx(0.5, rel=1e-14)


@pytest.mark.parametrize("degree", [0, 1, 4, 9, 16, 33])
def test_edge_monomial_exactness(degree):
    rule = edge_rule(degree)
    for a in range(degree + 1):
        got = np.sum(rule.weights * rule.points**a)
        assert got == pytest.approx(1.0 / (a + 1), abs=1e-15)


def test_edge_points_inside_unit_interval():
    rule = edge_rule(11)
    assert (rule.points > 0).all() and (rule.points < 1).all()
    assert rule.weights.sum() == pytest.approx(1.0, rel=1e-14)


def test_unsupported_degree():
    with pytest.raises(UnsupportedDegreeError):
        triangle_rule(501)
    with pytest.raises(UnsupportedDegreeError):
        edge_rule(-1)


def test_rules_are_cached_and_frozen():
    r1 = triangle_rule(6)
    r2 = triangle_rule(6)
    assert r1 is r2
    with pytest.raises(ValueError):
        r1.weights[0] = 0.0
