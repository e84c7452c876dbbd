import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pressureless import fieldexpr as fe
from pressureless.acceptance import random_expression
from pressureless.errors import (DomainError, ExprSyntaxError, NonDifferentiable,
                                 UnknownFunction, UnknownIdentifier)


def test_parse_and_evaluate_polynomial():
    e = fe.parse("a^2 + 3*b")
    assert e(2.0, 1.0) == pytest.approx(7.0)


def test_derivative_of_sin_product():
    e = fe.parse("sin(a)*b")
    d = fe.differentiate(e, "a")
    assert d(0.0, 2.0) == pytest.approx(2.0)
    assert d(math.pi, 1.0) == pytest.approx(-1.0)


def test_constant_and_zero_derivative():
    e = fe.parse("2.5")
    assert e.is_constant
    assert fe.differentiate(e, "b")(3.0, -1.0) == 0.0


def test_precedence_and_right_associative_power():
    assert fe.parse("2^3^2")(0, 0) == pytest.approx(512.0)
    assert fe.parse("-a^2")(3.0, 0.0) == pytest.approx(-9.0)
    assert fe.parse("1 - 2 - 3")(0, 0) == pytest.approx(-4.0)
    assert fe.parse("8/4/2")(0, 0) == pytest.approx(1.0)


def test_vectorized_evaluation_broadcasts():
    e = fe.parse("a*b + 1")
    a = np.linspace(0, 1, 5)
    np.testing.assert_allclose(e(a, 2.0), 2 * a + 1)


def test_missing_paren_reports_position():
    with pytest.raises(ExprSyntaxError) as info:
        fe.parse("sin(a")
    assert info.value.position == 5


def test_unknown_identifier_position():
    with pytest.raises(UnknownIdentifier) as info:
        fe.parse("a + c")
    assert info.value.position == 4


def test_unknown_function():
    with pytest.raises(UnknownFunction):
        fe.parse("tanh(a)")


def test_trailing_garbage():
    with pytest.raises(ExprSyntaxError):
        fe.parse("a b")


def test_division_by_zero_is_domain_error():
    with pytest.raises(DomainError):
        fe.parse("1/a")(0.0, 1.0)


def test_sqrt_of_negative_is_domain_error():
    with pytest.raises(DomainError):
        fe.parse("sqrt(a)")(-1.0, 0.0)


def test_abs_is_not_differentiated():
    with pytest.raises(NonDifferentiable):
        fe.differentiate(fe.parse("abs(a)"), "a")


def test_custom_variables():
    e = fe.parse("l^2", ("l",))
    assert e(3.0) == pytest.approx(9.0)
    with pytest.raises(UnknownIdentifier):
        fe.parse("a", ("l",))


def test_render_roundtrip_simple():
    e = fe.parse("(a + b)*(a - b)/2")
    again = fe.parse(fe.render(e))
    for a, b in [(0.3, -1.2), (2.0, 5.0)]:
        assert again(a, b) == pytest.approx(e(a, b), rel=1e-15)


def test_evaluation_is_pure():
    e = fe.parse("exp(a)*cos(b)")
    first = e(0.7, 0.2)
    e.diff("a")
    assert e(0.7, 0.2) == first


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_render_roundtrip_random(seed):
    rng = np.random.default_rng(seed)
    e = fe.parse(random_expression(rng))
    again = fe.parse(fe.render(e))
    a, b = rng.uniform(-1, 1, 2)
    assert again(a, b) == pytest.approx(e(a, b), rel=1e-12, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_symbolic_derivative_matches_finite_difference(seed):
    rng = np.random.default_rng(seed)
    e = fe.parse(random_expression(rng))
    a, b = rng.uniform(-1, 1, 2)
    h = 1e-6
    for var, da, db in (("a", h, 0.0), ("b", 0.0, h)):
        fd = (e(a + da, b + db) - e(a - da, b - db)) / (2 * h)
        sym = fe.differentiate(e, var)(a, b)
        assert abs(sym - fd) <= 1e-5 * max(1.0, abs(sym))
