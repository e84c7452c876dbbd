import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pressureless import front, scenario, variational as va
from pressureless.errors import (BoxTooSmall, InsufficientHistory, NoJumpDetected,
                                 QuadratureFailure)

BOX = (-2.0, 2.0, -2.0, 2.0)


def test_hopf_lax_linear_potential():
    # S0 = -a: minimizer a = x + t, value -x - t/2
    ms = va.hopf_lax(va.Potential.smooth("-a"), 0.5, 0.2, 0.1, BOX, grid_n=129)
    assert ms.value == pytest.approx(-0.2 - 0.25, abs=1e-10)
    assert len(ms.minimizers) == 1
    assert ms.minimizers[0] == pytest.approx((0.7, 0.1), abs=1e-6)


def test_hopf_lax_zero_potential_is_identity():
    ms = va.hopf_lax(va.Potential.smooth("0"), 1.0, 0.3, -0.4, BOX, grid_n=65)
    assert ms.value == pytest.approx(0.0, abs=1e-14)
    assert ms.minimizers[0] == pytest.approx((0.3, -0.4), abs=1e-6)


def test_box_too_small():
    with pytest.raises(BoxTooSmall):
        va.hopf_lax(va.Potential.smooth("-a"), 1.0, 1.5, 0.0, BOX, grid_n=65)


def test_time_must_be_positive():
    with pytest.raises(ValueError):
        va.hopf_lax(va.Potential.smooth("0"), 0.0, 0.0, 0.0, BOX)


def test_two_minimizers_on_singular_surface():
    pot = va.Potential.perturbed_step("0", 0.0)
    t = 1.0
    ms = va.hopf_lax(pot, t, 0.0, t / 2, BOX, grid_n=129)
    assert len(ms.minimizers) == 2
    bs = sorted(b for _, b in ms.minimizers)
    assert bs == pytest.approx([-t / 2, t / 2], abs=1e-6)


def test_flat_singular_surface():
    pot = va.Potential.perturbed_step("0", 0.0)
    pts = va.singular_surface(pot, 0.8, [-0.3, 0.2], (0.0, 1.0), BOX, grid_n=129)
    np.testing.assert_allclose(pts[:, 1], 0.4, atol=1e-9)


def test_curved_singular_surface_exact():
    # f = a^2 is exactly solvable: y = t/2 - eps x^2 / (1 + 2 eps t)
    eps, t, x = 0.1, 0.6, 0.3
    pot = va.Potential.perturbed_step("a^2", eps)
    pts = va.singular_surface(pot, t, [x], (0.0, 0.6), BOX, grid_n=129)
    assert pts[0, 1] == pytest.approx(t / 2 - eps * x * x / (1 + 2 * eps * t), abs=1e-8)


def test_no_jump_detected():
    pot = va.Potential.perturbed_step("0", 0.0)
    with pytest.raises(NoJumpDetected):
        va.singular_surface(pot, 1.0, [0.0], (0.6, 0.9), BOX, grid_n=65)


@settings(max_examples=15, deadline=None)
@given(x=st.floats(-0.5, 0.5), y=st.floats(-0.5, 0.5), t=st.floats(0.1, 0.8))
def test_velocity_matches_characteristics(x, y, t):
    pot = va.Potential.smooth("0.5*a^2 + 0.3*b")
    # S0_a = a, S0_b = 0.3: the characteristic from (a, b) reaches x = a (1 + t)
    u, v = va.velocity(pot, t, x, y, BOX, grid_n=65)
    assert u == pytest.approx(x / (1 + t), abs=1e-5)
    assert v == pytest.approx(0.3, abs=1e-5)


def test_adaptive_simpson():
    assert va.adaptive_simpson(np.sin, 0.0, np.pi) == pytest.approx(2.0, abs=1e-10)
    assert va.adaptive_simpson(lambda s: s ** 3, 1.0, 1.0) == 0.0


def test_adaptive_simpson_failure():
    with pytest.raises(QuadratureFailure):
        va.adaptive_simpson(lambda s: 1.0 / np.sqrt(abs(s - 0.3) + 1e-300), 0.0, 1.0,
                            tol=1e-14, max_depth=8)


def test_rh_surface_unperturbed():
    assert va.rh_perturbation_surface("0", 0.1, 0.8, 0.2) == pytest.approx((0.2, 0.4))


def test_rh_surface_quadratic():
    t, l, eps = 0.8, 0.3, 1e-3
    x, y = va.rh_perturbation_surface("a^2", eps, t, l)
    assert y == pytest.approx(t / 2 + eps * (-l * l - t * t / 12), abs=1e-13)
    assert x == pytest.approx(l + eps * l * t, abs=1e-13)


def test_rh_surface_linear_in_b():
    # f = b: the curve is b (1 + eps) = 0 and the lower speed is 1 + eps
    t, eps = 0.6, 0.01
    _, y = va.rh_perturbation_surface("b", eps, t, 0.0)
    assert y == pytest.approx(t / 2 + eps * t / 2, abs=1e-13)


def test_gap_vanishes_without_curvature():
    for f in ("a", "b", "a*b + 3*b^2"):
        assert va.theorem31_gap(f, 0.1, 0.7, 0.2) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.05, 2.0), l=st.floats(-1, 1), eps=st.floats(1e-4, 1e-1))
def test_gap_quadratic_closed_form(t, l, eps):
    assert va.theorem31_gap("a^2", eps, t, l) == pytest.approx(-eps * t * t / 12, rel=1e-9)


def test_theorem32_riemann_zero_and_quadratic_nonzero():
    data = scenario.riemann()
    hist = front.track(data, 16, 0.05, 0.5)
    d = va.theorem32_relation(hist, va.Potential.from_data(data))
    assert np.max(np.abs(d)) < 1e-14

    data = scenario.potential_perturbation("a^2", 0.1)
    hist = front.track(data, 41, 0.01, 0.5)
    pot = va.Potential.from_data(data)
    d = va.theorem32_relation(hist, pot)
    pointwise = va.surface_condition_defect(hist, pot)
    inner = slice(5, -5)
    np.testing.assert_allclose(d[-1, inner], pointwise[-1, inner], rtol=1e-3)
    assert np.min(np.abs(d[-1, inner])) > 1e-5


def test_theorem32_needs_history():
    data = scenario.riemann()
    hist = front.track(data, 4, 0.5, 0.5)
    with pytest.raises(InsufficientHistory):
        va.theorem32_relation(hist, va.Potential.from_data(data))


def test_potential_from_data_requires_potential():
    data = scenario.constant_state(1.0, 4.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        va.Potential.from_data(data)
