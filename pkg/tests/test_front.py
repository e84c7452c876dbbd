from dataclasses import replace

import numpy as np
import pytest

from pressureless import front, scenario
from pressureless.errors import (FrontFold, InadmissibleScenario, InsufficientHistory,
                                 SideViolation, ZeroMass)
from pressureless.scenario import Curve, InitialData


def asymmetric(rho_minus=1.0, rho_plus=4.0):
    """Head-on collision with unequal densities; sticky speed is the sqrt-rho mean."""
    curve = Curve("l", "0", -0.5, 0.5, topology="periodic", shift=(1.0, 0.0))
    return InitialData.from_expressions(rho_minus, 0.0, -1.0, rho_plus, 0.0, 1.0,
                                        level_set="-b", curve=curve)


def test_riemann_rhs_at_start():
    data = scenario.riemann(rho=2.0, w=0.5)
    state = front.initialize(data, 8)
    dP, dI, dJ, U, V = front.rh_rhs(data, state)
    np.testing.assert_allclose(dP, 2 * 2.0 * 0.5)
    np.testing.assert_allclose([dI, dJ, U, V], 0.0, atol=1e-15)


def test_riemann_track():
    hist = front.track(scenario.riemann(), 8, 0.1, 1.0)
    last = hist.last
    np.testing.assert_allclose(last.P, 2.0, rtol=1e-13)
    np.testing.assert_allclose(last.y, 0.0, atol=1e-14)
    assert len(hist) == 11


def test_asymmetric_collision_speed():
    data = asymmetric()
    V_exact = (1.0 * -1.0 + 2.0 * 1.0) / 3.0
    state = front.initialize(data, 8)
    U, V = front.velocities(data, state)
    np.testing.assert_allclose(V, V_exact, rtol=1e-14)
    hist = front.track(data, 8, 0.05, 1.0)
    np.testing.assert_allclose(hist.last.y, V_exact, rtol=1e-12)
    # absorbed mass: the plus stream closes at 1 - V, the minus at 1 + V
    P_exact = 4.0 * (1 - V_exact) + 1.0 * (1 + V_exact)
    np.testing.assert_allclose(hist.last.P, P_exact, rtol=1e-12)


def test_constant_state_initial_rate():
    # dP/dt = G (rho - k_hat (rho - rho_tilde)) with G = 1, k_hat = 1/2
    data = scenario.constant_state(1.0, 4.0, 0.0, -1.0, k_hat0=0.5, P0=1.0)
    state = front.initialize(data, 8)
    dP, dI, dJ, U, V = front.rh_rhs(data, state)
    np.testing.assert_allclose(dP, 2.5)
    np.testing.assert_allclose(V, -0.5)


def test_front_velocity_requires_mass():
    m = front.initialize(scenario.riemann(), 4).marker(0)
    with pytest.raises(ZeroMass):
        front.front_velocity(m)
    m = m._replace(P=2.0, I=1.0, J=-4.0)
    assert front.front_velocity(m) == (0.5, -2.0)


def test_massless_marker_after_start():
    state = front.initialize(scenario.riemann(), 4)
    with pytest.raises(ZeroMass):
        front.velocities(scenario.riemann(), replace(state, t=0.1))


def test_diverging_data_rejected():
    curve = Curve("l", "0", -0.5, 0.5)
    data = InitialData.from_expressions(1.0, 0.0, 1.0, 1.0, 0.0, -1.0, level_set="-b",
                                        curve=curve)
    with pytest.raises(InadmissibleScenario):
        front.initialize(data, 8)


def test_side_violation_detected():
    data = scenario.riemann()
    state = front.initialize(data, 4)
    bad = replace(state, t=0.5, b_minus=state.b_minus - 0.1)
    with pytest.raises(SideViolation):
        front.check_side_constraints(data, bad)


def test_fold_detected():
    state = front.initialize(scenario.riemann(), 4)
    x = state.x.copy()
    x[2] = x[1]
    with pytest.raises(FrontFold):
        front._check_fold(replace(state, x=x))


def test_track_needs_whole_steps():
    with pytest.raises(ValueError):
        front.track(scenario.riemann(), 4, 0.3, 1.0)


def test_history_needs_three_states():
    data = scenario.riemann()
    hist = front.track(data, 4, 0.5, 0.5)
    with pytest.raises(InsufficientHistory):
        front.adhesion_residual(data, hist)


def test_l_derivative_periodic_with_shift():
    l = np.linspace(0, 1, 16, endpoint=False)
    f = l + 0.1 * np.sin(2 * np.pi * l)
    d = front.l_derivative(f, l[1] - l[0], "periodic", 1.0)
    exact = 1 + 0.2 * np.pi * np.cos(2 * np.pi * l)
    np.testing.assert_allclose(d, exact, atol=0.02)


def test_accumulated_measures_match_ode():
    data = scenario.potential_perturbation("a^2", 0.1)
    hist = front.track(data, 33, 0.01, 0.5)
    P, I, J = front.accumulated_measures(data, hist)
    inner = slice(2, -2)
    np.testing.assert_allclose(P[inner], hist.last.P[inner], rtol=1e-3)
    np.testing.assert_allclose(J[inner], hist.last.J[inner], rtol=1e-3)


def test_adhesion_residual_small_for_tracked_front():
    data = asymmetric()
    hist = front.track(data, 8, 0.05, 1.0)
    rx, ry = front.adhesion_residual(data, hist)
    assert np.max(np.abs(rx)) < 1e-10
    assert np.max(np.abs(ry)) < 1e-10


def test_adhesion_residual_catches_corrupted_velocity(monkeypatch):
    data = asymmetric()
    real = front.velocities

    def corrupted(*args, **kw):
        U, V = real(*args, **kw)
        return 1.1 * U, 1.1 * V

    monkeypatch.setattr(front, "velocities", corrupted)
    hist = front.track(data, 8, 0.05, 1.0)
    _, ry = front.adhesion_residual(data, hist)
    assert np.min(np.abs(ry)) > 1e-2
