import warnings

import numpy as np
import pytest

from pressureless import constant_state as cs, front
from pressureless.errors import ConfigError, StabilityViolated, ZeroMass


def reference(**kw):
    args = dict(rho=1.0, rho_tilde=4.0, u=0.0, v=-1.0, k_hat0=0.5, P0=1.0)
    args.update(kw)
    return cs.ConstantStateScenario(**args)


def test_kappa_values():
    assert cs.kappa(1.0, 4.0) == pytest.approx(1 / 3)
    assert cs.kappa(2.0, 2.0) == pytest.approx(0.5)


def test_closed_form_reference_values():
    P, k = cs.closed_form_P(reference(), 0.0, 1.0)
    assert P == pytest.approx(np.sqrt(10.0), rel=1e-14)
    P0, k0 = cs.closed_form_P(reference(), 0.0, 0.0)
    assert (P0, k0) == pytest.approx((1.0, 0.5))


def test_closed_form_tends_to_kappa():
    _, k = cs.closed_form_P(reference(), 0.0, 1e6)
    assert k == pytest.approx(1 / 3, rel=1e-5)


def test_equal_densities_linear_mass():
    scen = reference(rho_tilde=1.0)
    P, k = cs.closed_form_P(scen, 0.0, 2.0)
    assert P == pytest.approx(3.0)
    hist = front.track(scen.data(), 8, 0.01, 2.0, store_every=50)
    np.testing.assert_allclose(cs.k_hat_of(hist.last, 0.0, -1.0), k, rtol=1e-9)


def test_closed_form_matches_tracker():
    scen = reference()
    hist = front.track(scen.data(), 8, 0.01, 1.0)
    P, k = cs.closed_form_P(scen, hist.last.l, 1.0)
    np.testing.assert_allclose(hist.last.P, P, rtol=1e-9)
    np.testing.assert_allclose(cs.k_hat_of(hist.last, 0.0, -1.0), k, rtol=1e-9)


def test_first_integrals_conserved():
    scen = reference(x0="l", y0="0.1*sin(2*pi*l)")
    hist = front.track(scen.data(), 16, 0.01, 0.3, store_every=10)
    C, G = cs.first_integrals(hist, 0.0, -1.0)
    np.testing.assert_allclose(C - C[:1], 0.0, atol=1e-13)


def test_unstable_k_hat_rejected():
    with pytest.raises(StabilityViolated):
        reference(k_hat0=1.2)
    scen = reference()
    object.__setattr__(scen, "k_hat0", 1.2)  # bypass the constructor check
    with pytest.raises(StabilityViolated):
        cs.closed_form_P(scen, 0.0, 1.0)
    P, k = cs.closed_form_P(scen, 0.0, 1.0, check=False)
    assert np.isfinite(P)


def test_stability_window():
    times = np.linspace(0, 1, 11)
    assert not cs.stability_window(times, np.full(11, 0.5)).any()
    flags = cs.stability_window(times, np.full(11, 1.2))
    assert flags[1:].all() and not flags[0].any()


def test_p_equation_rhs():
    l = np.linspace(0, 1, 64, endpoint=False)
    P = np.ones_like(l)
    out = cs.p_equation_rhs(P, np.sin(2 * np.pi * l), 2.0, l[1] - l[0])
    np.testing.assert_allclose(out, 4 * np.pi * np.cos(2 * np.pi * l), atol=0.03)
    with pytest.raises(ZeroMass):
        cs.p_equation_rhs(np.zeros(4), np.ones(4), 1.0, 0.25)


def test_p_equation_matches_tracker():
    scen = reference(rho_tilde=1.0, x0="l", y0="0.05*sin(2*pi*(l+0.5))")
    data = scen.data()
    times, P = cs.evolve_p_equation(data, 16, 0.01, 0.1)
    hist = front.track(data, 16, 0.01, 0.1)
    np.testing.assert_allclose(P[-1], hist.last.P, rtol=1e-6)


def test_p_equation_horizon_guard():
    data = reference(rho_tilde=1.0).data()
    with pytest.raises(ConfigError):
        cs.evolve_p_equation(data, 8, 0.01, 0.5)
    with pytest.warns(RuntimeWarning):
        cs.evolve_p_equation(data, 8, 0.05, 0.2, unsafe_long_horizon=True)


def test_p_equation_needs_equal_densities():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        with pytest.raises(ValueError):
            cs.evolve_p_equation(reference().data(), 8, 0.01, 0.05)
