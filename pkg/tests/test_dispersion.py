import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pressureless import dispersion as dp
from pressureless.errors import BlowUp


@settings(max_examples=1000, deadline=None)
@given(K=st.floats(-1e3, 1e3).filter(lambda k: abs(k) > 1e-6),
       xi=st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-6))
def test_roots_solve_dispersion_relation(K, xi):
    roots = dp.dispersion_roots(K, xi)
    assert roots[0].growth_rate >= 0.0
    for r in roots:
        lam = complex(r.sigma, r.Delta)
        assert abs(lam * lam + 1j * K * xi) <= 1e-12 * abs(K * xi)
    assert roots[0].growth_rate == pytest.approx(np.sqrt(abs(K * xi) / 2), rel=1e-14)


def test_growth_rate_examples():
    assert dp.predicted_rate(1.0, 2.0) == pytest.approx(1.0)
    assert dp.predicted_rate(1.0, 32.0) == pytest.approx(4.0)


def test_zero_wavenumber_rejected():
    with pytest.raises(ValueError):
        dp.dispersion_roots(1.0, 0.0)


@pytest.mark.parametrize("xi", [4.0, 16.0])
def test_exact_mode_growth(xi):
    rate = dp.measure_growth(1.0, xi, t_max=12.0)
    assert rate == pytest.approx(np.sqrt(xi / 2), rel=1e-4)


def test_leapfrog_resolves_low_mode():
    rate = dp.measure_growth(1.0, 2 * np.pi, t_max=3.0, integrator="finite_difference",
                             n_points=256)
    assert rate == pytest.approx(np.sqrt(np.pi), rel=0.02)


def test_leapfrog_fastest_mode_grows_with_resolution():
    r1 = dp.max_resolved_growth(1.0, 1.0, 32, t_max=1.0)
    r2 = dp.max_resolved_growth(1.0, 1.0, 64, t_max=1.0)
    assert r2 / r1 == pytest.approx(np.sqrt(2), rel=0.05)


def test_blow_up_reports_time():
    with pytest.raises(BlowUp) as info:
        dp.measure_growth(1.0, 4096.0, t_max=16.0)
    assert 0 < info.value.time <= 16.0


def test_unknown_integrator():
    with pytest.raises(ValueError):
        dp.measure_growth(1.0, 4.0, 1.0, integrator="euler")


def test_growth_table_rows():
    rows = dp.growth_table(1.0, [4.0, 16.0], 12.0)
    assert [r.xi for r in rows] == [4.0, 16.0]
    for r in rows:
        assert r.measured == pytest.approx(r.predicted, rel=1e-4)
