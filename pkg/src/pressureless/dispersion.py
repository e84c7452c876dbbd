"""Mode growth for the model equation ``P_tt = K P_x``.

A mode ``exp(i(xi x + lam t))`` needs ``lam^2 = -i K xi``, i.e.
``sigma^2 = Delta^2`` and ``2 sigma Delta = -K xi`` for ``lam = sigma + i Delta``.
One root always grows like ``exp(sqrt(|K xi| / 2) t)``, so growth is
unbounded in the wavenumber and the Cauchy problem is ill-posed.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import BlowUp


class ModeSolution(NamedTuple):
    xi: float
    sigma: float
    Delta: float
    K: float

    @property
    def growth_rate(self):
        return -self.Delta


class GrowthRow(NamedTuple):
    xi: float
    predicted: float
    measured: float
    integrator: str
    N: int


def predicted_rate(K, xi):
    return float(np.sqrt(abs(K) * abs(xi) / 2.0))


def dispersion_roots(K, xi):
    """Both roots of ``lam^2 = -i K xi``, the growing one (``Delta <= 0``) first."""
    if xi == 0:
        raise ValueError("wavenumber must be nonzero")
    r = predicted_rate(K, xi)
    if K * xi >= 0:
        pairs = [(r, -r), (-r, r)]
    else:
        pairs = [(-r, -r), (r, r)]
    return [ModeSolution(float(xi), s, d, float(K)) for s, d in pairs]


def _fit_rate(times, amplitude, t_max):
    window = times >= 0.5 * t_max
    with np.errstate(divide="ignore"):
        logs = np.log(amplitude[window])
    if not np.all(np.isfinite(logs)):
        raise ValueError("mode amplitude vanished inside the fit window")
    slope, _ = np.polyfit(times[window], logs, 1)
    return float(slope)


def _mode_amplitude(P, m):
    return np.abs(np.fft.rfft(P)[m]) * 2.0 / len(P)


def _exact(K, xi, t_max, n_points, m, amplitude, n_samples):
    # P(0) = A cos(xi x), P_t(0) = 0: the mode coefficient is A cos(lam t)
    lam = np.sqrt(complex(0.0, -K * xi))
    x = np.arange(n_points) * (2 * np.pi * m / abs(xi)) / n_points
    times = np.linspace(0.0, t_max, n_samples)
    amp = np.empty(n_samples)
    for k, t in enumerate(times):
        with np.errstate(over="ignore", invalid="ignore"):
            coef = amplitude * np.cos(lam * t)
            P = np.real(coef * np.exp(1j * xi * x))
        if not np.all(np.isfinite(P)):
            raise BlowUp("exact mode overflowed", time=float(t))
        amp[k] = _mode_amplitude(P, m)
    return times, amp


def _leapfrog(K, xi, t_max, n_points, m, amplitude, dt):
    L = 2 * np.pi * m / abs(xi)
    dx = L / n_points
    x = np.arange(n_points) * dx
    if dt is None:
        dt = 0.02 * np.sqrt(dx / abs(K)) if K != 0 else t_max / 1000.0
    n_steps = int(np.ceil(t_max / dt))
    dt = t_max / n_steps

    def Px(P):
        return (np.roll(P, -1) - np.roll(P, 1)) / (2.0 * dx)

    P_old = amplitude * np.cos(xi * x)
    P = P_old + 0.5 * dt * dt * K * Px(P_old)
    times = [0.0, dt]
    amp = [_mode_amplitude(P_old, m), _mode_amplitude(P, m)]
    with np.errstate(over="raise", invalid="raise"):
        for n in range(2, n_steps + 1):
            try:
                P_old, P = P, 2.0 * P - P_old + dt * dt * K * Px(P)
            except FloatingPointError:
                raise BlowUp("leapfrog overflowed", time=n * dt) from None
            if not np.all(np.isfinite(P)):
                raise BlowUp("leapfrog overflowed", time=n * dt)
            times.append(n * dt)
            amp.append(_mode_amplitude(P, m))
    return np.array(times), np.array(amp)


def measure_growth(K, xi, t_max, integrator="exact_mode", n_points=64, m=1,
                   amplitude=1e-8, n_samples=401, dt=None):
    """Growth rate of a single seeded mode fitted over ``[t_max/2, t_max]``.

    The domain holds ``m`` periods of the mode on ``n_points`` grid points.
    ``exact_mode`` evolves the two-root solution analytically;
    ``finite_difference`` uses centered differences in ``x`` and leapfrog in
    ``t``, whose discrete wavenumber ``sin(xi dx)/dx`` limits the rate.
    """
    if integrator == "exact_mode":
        times, amp = _exact(K, xi, t_max, n_points, m, amplitude, n_samples)
    elif integrator == "finite_difference":
        times, amp = _leapfrog(K, xi, t_max, n_points, m, amplitude, dt)
    else:
        raise ValueError(f"unknown integrator {integrator!r}")
    return _fit_rate(times, amp, t_max)


def max_resolved_growth(K, length, n_points, t_max, amplitude=1e-8, dt=None):
    """Leapfrog growth of the fastest grid mode (``xi dx = pi/2``) on a fixed domain."""
    if n_points % 4:
        raise ValueError("n_points must be a multiple of 4")
    m = n_points // 4
    xi = 2 * np.pi * m / length
    return measure_growth(K, xi, t_max, "finite_difference", n_points, m, amplitude, dt=dt)


def growth_table(K, xis, t_max, integrator="exact_mode", n_points=64):
    return [GrowthRow(float(xi), predicted_rate(K, xi),
                      measure_growth(K, xi, t_max, integrator, n_points), integrator, n_points)
            for xi in xis]
