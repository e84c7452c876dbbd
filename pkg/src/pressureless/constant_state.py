"""Fronts driven by a constant external state.

The minus side carries density ``rho`` and velocity ``(u, v)``, the plus side
density ``rho_tilde`` at rest.  Along every marker ``C = u*J - v*I`` is
conserved, and so is ``G = u*y_l - v*x_l`` whenever ``C/P`` does not depend
on ``l``.  For ``C = 0`` the momentum is ``k*(u, v)`` with ``k = k_hat*P``
and ``P`` has the closed form::

    P^2 = P0^2 - 2 G P0 N t + rho rho_tilde G^2 t^2,   N = k_hat0 (rho - rho_tilde) - rho
    k_hat (rho - rho_tilde) = rho - dP/dt / G

so the front speed fraction ``k_hat`` tends to ``sqrt(rho)/(sqrt(rho)+sqrt(rho_tilde))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import scenario as sc
from .errors import ConfigError, StabilityViolated, ZeroMass
from .fieldexpr import as_field
from .front import FrontHistory, initialize, l_derivative, rh_rhs

P_EQUATION_T_MAX = 0.1


@dataclass(frozen=True)
class ConstantStateScenario:
    rho: float
    rho_tilde: float
    u: float
    v: float
    x0: str = "l"
    y0: str = "0"
    k_hat0: float = 0.5
    P0: float = 1.0
    l_min: float = -0.5
    l_max: float = 0.5
    topology: str = "periodic"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.rho > 0 and self.rho_tilde > 0):
            raise ValueError("both densities must be positive")
        if np.isscalar(self.k_hat0) and not 0.0 < self.k_hat0 < 1.0:
            raise StabilityViolated(f"k_hat0 = {self.k_hat0} is outside (0, 1)")

    def data(self, **overrides):
        kw = dict(x0=self.x0, y0=self.y0, k_hat0=self.k_hat0, P0=self.P0,
                  l_min=self.l_min, l_max=self.l_max, topology=self.topology)
        kw.update(self.options)
        kw.update(overrides)
        return sc.constant_state(self.rho, self.rho_tilde, self.u, self.v, **kw)

    def G(self, l):
        xl = as_field(self.x0, ("l",)).diff("l")
        yl = as_field(self.y0, ("l",)).diff("l")
        return self.u * yl(l) - self.v * xl(l)


def kappa(rho, rho_tilde):
    """Asymptotic fraction of the external velocity at which the front moves."""
    return np.sqrt(rho) / (np.sqrt(rho) + np.sqrt(rho_tilde))


def closed_form_P(scen: ConstantStateScenario, l, t, check=True):
    """``(P, k_hat)`` for the ``C = 0`` family at parameter ``l`` and time ``t``."""
    rho, rt = scen.rho, scen.rho_tilde
    k0 = np.asarray(as_field(scen.k_hat0, ("l",))(l), dtype=float)
    if check and np.any((k0 <= 0.0) | (k0 >= 1.0)):
        raise StabilityViolated("k_hat0 must lie in (0, 1)")
    P0 = np.asarray(as_field(scen.P0, ("l",))(l), dtype=float)
    G = np.asarray(scen.G(l), dtype=float)
    t = np.asarray(t, dtype=float)
    if rho == rt:
        # P is linear; k_hat from (P k_hat)' + rho G (k_hat - 1) = 0
        P = P0 + rho * G * t
        k = (k0 * P0 * P0 + rho * G * (P0 * t + 0.5 * rho * G * t * t)) / (P * P)
        return P, k
    N = k0 * (rho - rt) - rho
    P = np.sqrt(P0 * P0 - 2.0 * G * P0 * N * t + rho * rt * G * G * t * t)
    dP = (-G * P0 * N + rho * rt * G * G * t) / P
    k = (rho - dP / G) / (rho - rt)
    return P, k


def k_hat_of(history_or_state, u, v):
    """Front speed fraction ``(I u + J v) / (P (u^2 + v^2))``."""
    if isinstance(history_or_state, FrontHistory):
        P, Iv, Jv = (history_or_state.stack(n) for n in ("P", "I", "J"))
    else:
        P, Iv, Jv = history_or_state.P, history_or_state.I, history_or_state.J
    return (Iv * u + Jv * v) / (P * (u * u + v * v))


def first_integrals(history: FrontHistory, u, v):
    """``(u J - v I, u y_l - v x_l)`` as ``(n_times, n_markers)`` arrays."""
    C = u * history.stack("J") - v * history.stack("I")
    G = []
    for s in history.states:
        xl = l_derivative(s.x, s.dl, s.topology, s.shift[0])
        yl = l_derivative(s.y, s.dl, s.topology, s.shift[1])
        G.append(u * yl - v * xl)
    return C, np.stack(G)


def stability_window(times, k_hat):
    """Flags ``(n_times, n_markers)`` where ``0 < int_0^t k_hat < t`` fails (t > 0)."""
    times = np.asarray(times, dtype=float)
    k_hat = np.asarray(k_hat, dtype=float)
    if k_hat.ndim == 1:
        k_hat = k_hat[:, None]
    integ = np.zeros_like(k_hat)
    dt = np.diff(times)[:, None]
    integ[1:] = np.cumsum(0.5 * dt * (k_hat[1:] + k_hat[:-1]), axis=0)
    ok = (integ > 0.0) & (integ < times[:, None])
    ok[times <= 0.0] = True
    return ~ok


def p_equation_rhs(P, C, rho, dl, topology="periodic"):
    """Second time derivative of ``P`` for equal densities: ``rho * (C/P)_l``."""
    P = np.asarray(P, dtype=float)
    if np.any(P <= 0.0):
        raise ZeroMass("p-equation needs P > 0 on every marker")
    return rho * l_derivative(np.asarray(C, dtype=float) / P, dl, topology)


def evolve_p_equation(data, n_markers, dt, t_max=P_EQUATION_T_MAX, unsafe_long_horizon=False):
    """RK4 for ``P'' = rho (C/P)_l`` from the initial marker state of ``data``.

    Only meaningful for equal densities and a plus side at rest.  The Cauchy
    problem is ill-posed, so horizons beyond ``P_EQUATION_T_MAX`` are refused
    unless ``unsafe_long_horizon`` is set.  Returns ``(times, P)``.
    """
    if t_max > P_EQUATION_T_MAX and not unsafe_long_horizon:
        raise ConfigError(f"t_max = {t_max} exceeds the safe horizon {P_EQUATION_T_MAX}; "
                          "pass unsafe_long_horizon to override")
    if t_max > P_EQUATION_T_MAX:
        warnings.warn("the P equation is ill-posed: high-frequency errors grow without "
                      "bound and long-horizon results are meaningless", RuntimeWarning)
    rho = float(data.minus.rho.root.value)
    if not np.isclose(rho, float(data.plus.rho.root.value)):
        raise ValueError("the P equation holds for equal densities only")
    s0 = initialize(data, n_markers, check=False)
    u, v = float(data.minus.u.root.value), float(data.minus.v.root.value)
    C = u * s0.J - v * s0.I
    dP = rh_rhs(data, s0)[0]
    Y = np.stack([s0.P, dP])

    def f(Y):
        return np.stack([Y[1], p_equation_rhs(Y[0], C, rho, s0.dl, s0.topology)])

    n = int(round(t_max / dt))
    times = [0.0]
    out = [Y[0].copy()]
    for i in range(n):
        k1 = f(Y)
        k2 = f(Y + 0.5 * dt * k1)
        k3 = f(Y + 0.5 * dt * k2)
        k4 = f(Y + dt * k3)
        Y = Y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        times.append((i + 1) * dt)
        out.append(Y[0].copy())
    return np.array(times), np.stack(out)
