"""Lagrangian front tracking with the generalized Rankine-Hugoniot system.

The shock is a chain of markers labelled by the curve parameter ``l``.
Each marker carries its position and the mass and momentum line densities
``P``, ``I``, ``J`` that have stuck to it; it moves with ``(I/P, J/P)``.
Matter reaches a marker from both sides along straight characteristics,
and the rate at which it arrives is set by the one-sided Eulerian states at
the marker, which are known in closed form via the characteristics' initial
points (pre-images).  With ``c = x_l V - y_l U`` and
``n = x_l v - y_l u`` on each side::

    dP/dt = rho+ (n+ - c) - rho- (n- - c)
    dI/dt = rho+ u+ (n+ - c) - rho- u- (n- - c)
    dJ/dt = rho+ v+ (n+ - c) - rho- v- (n- - c)
    dx/dt = U,  dy/dt = V
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .characteristics import preimage, side_state
from .errors import (
    FrontFold,
    InadmissibleScenario,
    InsufficientHistory,
    SideViolation,
    StepRejected,
    ZeroMass,
)
from .scenario import InitialData, check_condition_II

SIDE_TOL = 1e-9
FOLD_TOL = 1e-12


class FrontMarker(NamedTuple):
    l: float
    x: float
    y: float
    P: float
    I: float
    J: float
    a_minus: float
    b_minus: float
    a_plus: float
    b_plus: float


@dataclass(frozen=True)
class FrontState:
    """Snapshot of the whole front at time ``t``; arrays are indexed by marker."""

    t: float
    l: np.ndarray
    x: np.ndarray
    y: np.ndarray
    P: np.ndarray
    I: np.ndarray
    J: np.ndarray
    a_minus: np.ndarray
    b_minus: np.ndarray
    a_plus: np.ndarray
    b_plus: np.ndarray
    topology: str = "open"
    shift: tuple = (0.0, 0.0)

    def __post_init__(self):
        for name in ("l", "x", "y", "P", "I", "J", "a_minus", "b_minus", "a_plus", "b_plus"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.l)

    @property
    def dl(self):
        return float(self.l[1] - self.l[0])

    def marker(self, i) -> FrontMarker:
        return FrontMarker(*(float(getattr(self, f)[i]) for f in FrontMarker._fields))

    @property
    def markers(self):
        return [self.marker(i) for i in range(len(self))]


class FrontHistory:
    """Accepted states in time order."""

    def __init__(self, states=()):
        self.states = list(states)

    def append(self, state):
        self.states.append(state)

    @property
    def times(self):
        return np.array([s.t for s in self.states])

    @property
    def last(self):
        return self.states[-1]

    def __len__(self):
        return len(self.states)

    def stack(self, name):
        """``(n_times, n_markers)`` array of one marker field."""
        return np.stack([getattr(s, name) for s in self.states])


# {{{ helpers

def l_derivative(f, dl, topology="open", shift=0.0):
    """d/dl on a uniform marker grid.

    Centered differences inside; second-order one-sided at open ends; a
    periodic front wraps around, adding ``shift`` across the seam.
    """
    f = np.asarray(f, dtype=float)
    if topology == "periodic":
        fp = np.roll(f, -1)
        fm = np.roll(f, 1)
        fp[-1] += shift
        fm[0] -= shift
        return (fp - fm) / (2.0 * dl)
    return np.gradient(f, dl, edge_order=2)


def tangents(state: FrontState):
    return (l_derivative(state.x, state.dl, state.topology, state.shift[0]),
            l_derivative(state.y, state.dl, state.topology, state.shift[1]))


def one_sided_states(data: InitialData, state: FrontState):
    """Transported ``(rho, u, v)`` on each side at every marker."""
    rm, um, vm = side_state(data, "minus", state.a_minus, state.b_minus, state.t)
    rp, up, vp = side_state(data, "plus", state.a_plus, state.b_plus, state.t)
    shape = state.x.shape
    return tuple(np.broadcast_to(np.asarray(v, dtype=float), shape)
                 for v in (rm, um, vm, rp, up, vp))


def _limit_velocity(xl, yl, rm, um, vm, rp, up, vp):
    """Front velocity as ``t -> 0`` for a marker with no mass yet.

    Both ``I`` and ``P`` vanish, so ``U = dI/dP``; requiring the crossing
    rate ``c`` to be consistent with that ratio gives a quadratic in ``c``
    whose regular root is the density-weighted mean below.
    """
    n_m = xl * vm - yl * um
    n_p = xl * vp - yl * up
    sm, sp = np.sqrt(rm), np.sqrt(rp)
    c = (sp * n_p + sm * n_m) / (sp + sm)
    Pdot = rp * (n_p - c) - rm * (n_m - c)
    Idot = rp * up * (n_p - c) - rm * um * (n_m - c)
    Jdot = rp * vp * (n_p - c) - rm * vm * (n_m - c)
    return Idot / Pdot, Jdot / Pdot


def front_velocity(m: FrontMarker):
    if not m.P > 0:
        raise ZeroMass(f"marker at l={m.l:g} carries no mass")
    return m.I / m.P, m.J / m.P


def velocities(data: InitialData, state: FrontState, sides=None):
    """``(U, V)`` at every marker; massless markers use the t -> 0 limit."""
    P = state.P
    zero = P <= 0
    if np.any(zero) and state.t > 0:
        raise ZeroMass(f"{int(zero.sum())} marker(s) without mass at t={state.t:g}")
    with np.errstate(divide="ignore", invalid="ignore"):
        U = np.where(zero, 0.0, state.I / np.where(zero, 1.0, P))
        V = np.where(zero, 0.0, state.J / np.where(zero, 1.0, P))
    if np.any(zero):
        xl, yl = tangents(state)
        if sides is None:
            sides = one_sided_states(data, state)
        U0, V0 = _limit_velocity(xl, yl, *sides)
        U = np.where(zero, U0, U)
        V = np.where(zero, V0, V)
    return U, V

# }}}


def initialize(data: InitialData, n_markers, check=True) -> FrontState:
    """Markers on the initial curve, carrying the data's initial line densities."""
    if check:
        violations = check_condition_II(data)
        if violations:
            raise InadmissibleScenario(
                f"condition II fails at {len(violations)} curve samples "
                f"(first at l={violations[0].l:.6g})")
    curve = data.curve
    l = curve.grid(n_markers)
    a, b = curve.point(l)
    a = np.broadcast_to(np.asarray(a, dtype=float), l.shape)
    b = np.broadcast_to(np.asarray(b, dtype=float), l.shape)

    def line(e):
        return np.broadcast_to(np.asarray(e(l), dtype=float), l.shape)

    return FrontState(0.0, l, a, b, line(data.P0), line(data.I0), line(data.J0),
                      a, b, a, b, curve.topology, curve.shift)


def refresh_preimages(data: InitialData, state: FrontState, check_sides=True) -> FrontState:
    """Re-solve both sides' pre-images for the current marker positions."""
    if state.t == 0.0:
        am, bm, ap, bp = state.x, state.y, state.x, state.y
    else:
        am, bm = preimage(data, "minus", state.x, state.y, state.t,
                          seed=(state.a_minus, state.b_minus))
        ap, bp = preimage(data, "plus", state.x, state.y, state.t,
                          seed=(state.a_plus, state.b_plus))
    new = replace(state, a_minus=am, b_minus=bm, a_plus=ap, b_plus=bp)
    if check_sides and state.t > 0:
        check_side_constraints(data, new)
    return new


def check_side_constraints(data: InitialData, state: FrontState, tol=SIDE_TOL):
    gm = np.asarray(data.sign_value(state.a_minus, state.b_minus))
    gp = np.asarray(data.sign_value(state.a_plus, state.b_plus))
    bad = (gm > tol) | (gp < -tol)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise SideViolation(
            f"pre-image crossed the initial curve at l={state.l[i]:.6g}, t={state.t:.6g}: "
            f"the front left the two-stream region")


def rh_rhs(data: InitialData, state: FrontState):
    """Time derivatives ``(dP, dI, dJ, dx, dy)`` of every marker.

    ``state`` must hold pre-images for its own positions and time.
    """
    xl, yl = tangents(state)
    rm, um, vm, rp, up, vp = sides = one_sided_states(data, state)
    U, V = velocities(data, state, sides)
    c = xl * V - yl * U
    fp = rp * (xl * vp - yl * up - c)
    fm = rm * (xl * vm - yl * um - c)
    return fp - fm, up * fp - um * fm, vp * fp - vm * fm, U, V


def _with(state, t, Y):
    x, y, P, I, J = Y
    return replace(state, t=t, x=x, y=y, P=P, I=I, J=J)


def step(data: InitialData, state: FrontState, dt) -> FrontState:
    """One classical RK4 step; pre-images are re-solved at every stage."""
    t = state.t
    Y0 = np.array([state.x, state.y, state.P, state.I, state.J])

    def f(s):
        dP, dI, dJ, dx, dy = rh_rhs(data, s)
        return np.array([dx, dy, dP, dI, dJ])

    def stage(Y, t_s, seeds):
        if t_s > 0 and np.any(Y[2] <= 0):
            raise StepRejected(f"mass would become non-positive at t={t_s:g}")
        return refresh_preimages(data, _with(seeds, t_s, Y), check_sides=False)

    k1 = f(state)
    s2 = stage(Y0 + 0.5 * dt * k1, t + 0.5 * dt, state)
    k2 = f(s2)
    s3 = stage(Y0 + 0.5 * dt * k2, t + 0.5 * dt, s2)
    k3 = f(s3)
    s4 = stage(Y0 + dt * k3, t + dt, s3)
    k4 = f(s4)
    Y = Y0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if np.any(Y[2] <= 0):
        raise StepRejected(f"mass would become non-positive at t={t + dt:g}")
    new = refresh_preimages(data, _with(s4, t + dt, Y))
    _check_fold(new)
    return new


def _check_fold(state: FrontState):
    dx = np.diff(state.x)
    dy = np.diff(state.y)
    gap = np.hypot(dx, dy)
    if np.any(gap <= FOLD_TOL):
        i = int(np.argmin(gap))
        raise FrontFold(f"markers {i} and {i + 1} collided at t={state.t:g}")


def track(data: InitialData, n_markers, dt, t_end, store_every=1, check=True,
          callback=None) -> FrontHistory:
    """Integrate from ``t = 0`` to ``t_end`` with fixed ``dt``.

    Every ``store_every``-th state (and the last one) is kept in the history.
    """
    state = initialize(data, n_markers, check=check)
    history = FrontHistory([state])
    n_steps = int(round(t_end / dt))
    if not np.isclose(n_steps * dt, t_end, rtol=1e-12, atol=1e-14):
        raise ValueError("t_end must be a multiple of dt")
    for k in range(1, n_steps + 1):
        state = step(data, state, dt)
        state = replace(state, t=k * dt)
        if k % store_every == 0 or k == n_steps:
            history.append(state)
        if callback is not None:
            callback(state)
    return history


# {{{ diagnostics over a stored history

def _time_derivative(values, times):
    if len(times) < 3:
        raise InsufficientHistory("at least three stored states are needed")
    return np.gradient(values, times, axis=0, edge_order=2)


def preimage_fluxes(data: InitialData, history: FrontHistory):
    """Per side, ``rho0 * (a_tau b_l - b_tau a_l)`` over the stored history.

    Derivatives come from the stored pre-images only: finite differences in
    time over the history and in ``l`` along the markers.
    """
    times = history.times
    first = history.states[0]
    out = {}
    for side, (an, bn) in {"minus": ("a_minus", "b_minus"),
                           "plus": ("a_plus", "b_plus")}.items():
        A = history.stack(an)
        B = history.stack(bn)
        A_t = _time_derivative(A, times)
        B_t = _time_derivative(B, times)
        A_l = np.stack([l_derivative(row, first.dl, first.topology, first.shift[0]) for row in A])
        B_l = np.stack([l_derivative(row, first.dl, first.topology, first.shift[1]) for row in B])
        rho0 = np.broadcast_to(np.asarray(data.side(side).rho(A, B), dtype=float), A.shape)
        u0 = np.broadcast_to(np.asarray(data.side(side).u(A, B), dtype=float), A.shape)
        v0 = np.broadcast_to(np.asarray(data.side(side).v(A, B), dtype=float), A.shape)
        out[side] = dict(a=A, b=B, flux=rho0 * (A_t * B_l - B_t * A_l), u0=u0, v0=v0)
    return out


def accumulated_measures(data: InitialData, history: FrontHistory):
    """``(P, I, J)`` at the last stored time by direct quadrature of the fluxes."""
    fl = preimage_fluxes(data, history)
    times = history.times
    m = fl["plus"]["flux"] - fl["minus"]["flux"]
    q = fl["plus"]["flux"] * fl["plus"]["u0"] - fl["minus"]["flux"] * fl["minus"]["u0"]
    r = fl["plus"]["flux"] * fl["plus"]["v0"] - fl["minus"]["flux"] * fl["minus"]["v0"]
    first = history.states[0]
    return (first.P + np.trapezoid(m, times, axis=0),
            first.I + np.trapezoid(q, times, axis=0),
            first.J + np.trapezoid(r, times, axis=0))


def adhesion_residual(data: InitialData, history: FrontHistory):
    """Defect of the concentration identity at the last stored time.

    For each marker, all matter absorbed up to ``t`` must, had it kept
    streaming freely, have arrived at the marker's current position with the
    same first moments from both sides; initial line mass enters through
    ``P0 (x(t) - x0) - t I0``.  Returns ``(res_x, res_y)`` arrays.
    """
    fl = preimage_fluxes(data, history)
    times = history.times
    t = times[-1]
    last, first = history.last, history.states[0]
    res = []
    for pos, lag, vel, mom0, pos0 in (("x", "a", "u0", first.I, first.x),
                                     ("y", "b", "v0", first.J, first.y)):
        X = getattr(last, pos)
        terms = []
        for side in ("plus", "minus"):
            s = fl[side]
            integrand = (X[None, :] - s[lag] - t * s[vel]) * s["flux"]
            terms.append(np.trapezoid(integrand, times, axis=0))
        res.append(terms[0] - terms[1] - t * mom0 + first.P * (X - pos0))
    return res[0], res[1]

# }}}
