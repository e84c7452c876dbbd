"""Free streaming in the smooth regions.

Away from the front every particle keeps its initial velocity, so a side's
flow map is ``(a, b) -> (a + t*u0(a, b), b + t*v0(a, b))`` and the density
is the initial density divided by the Jacobian of that map.  All functions
accept scalars or numpy arrays.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import polyline
from .errors import (
    CausticError,
    FrontIntersectionAmbiguous,
    NoConvergence,
    SingularJacobian,
)
from .scenario import InitialData

CAUSTIC_TOL = 1e-12
NEWTON_TOL = 1e-10
NEWTON_MAXITER = 50


class CharQuery(NamedTuple):
    side: str
    t: float
    x: float
    y: float


def flow_map(data: InitialData, side, a, b, t):
    s = data.side(side)
    return a + t * s.u(a, b), b + t * s.v(a, b)


def _jacobian_entries(s, a, b, t):
    j11 = 1.0 + t * s.u_a(a, b)
    j12 = t * s.u_b(a, b)
    j21 = t * s.v_a(a, b)
    j22 = 1.0 + t * s.v_b(a, b)
    return j11, j12, j21, j22


def jacobian_D(data: InitialData, side, a, b, t):
    """Determinant of the flow map, ``(1+t u_a)(1+t v_b) - t^2 u_b v_a``."""
    j11, j12, j21, j22 = _jacobian_entries(data.side(side), a, b, t)
    return j11 * j22 - j12 * j21


def transported_density(data: InitialData, side, a, b, t):
    D = jacobian_D(data, side, a, b, t)
    if np.any(np.asarray(D) <= CAUSTIC_TOL):
        raise CausticError(f"flow map degenerates on the {side} side at t={t:g} "
                           f"(min D = {np.min(D):.3e})")
    return data.side(side).rho(a, b) / D


def preimage(data: InitialData, side, x, y, t, seed=None, tol=NEWTON_TOL,
             maxiter=NEWTON_MAXITER):
    """Initial point ``(a, b)`` whose ``side`` characteristic reaches ``(x, y)`` at ``t``.

    Newton on the 2x2 flow-map equations, started from ``seed`` (default:
    the target itself).  Converged when the position residual is below
    ``tol``; iteration continues a little past that to reach round-off.
    """
    s = data.side(side)
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast_shapes(x.shape, y.shape)
    x = np.broadcast_to(x, shape)
    y = np.broadcast_to(y, shape)
    if s.constant_velocity:
        a, b = x - t * s.u.root.value, y - t * s.v.root.value
        return (float(a), float(b)) if scalar else (a, b)
    if seed is None:
        a, b = x.astype(float).copy(), y.astype(float).copy()
    else:
        a = np.broadcast_to(np.asarray(seed[0], dtype=float), shape).copy()
        b = np.broadcast_to(np.asarray(seed[1], dtype=float), shape).copy()

    res = np.inf
    for it in range(maxiter):
        fx = a + t * s.u(a, b) - x
        fy = b + t * s.v(a, b) - y
        res = np.max(np.hypot(fx, fy)) if fx.size else 0.0
        if res < 1e-3 * tol:
            break
        j11, j12, j21, j22 = _jacobian_entries(s, a, b, t)
        det = j11 * j22 - j12 * j21
        if np.any(np.abs(det) < CAUSTIC_TOL):
            raise SingularJacobian(f"flow-map Jacobian vanishes on the {side} side")
        da = (j22 * fx - j12 * fy) / det
        db = (-j21 * fx + j11 * fy) / det
        a = a - da
        b = b - db
        if res < tol and np.max(np.hypot(da, db)) <= 1e-15 * (1.0 + np.max(np.abs(a))):
            break
    else:
        fx = a + t * s.u(a, b) - x
        fy = b + t * s.v(a, b) - y
        res = np.max(np.hypot(fx, fy)) if fx.size else 0.0
    if res >= tol:
        raise NoConvergence(f"preimage Newton on the {side} side stalled at residual {res:.3e}")
    return (float(a), float(b)) if scalar else (a, b)


def side_state(data: InitialData, side, a, b, t):
    """Eulerian ``(rho, u, v)`` carried by the characteristic from ``(a, b)``."""
    s = data.side(side)
    return transported_density(data, side, a, b, t), s.u(a, b), s.v(a, b)


# {{{ Lagrangian-to-Eulerian map with absorption

def _front_at(history, tau):
    """Marker positions at time ``tau``, linear in time between snapshots."""
    times = history.times
    k = int(np.searchsorted(times, tau, side="right")) - 1
    k = min(max(k, 0), len(times) - 2)
    s0, s1 = history.states[k], history.states[k + 1]
    w = 0.0 if times[k + 1] == times[k] else (tau - times[k]) / (times[k + 1] - times[k])
    return (1 - w) * s0.x + w * s1.x, (1 - w) * s0.y + w * s1.y, s0


def _own_side_sign(data, history, side_sign, a, b, u, v, tau):
    x, y, ref = _front_at(history, tau)
    s, l_near, _ = polyline.project(a + tau * u, b + tau * v, x, y, ref.l,
                                    ref.topology, ref.shift)
    return float(s[0]) * side_sign, float(l_near[0])


def eulerian_map_Lt(data: InitialData, history, a, b, t, tol=1e-12):
    """Where the material that started at ``(a, b)`` sits at time ``t``.

    Free streaming until its characteristic first meets the tracked front at
    ``tau0``; from then on it travels with the front marker it hit.  Returns
    ``(x, y, tau0)`` with ``tau0 = inf`` when not absorbed by ``t``.
    """
    g = float(data.sign_value(a, b))
    l0_state = history.states[0]
    if g == 0.0 or abs(g) < tol:
        _, l_hit, _ = polyline.project(a, b, l0_state.x, l0_state.y, l0_state.l,
                                       l0_state.topology, l0_state.shift)
        x, y = _front_position(history, float(l_hit[0]), t)
        return x, y, 0.0
    side = "minus" if g < 0 else "plus"
    side_sign = 1.0 if side == "minus" else -1.0
    s = data.side(side)
    u, v = float(s.u(a, b)), float(s.v(a, b))

    times = [tk for tk in history.times if tk <= t + 1e-15]
    if times[-1] < t:
        times.append(t)
    prev_tau, prev_sign = times[0], _own_side_sign(data, history, side_sign, a, b, u, v, times[0])[0]
    if prev_sign <= 0:
        tau0 = times[0]
    else:
        tau0 = None
        for tau in times[1:]:
            sign, _ = _own_side_sign(data, history, side_sign, a, b, u, v, tau)
            if sign <= 0:
                lo, hi = prev_tau, tau
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if _own_side_sign(data, history, side_sign, a, b, u, v, mid)[0] > 0:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-14 * max(1.0, hi):
                        break
                tau0 = hi
                break
            prev_tau = tau
    if tau0 is None:
        x, y = a + t * u, b + t * v
        return x, y, np.inf

    _, l_hit = _own_side_sign(data, history, side_sign, a, b, u, v, tau0)
    _check_transversal(history, l_hit, tau0, u, v)
    x, y = _front_position(history, l_hit, t)
    return x, y, tau0


def _front_position(history, l_query, t):
    x, y, ref = _front_at(history, t)
    px, py = polyline.interpolate(l_query, x, y, ref.l, ref.topology, ref.shift)
    return float(px), float(py)


def _check_transversal(history, l_hit, tau, u, v, tol=1e-9):
    h = 1e-7 * max(1.0, history.times[-1])
    t_lo = max(history.times[0], tau - h)
    t_hi = min(history.times[-1], tau + h)
    if t_hi <= t_lo:
        return
    x0, y0 = _front_position(history, l_hit, t_lo)
    x1, y1 = _front_position(history, l_hit, t_hi)
    fu, fv = (x1 - x0) / (t_hi - t_lo), (y1 - y0) / (t_hi - t_lo)
    x, y, ref = _front_at(history, tau)
    dl = 1e-6 * (ref.l[-1] - ref.l[0])
    xa, ya = polyline.interpolate(l_hit - dl, x, y, ref.l, ref.topology, ref.shift)
    xb, yb = polyline.interpolate(l_hit + dl, x, y, ref.l, ref.topology, ref.shift)
    tx, ty = xb - xa, yb - ya
    norm = np.hypot(tx, ty)
    if norm == 0:
        return
    normal_speed = ((u - fu) * (-ty) + (v - fv) * tx) / norm
    if abs(normal_speed) < tol:
        raise FrontIntersectionAmbiguous("characteristic grazes the front tangentially")

# }}}
