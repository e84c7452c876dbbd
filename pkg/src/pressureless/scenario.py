"""Piecewise initial data across a single discontinuity curve.

The data are two smooth states, ``minus`` and ``plus``, glued along a curve
``(A(l), B(l))`` that is also the zero set of a level-set function ``G(a, b)``
(``G < 0`` on the minus side).  Each side's fields are defined everywhere by
their expressions, so a side can be evaluated past the curve.

With the curve tangent ``(A_l, B_l)``, the minus side lies to the left and
the plus side to the right.  Compressive data (both streams flowing into the
curve) therefore satisfy::

    A_l v_minus - B_l u_minus < 0 < A_l v_plus - B_l u_plus
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InadmissibleScenario, NoConvergence
from .fieldexpr import FieldExpr, as_field, differentiate

SIDES = ("minus", "plus")


# {{{ curves

class Curve:
    """Parametric curve ``l -> (A(l), B(l))`` given by two expressions in ``l``.

    ``topology='periodic'`` means ``(A, B)(l + L) = (A, B)(l) + shift`` with
    ``L = l_max - l_min``; ``shift = (0, 0)`` is a closed curve, a nonzero
    shift is an infinite periodic front.
    """

    def __init__(self, A, B, l_min=0.0, l_max=1.0, topology="open", shift=(0.0, 0.0)):
        if topology not in ("open", "periodic"):
            raise ValueError(f"unknown topology {topology!r}")
        if not l_max > l_min:
            raise ValueError("l_max must exceed l_min")
        self.A = as_field(A, ("l",))
        self.B = as_field(B, ("l",))
        self.A_l = differentiate(self.A, "l")
        self.B_l = differentiate(self.B, "l")
        self.l_min = float(l_min)
        self.l_max = float(l_max)
        self.topology = topology
        self.shift = (float(shift[0]), float(shift[1]))

    @property
    def period(self):
        return self.l_max - self.l_min

    def point(self, l):
        return self.A(l), self.B(l)

    def tangent(self, l):
        return self.A_l(l), self.B_l(l)

    def grid(self, n):
        """``n`` uniformly spaced parameters (endpoint excluded when periodic)."""
        if self.topology == "periodic":
            return self.l_min + self.period * np.arange(n) / n
        return np.linspace(self.l_min, self.l_max, n)


class GraphCurve(Curve):
    """The curve ``{G(l, b) = 0}`` written as a graph ``b = B(l)``.

    ``B`` is found per ``l`` by Newton in ``b`` started from ``b_guess``;
    this requires ``G_b != 0`` near the curve (monotone curve).
    """

    def __init__(self, level: FieldExpr, l_min=0.0, l_max=1.0, b_guess=0.0,
                 topology="open", shift=(0.0, 0.0)):
        self.level = level
        self.level_a = differentiate(level, "a")
        self.level_b = differentiate(level, "b")
        self.b_guess = float(b_guess)
        self.l_min = float(l_min)
        self.l_max = float(l_max)
        self.topology = topology
        self.shift = (float(shift[0]), float(shift[1]))

    def _solve(self, l):
        l = np.asarray(l, dtype=float)
        b = np.full_like(l, self.b_guess)
        for _ in range(60):
            g = self.level(l, b)
            step = g / self.level_b(l, b)
            b = b - step
            if np.all(np.abs(step) < 1e-15 * (1.0 + np.abs(b))):
                return b
        if np.max(np.abs(self.level(l, b))) > 1e-13:
            raise NoConvergence("graph curve Newton solve did not converge")
        return b

    def point(self, l):
        scalar = np.ndim(l) == 0
        b = self._solve(np.atleast_1d(l))
        a = np.atleast_1d(np.asarray(l, dtype=float))
        return (float(a[0]), float(b[0])) if scalar else (a, b)

    def tangent(self, l):
        scalar = np.ndim(l) == 0
        a, b = self.point(np.atleast_1d(l))
        B_l = -self.level_a(a, b) / self.level_b(a, b)
        A_l = np.ones_like(B_l)
        return (float(A_l[0]), float(B_l[0])) if scalar else (A_l, B_l)

# }}}


class SideFields(NamedTuple):
    rho: FieldExpr
    u: FieldExpr
    v: FieldExpr
    rho_a: FieldExpr
    rho_b: FieldExpr
    u_a: FieldExpr
    u_b: FieldExpr
    v_a: FieldExpr
    v_b: FieldExpr

    @classmethod
    def build(cls, rho, u, v):
        rho, u, v = (as_field(x) for x in (rho, u, v))
        return cls(rho, u, v,
                   differentiate(rho, "a"), differentiate(rho, "b"),
                   differentiate(u, "a"), differentiate(u, "b"),
                   differentiate(v, "a"), differentiate(v, "b"))

    @property
    def constant_velocity(self):
        return self.u.is_constant and self.v.is_constant


@dataclass
class InitialData:
    """Two-sided initial state across one curve.

    ``P0``, ``I0`` and ``J0`` (expressions in ``l``) give the mass and
    momentum line densities already sitting on the curve at ``t = 0``; they
    are zero for data that start smooth on each side.
    """

    minus: SideFields
    plus: SideFields
    level_set: FieldExpr | None
    curve: Curve
    frame_shift: tuple = (0.0, 0.0)
    P0: FieldExpr = field(default_factory=lambda: as_field(0.0, ("l",)))
    I0: FieldExpr = field(default_factory=lambda: as_field(0.0, ("l",)))
    J0: FieldExpr = field(default_factory=lambda: as_field(0.0, ("l",)))
    name: str = "custom"
    potential: dict | None = None

    @classmethod
    def from_expressions(cls, rho_minus, u_minus, v_minus, rho_plus, u_plus, v_plus,
                         level_set, curve, **kwargs):
        for key in ("P0", "I0", "J0"):
            if key in kwargs:
                kwargs[key] = as_field(kwargs[key], ("l",))
        return cls(SideFields.build(rho_minus, u_minus, v_minus),
                   SideFields.build(rho_plus, u_plus, v_plus),
                   None if level_set is None else as_field(level_set), curve, **kwargs)

    def side(self, side) -> SideFields:
        if side == "minus":
            return self.minus
        if side == "plus":
            return self.plus
        raise ValueError(f"side must be 'minus' or 'plus', not {side!r}")

    def sign_value(self, a, b):
        """``G(a, b)``, or a signed distance to the sampled curve when no level set is given."""
        if self.level_set is not None:
            return self.level_set(a, b)
        from . import polyline
        l = self.curve.grid(2049)
        x, y = self.curve.point(l)
        side, _, dist = polyline.project(a, b, x, y, l, self.curve.topology, self.curve.shift)
        out = -side * dist
        return float(out) if np.ndim(a) == 0 and np.ndim(b) == 0 else out

    @property
    def has_initial_mass(self):
        return not (self.P0.is_constant and self.P0.root.value == 0.0)


def eval_side(data: InitialData, side, a, b):
    """One-sided ``(rho0, u0, v0)`` at ``(a, b)`` regardless of the sign of G."""
    s = data.side(side)
    return s.rho(a, b), s.u(a, b), s.v(a, b)


class ConditionViolation(NamedTuple):
    l: float
    s_minus: float
    s_plus: float


def condition_II_values(data: InitialData, l, frame_shift=None):
    """``(s_minus, s_plus)`` along the curve, velocities optionally Galilean-shifted."""
    su, sv = data.frame_shift if frame_shift is None else frame_shift
    a, b = data.curve.point(l)
    A_l, B_l = data.curve.tangent(l)
    out = []
    for side in SIDES:
        _, u, v = eval_side(data, side, a, b)
        out.append(A_l * (v + sv) - B_l * (u + su))
    return out[0], out[1]


def check_condition_II(data: InitialData, n_samples=512, frame_shift=None):
    """Every sampled ``l`` where the two streams do not both enter the curve.

    An empty list means the data are compressive along the whole curve.
    """
    l = data.curve.grid(n_samples)
    s_minus, s_plus = condition_II_values(data, l, frame_shift)
    s_minus = np.broadcast_to(s_minus, l.shape)
    s_plus = np.broadcast_to(s_plus, l.shape)
    bad = (s_minus >= 0) | (s_plus <= 0)
    return [ConditionViolation(float(l[i]), float(s_minus[i]), float(s_plus[i]))
            for i in np.flatnonzero(bad)]


def check_invariants(data: InitialData, n_samples=512, box=None, tol=1e-8):
    """List of human-readable problems with the data (empty when consistent)."""
    problems = []
    l = data.curve.grid(n_samples)
    a, b = data.curve.point(l)
    g = np.abs(np.broadcast_to(data.sign_value(a, b), l.shape))
    if data.level_set is not None and np.max(g) > tol:
        problems.append(f"curve leaves the level set: max |G(A,B)| = {np.max(g):.3e}")
    A_l, B_l = data.curve.tangent(l)
    speed = np.broadcast_to(np.asarray(A_l) ** 2 + np.asarray(B_l) ** 2, l.shape)
    if np.min(speed) == 0:
        problems.append("curve parametrization is singular (A_l^2 + B_l^2 = 0)")
    if box is None:
        box = (float(np.min(a)) - 1, float(np.max(a)) + 1,
               float(np.min(b)) - 1, float(np.max(b)) + 1)
    ga, gb = np.meshgrid(np.linspace(box[0], box[1], 33), np.linspace(box[2], box[3], 33))
    for side in SIDES:
        rho = data.side(side).rho(ga, gb)
        if np.min(rho) <= 0:
            problems.append(f"{side}-side density is not positive")
    return problems


def assert_admissible(data: InitialData, n_samples=512):
    violations = check_condition_II(data, n_samples)
    if violations:
        v = violations[0]
        raise InadmissibleScenario(
            f"condition II fails at {len(violations)} of {n_samples} samples "
            f"(first at l={v.l:.6g}: s-={v.s_minus:.3g}, s+={v.s_plus:.3g}); "
            f"set frame_shift if one side is at rest")
    problems = check_invariants(data, n_samples)
    if problems:
        raise InadmissibleScenario("; ".join(problems))


def curl(data: InitialData, side, a, b):
    """``u_b - v_a`` of one side; zero for potential velocity fields."""
    s = data.side(side)
    return s.u_b(a, b) - s.v_a(a, b)


# {{{ scenario families

def riemann(rho=1.0, w=1.0, l_min=-0.5, l_max=0.5, topology="periodic"):
    """Symmetric head-on collision along the line ``b = 0``.

    The minus side (``b > 0``) moves down with speed ``w``, the plus side
    moves up; both have density ``rho``.  The velocity is the gradient of
    ``-w*b`` above and ``w*b`` below.
    """
    curve = Curve("l", "0", l_min, l_max, topology=topology,
                  shift=(l_max - l_min, 0.0))
    return InitialData.from_expressions(
        rho, 0.0, -w, rho, 0.0, w, level_set="-b", curve=curve, name="riemann",
        potential={"minus": as_field(f"-{w!r}*b"), "plus": as_field(f"{w!r}*b")})


def constant_state(rho, rho_tilde, u, v, x0="l", y0="0", k_hat0=0.5, P0=1.0,
                   l_min=-0.5, l_max=0.5, topology="periodic", shift=None,
                   I0=None, J0=None, frame_shift=None):
    """Constant minus state ``(rho, u, v)`` hitting a plus state at rest.

    The front starts at ``(x0(l), y0(l))`` carrying mass ``P0`` and momentum
    ``k_hat0 * P0 * (u, v)`` unless ``I0``/``J0`` are given.  The level set is
    exact for a straight front; curved fronts fall back to the sampled
    curve (see :meth:`InitialData.sign_value`).
    """
    x0 = as_field(x0, ("l",))
    y0 = as_field(y0, ("l",))
    curve = Curve(x0, y0, l_min, l_max, topology=topology,
                  shift=shift if shift is not None else (l_max - l_min, 0.0))
    P0e = as_field(P0, ("l",))
    k = as_field(k_hat0, ("l",))
    if I0 is None:
        I0 = _scaled(k, P0e, u)
    if J0 is None:
        J0 = _scaled(k, P0e, v)
    level = None
    if curve.A_l.is_constant and curve.B_l.is_constant:
        # straight front: G is minus the signed distance-like cross product
        ax, ay = curve.point(l_min)
        tx, ty = curve.A_l.root.value, curve.B_l.root.value
        level = as_field(f"({ty!r})*(a - ({ax!r})) - ({tx!r})*(b - ({ay!r}))")
    if frame_shift is None:
        frame_shift = (-0.5 * u, -0.5 * v)
    return InitialData.from_expressions(
        rho, u, v, rho_tilde, 0.0, 0.0, level_set=level, curve=curve,
        P0=P0e, I0=as_field(I0, ("l",)), J0=as_field(J0, ("l",)),
        frame_shift=frame_shift, name="constant_state")


def _scaled(k, P0, c):
    from .fieldexpr import BinOp, Const
    return FieldExpr(BinOp("*", BinOp("*", k.root, P0.root), Const(float(c))), ("l",))


def potential_perturbation(f, eps, l_min=-0.5, l_max=0.5):
    """Potential data ``S0 = min(0, b + eps*f(a, b))``.

    Above the curve ``b + eps*f = 0`` matter is at rest (minus side); below,
    the velocity is ``grad(b + eps*f) = (eps*f_a, 1 + eps*f_b)`` (plus side).
    Both densities are one.
    """
    f = as_field(f)
    eps = float(eps)
    level_src = f"b + {eps!r}*({f})"
    S_plus = as_field(level_src)
    u_plus = differentiate(S_plus, "a")
    v_plus = differentiate(S_plus, "b")
    level = as_field(f"-({level_src})")
    curve = GraphCurve(S_plus, l_min, l_max)
    data = InitialData.from_expressions(
        1.0, 0.0, 0.0, 1.0, u_plus, v_plus, level_set=level, curve=curve,
        frame_shift=(0.0, -0.5), name="potential_perturbation",
        potential={"minus": as_field(0.0), "plus": S_plus, "f": f, "eps": eps})
    return data

# }}}
