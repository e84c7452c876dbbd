"""Hopf-Lax solution for potential data and its comparison with tracked shocks.

For velocity ``grad S0`` the variational solution is ``grad Psi`` with::

    Psi(t, x, y) = min_{a,b} S0(a, b) + ((x - a)^2 + (y - b)^2) / (2 t)

and its singular set is where the minimum is attained at more than one
point.  The functions here find that set numerically, evaluate the
first-order perturbation theory of the tracked front for potentials of the
form ``min(0, b + eps*f(a, b))``, and measure how far a tracked front is
from satisfying the variational surface condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .errors import BoxTooSmall, InsufficientHistory, NoJumpDetected, QuadratureFailure
from .fieldexpr import FieldExpr, as_field, differentiate
from .front import FrontHistory, l_derivative

DELTA_VAL = 1e-9
CLUSTER_RADIUS = 1e-7


# {{{ potentials

@dataclass(frozen=True)
class Potential:
    """Velocity potential, either one expression or two glued along ``G = 0``."""

    minus: FieldExpr
    plus: FieldExpr | None = None
    level_set: FieldExpr | None = None

    @classmethod
    def smooth(cls, S0):
        return cls(as_field(S0))

    @classmethod
    def perturbed_step(cls, f, eps):
        """``S0 = 0`` above the curve ``b + eps*f = 0`` and ``b + eps*f`` below."""
        below = as_field(f"b + {float(eps)!r}*({as_field(f)})")
        return cls(as_field(0.0), below, as_field(f"-({below})"))

    @classmethod
    def from_data(cls, data):
        if not data.potential:
            raise ValueError("scenario carries no velocity potential")
        return cls(data.potential["minus"], data.potential["plus"], data.level_set)

    def side_of(self, a, b):
        """-1 on the minus side, +1 on the plus side (0 on the curve)."""
        if self.level_set is None:
            return np.zeros(np.broadcast_shapes(np.shape(a), np.shape(b)))
        return np.sign(self.level_set(a, b))

    def __call__(self, a, b):
        if self.plus is None:
            return self.minus(a, b)
        g = self.level_set(a, b)
        return np.where(g > 0, self.plus(a, b), self.minus(a, b))

    def side_value(self, side, a, b):
        expr = self.minus if side == "minus" or self.plus is None else self.plus
        return expr(a, b)

# }}}


class MinimizerSet(NamedTuple):
    value: float
    minimizers: list  # of (a, b), best first
    values: list


def _cost(potential, t, x, y):
    def F(p):
        a, b = p
        return float(potential(a, b)) + ((x - a) ** 2 + (y - b) ** 2) / (2.0 * t)
    return F


def hopf_lax(potential: Potential, t, x, y, search_box, grid_n=257, delta_val=DELTA_VAL,
             delta_cluster=None, cluster_radius=CLUSTER_RADIUS) -> MinimizerSet:
    """All global minimizers of the Hopf-Lax functional at ``(t, x, y)``.

    A ``grid_n x grid_n`` scan of ``search_box = (a0, a1, b0, b1)`` picks the
    grid-local minima within ``delta_cluster`` of the grid minimum; each is
    polished by Nelder-Mead, duplicates closer than ``cluster_radius`` are
    merged, and every minimizer within ``delta_val`` of the best is returned.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    a0, a1, b0, b1 = search_box
    ga = np.linspace(a0, a1, grid_n)
    gb = np.linspace(b0, b1, grid_n)
    A, B = np.meshgrid(ga, gb, indexing="ij")
    Fg = np.asarray(potential(A, B), dtype=float) + ((x - A) ** 2 + (y - B) ** 2) / (2.0 * t)
    h = max(ga[1] - ga[0], gb[1] - gb[0])
    if delta_cluster is None:
        delta_cluster = 4.0 * h * h / t + 1e-12

    padded = np.pad(Fg, 1, constant_values=np.inf)
    is_local = np.ones_like(Fg, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_local &= Fg <= padded[1 + di:1 + di + grid_n, 1 + dj:1 + dj + grid_n]
    cand = np.argwhere(is_local & (Fg <= Fg.min() + delta_cluster))

    F = _cost(potential, t, x, y)
    found = []
    for i, j in cand:
        p0 = np.array([ga[i], gb[j]])
        simplex = np.array([p0, p0 + [0.5 * h, 0.0], p0 + [0.0, 0.5 * h]])
        res = minimize(F, p0, method="Nelder-Mead",
                       options=dict(xatol=1e-12, fatol=1e-15, maxiter=4000,
                                    initial_simplex=simplex))
        found.append((float(res.fun), float(res.x[0]), float(res.x[1])))
    found.sort()
    unique = []
    for val, a, b in found:
        if all(np.hypot(a - ua, b - ub) > cluster_radius for _, ua, ub in unique):
            unique.append((val, a, b))
    best = unique[0][0]
    keep = [(val, a, b) for val, a, b in unique if val <= best + delta_val]
    _, abest, bbest = unique[0]
    if (abest - a0 < h or a1 - abest < h or bbest - b0 < h or b1 - bbest < h):
        raise BoxTooSmall(f"best minimizer ({abest:.4g}, {bbest:.4g}) sits on the search box")
    return MinimizerSet(best, [(a, b) for _, a, b in keep], [val for val, _, _ in keep])


def _sided_minima(potential, t, x, y, search_box, grid_n):
    """Global value on each side of the potential's curve (``inf`` if absent)."""
    ms = hopf_lax(potential, t, x, y, search_box, grid_n, delta_val=np.inf)
    out = {-1.0: np.inf, 1.0: np.inf, 0.0: np.inf}
    for (a, b), val in zip(ms.minimizers, ms.values):
        s = float(potential.side_of(a, b))
        out[s] = min(out[s], val)
    return out


def _label(potential, t, x, y, search_box, grid_n):
    ms = hopf_lax(potential, t, x, y, search_box, grid_n)
    a, b = ms.minimizers[0]
    return float(potential.side_of(a, b))


def singular_surface(potential: Potential, t, xs, y_bracket, search_box, grid_n=257,
                     tol=1e-10):
    """Points ``(x, y)`` of the singular set along vertical scans ``x = const``.

    For each ``x`` the label of the global minimizer (which side of the
    potential's curve it lies on) must differ at the two ends of
    ``y_bracket``; the switch is located by bisection to ``tol``.
    """
    y_lo0, y_hi0 = y_bracket
    pts = []
    for x in np.atleast_1d(xs):
        lab_lo = _label(potential, t, x, y_lo0, search_box, grid_n)
        lab_hi = _label(potential, t, x, y_hi0, search_box, grid_n)
        if lab_lo == lab_hi:
            raise NoJumpDetected(f"no change of minimizer along x={x:g} in {y_bracket}")
        lo, hi = y_lo0, y_hi0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _label(potential, t, x, mid, search_box, grid_n) == lab_lo:
                lo = mid
            else:
                hi = mid
        pts.append((float(x), 0.5 * (lo + hi)))
    return np.array(pts)


def velocity(potential: Potential, t, x, y, search_box, grid_n=257, h=1e-5):
    """``grad Psi`` by central differences of the Hopf-Lax value."""
    def psi(px, py):
        return hopf_lax(potential, t, px, py, search_box, grid_n).value
    return ((psi(x + h, y) - psi(x - h, y)) / (2 * h),
            (psi(x, y + h) - psi(x, y - h)) / (2 * h))


# {{{ first-order theory for S0 = min(0, b + eps f)

def adaptive_simpson(fn, lo, hi, tol=1e-10, max_depth=50):
    """Adaptive Simpson quadrature of a scalar function on ``[lo, hi]``."""
    if hi == lo:
        return 0.0

    def simpson(a, fa, b, fb):
        m = 0.5 * (a + b)
        fm = fn(m)
        return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, b, fb, m, fm, whole, tol, depth):
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth <= 0:
            raise QuadratureFailure(f"adaptive Simpson hit max depth on [{a:g}, {b:g}]")
        return (recurse(a, fa, m, fm, lm, flm, left, tol / 2, depth - 1)
                + recurse(m, fm, b, fb, rm, frm, right, tol / 2, depth - 1))

    fa, fb = fn(lo), fn(hi)
    m, fm, whole = simpson(lo, fa, hi, fb)
    return recurse(lo, fa, hi, fb, m, fm, whole, tol, max_depth)


class _Derivs:
    def __init__(self, f):
        self.f = as_field(f)
        self.f_a = differentiate(self.f, "a")
        self.f_b = differentiate(self.f, "b")
        self.f_aa = differentiate(self.f_a, "a")


def rh_perturbation_surface(f, eps, t, l, tol=1e-10):
    """Tracked front position ``(x, y)`` at ``(t, l)`` to first order in ``eps``.

    ``x = l + eps*xt`` with ``d(xt)/dt = (1/2t) int_0^t f_a dtau`` and
    ``y = t/2 + eps*yt`` with
    ``yt = -f(l,0) - 1/4 int tau f_aa + 1/2 int f_b + 1/(4t) int tau^2 f_aa``;
    derivatives of ``f`` are taken at ``(l, -tau/2)``.
    """
    d = _Derivs(f)
    at = lambda e: (lambda tau: float(e(l, -0.5 * tau)))  # noqa: E731
    fa, fb, faa = at(d.f_a), at(d.f_b), at(d.f_aa)

    def xt_rate(s):
        if s == 0.0:
            return 0.5 * fa(0.0)
        return adaptive_simpson(fa, 0.0, s, tol) / (2.0 * s)

    xt = adaptive_simpson(xt_rate, 0.0, t, tol)
    if t == 0.0:
        yt = -float(d.f(l, 0.0))
    else:
        yt = (-float(d.f(l, 0.0))
              - 0.25 * adaptive_simpson(lambda s: s * faa(s), 0.0, t, tol)
              + 0.5 * adaptive_simpson(fb, 0.0, t, tol)
              + adaptive_simpson(lambda s: s * s * faa(s), 0.0, t, tol) / (4.0 * t))
    return l + eps * xt, 0.5 * t + eps * yt


def variational_perturbation_surface(f, eps, t, x):
    """First-order singular set ``y = t/2 - eps*f(x, -t/2)`` of ``min(0, b + eps f)``."""
    return 0.5 * t - eps * float(as_field(f)(x, -0.5 * t))


def theorem31_gap(f, eps, t, l, tol=1e-10):
    """First-order ``y_front - y_variational`` at ``(t, l)``; ``eps`` times

    ``f(l,-t/2) - f(l,0) - 1/4 int (tau - tau^2/t) f_aa + 1/2 int f_b``.
    Zero for every ``t`` only if ``f_aa(l, 0) = 0``.
    """
    d = _Derivs(f)
    faa = lambda s: float(d.f_aa(l, -0.5 * s))  # noqa: E731
    fb = lambda s: float(d.f_b(l, -0.5 * s))  # noqa: E731
    if t == 0.0:
        return 0.0
    g = (float(d.f(l, -0.5 * t)) - float(d.f(l, 0.0))
         - 0.25 * adaptive_simpson(lambda s: (s - s * s / t) * faa(s), 0.0, t, tol)
         + 0.5 * adaptive_simpson(fb, 0.0, t, tol))
    return eps * g

# }}}


# {{{ surface condition along a tracked front

def _cumtrapz(values, times):
    out = np.zeros_like(values)
    dt = np.diff(times)[:, None]
    out[1:] = np.cumsum(0.5 * dt * (values[1:] + values[:-1]), axis=0)
    return out


def theorem32_relation(history: FrontHistory, potential: Potential):
    """Defect of the variational surface condition along a tracked front.

    With ``S+-`` the potential at the two pre-images, and ``p*``, ``i*``,
    ``j*`` the bilinear forms of the pre-image jumps and their time rates,
    returns the ``(n_times, n_markers)`` array::

        (a+ - a-) d/dl int i* - (b+ - b-) d/dl int j* - (S+ - S-) d/dl int p*

    which vanishes identically iff the tracked front is also the singular
    set of the Hopf-Lax solution (unit initial density, no initial mass).
    """
    if len(history) < 3:
        raise InsufficientHistory("at least three stored states are needed")
    times = history.times
    first = history.states[0]
    am, bm = history.stack("a_minus"), history.stack("b_minus")
    ap, bp = history.stack("a_plus"), history.stack("b_plus")
    Sm = np.broadcast_to(np.asarray(potential.side_value("minus", am, bm), dtype=float), am.shape)
    Sp = np.broadcast_to(np.asarray(potential.side_value("plus", ap, bp), dtype=float), ap.shape)

    def rate(v):
        return np.gradient(v, times, axis=0, edge_order=2)

    da, db, dS = ap - am, bp - bm, Sp - Sm
    a_rate = 0.5 * (rate(ap) + rate(am))
    b_rate = 0.5 * (rate(bp) + rate(bm))
    S_rate = 0.5 * (rate(Sp) + rate(Sm))
    p_star = db * a_rate - da * b_rate
    i_star = db * S_rate - dS * b_rate
    j_star = da * S_rate - dS * a_rate

    def dl_of_integral(v):
        integ = _cumtrapz(v, times)
        # jumps are periodic even when positions carry a shift
        return np.stack([l_derivative(row, first.dl, first.topology) for row in integ])

    return da * dl_of_integral(i_star) - db * dl_of_integral(j_star) - dS * dl_of_integral(p_star)


def surface_condition_defect(history: FrontHistory, potential: Potential):
    """Pointwise form ``(a+ - a-) I + (b+ - b-) J - (S+ - S-) P`` at each stored state."""
    am, bm = history.stack("a_minus"), history.stack("b_minus")
    ap, bp = history.stack("a_plus"), history.stack("b_plus")
    Sm = potential.side_value("minus", am, bm)
    Sp = potential.side_value("plus", ap, bp)
    return ((ap - am) * history.stack("I") + (bp - bm) * history.stack("J")
            - (Sp - Sm) * history.stack("P"))

# }}}
