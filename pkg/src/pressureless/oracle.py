"""Independent checks of a tracked front.

:func:`sticky_run` lets a lattice of particles stream freely and stick to
the tracked front when they reach it, accumulating their mass and momentum
in bins of the front parameter; those bins are compared against the tracked
line densities.  :func:`weak_residual` evaluates the weak (measure) form of
mass and momentum conservation for the solution made of the transported
smooth density plus the front's line measure.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import polyline
from .characteristics import preimage, transported_density
from .errors import SupportViolation
from .fieldexpr import as_field, differentiate
from .front import FrontHistory, velocities
from .scenario import InitialData

XY = ("x", "y")


# {{{ sticky particles

class Particle(NamedTuple):
    x: float
    y: float
    u: float
    v: float
    m: float
    a: float
    b: float
    bin: int  # -1 while free


class StickyResult(NamedTuple):
    t: float
    l: np.ndarray
    bin_mass: np.ndarray
    bin_mom_x: np.ndarray
    bin_mom_y: np.ndarray
    particles: dict  # arrays x, y, u, v, m, a, b, bin
    total_mass: float
    total_mom: tuple
    n_late: int

    def free(self):
        keep = self.particles["bin"] < 0
        return {k: v[keep] for k, v in self.particles.items()}

    def particle(self, i):
        p = self.particles
        return Particle(*(p[k][i] for k in ("x", "y", "u", "v", "m", "a", "b")), int(p["bin"][i]))


def _default_box(data: InitialData, history, t_max, h):
    """Lattice box holding every particle that can reach the front by ``t_max``."""
    curve = data.curve
    ls = curve.grid(513)
    A, B = curve.point(ls)
    A = np.broadcast_to(np.asarray(A, dtype=float), ls.shape)
    B = np.broadcast_to(np.asarray(B, dtype=float), ls.shape)
    speed = 0.0
    for side in ("minus", "plus"):
        s = data.side(side)
        speed = max(speed, float(np.max(np.hypot(s.u(A, B), s.v(A, B)))))
    first = history.states[0]
    drift = max(float(np.max(np.hypot(s.x - first.x, s.y - first.y)))
                for s in history.states if s.t <= t_max + 1e-12)
    pad = speed * t_max + drift + 2 * h
    if curve.topology == "periodic":
        sx, sy = curve.shift
        if sy != 0.0 or sx <= 0.0:
            raise ValueError("default box needs a front periodic along +x; pass box")
        return (float(A[0]), float(A[0]) + sx, float(B.min()) - pad, float(B.max()) + pad)
    return (float(A.min()) - pad, float(A.max()) + pad, float(B.min()) - pad, float(B.max()) + pad)


def _front_at(history, t):
    times = history.times
    k = int(np.searchsorted(times, t, side="right")) - 1
    k = min(max(k, 0), len(times) - 2)
    s0, s1 = history.states[k], history.states[k + 1]
    w = 0.0 if times[k + 1] == times[k] else (t - times[k]) / (times[k + 1] - times[k])
    return (1 - w) * s0.x + w * s1.x, (1 - w) * s0.y + w * s1.y, s0


def sticky_run(data: InitialData, history: FrontHistory, h, t_max, dt=None, box=None):
    """Deposit a lattice of particles onto the tracked front.

    One particle per ``h x h`` cell of ``box`` (centres at half-integer
    offsets), with mass ``rho0 h^2`` and its side's initial velocity.  A
    particle sticks at the first time it is no longer strictly on its own
    side of the front, and is credited to the bin (width = marker spacing)
    of the nearest front point.  Initial line mass starts in the bins.
    """
    if box is None:
        box = _default_box(data, history, t_max, h)
    a0, a1, b0, b1 = box
    na = max(1, int(round((a1 - a0) / h)))
    nb = max(1, int(round((b1 - b0) / h)))
    A, B = np.meshgrid(a0 + (np.arange(na) + 0.5) * h, b0 + (np.arange(nb) + 0.5) * h,
                       indexing="ij")
    A, B = A.ravel(), B.ravel()
    g = np.asarray(data.sign_value(A, B), dtype=float)
    minus = g < 0
    m = np.empty_like(A)
    u = np.empty_like(A)
    v = np.empty_like(A)
    for side, mask in (("minus", minus), ("plus", ~minus)):
        s = data.side(side)
        m[mask] = np.broadcast_to(s.rho(A[mask], B[mask]), A[mask].shape) * h * h
        u[mask] = np.broadcast_to(s.u(A[mask], B[mask]), A[mask].shape)
        v[mask] = np.broadcast_to(s.v(A[mask], B[mask]), A[mask].shape)
    own = np.where(minus, 1.0, -1.0)

    first = history.states[0]
    n_bins = len(first.l)
    dl = first.dl
    bins = np.full(A.shape, -1)
    bin_m = first.P * dl
    bin_mx = first.I * dl
    bin_my = first.J * dl
    total_mass = float(m.sum() + bin_m.sum())
    total_mom = (float((m * u).sum() + bin_mx.sum()), float((m * v).sum() + bin_my.sum()))

    times = history.times
    if dt is None:
        grid = times[times <= t_max + 1e-15]
    else:
        grid = np.linspace(0.0, t_max, int(round(t_max / dt)) + 1)
    if grid[-1] < t_max - 1e-15:
        grid = np.append(grid, t_max)
    speed = float(np.max(np.hypot(u, v))) if len(u) else 0.0
    n_late = 0
    period = dl * n_bins
    # particles lying on the curve at t = 0 stick at once
    for t in grid:
        free = np.flatnonzero(bins < 0)
        if not len(free):
            break
        x, y, ref = _front_at(history, t)
        px, py = A[free] + t * u[free], B[free] + t * v[free]
        side, l_near, dist = polyline.project(px, py, x, y, ref.l, ref.topology, ref.shift)
        hit = side * own[free] <= 0
        if not np.any(hit):
            continue
        idx = free[hit]
        step = (grid[1] - grid[0]) if len(grid) > 1 else 0.0
        n_late += int(np.count_nonzero(dist[hit] > 2.0 * speed * step + 1e-12))
        lq = l_near[hit] - first.l[0]
        if ref.topology == "periodic":
            lq = np.mod(lq, period)
            k = np.mod(np.floor(lq / dl + 0.5).astype(int), n_bins)
        else:
            k = np.clip(np.floor(lq / dl + 0.5).astype(int), 0, n_bins - 1)
        bins[idx] = k
    absorbed = bins >= 0
    np.add.at(bin_m, bins[absorbed], m[absorbed])
    np.add.at(bin_mx, bins[absorbed], (m * u)[absorbed])
    np.add.at(bin_my, bins[absorbed], (m * v)[absorbed])
    t_end = float(grid[-1])
    parts = dict(x=A + t_end * u, y=B + t_end * v, u=u, v=v, m=m, a=A, b=B, bin=bins)
    return StickyResult(t_end, first.l.copy(), bin_m, bin_mx, bin_my, parts,
                        total_mass, total_mom, n_late)


def bin_comparison(result: StickyResult, state):
    """Relative gap ``(bin mass - P dl) / (P dl)`` per marker of ``state``."""
    ref = state.P * state.dl
    return (result.bin_mass - ref) / ref

# }}}


# {{{ weak form

class WeakResidual(NamedTuple):
    test_id: str
    mass: float
    mom_x: float
    mom_y: float
    box_mass: float


class _TestFn:
    def __init__(self, expr, box):
        self.e = as_field(expr, XY)
        self.ex = differentiate(self.e, "x")
        self.ey = differentiate(self.e, "y")
        self.box = box

    def _inside(self, x, y):
        a0, a1, b0, b1 = self.box
        return (x >= a0) & (x <= a1) & (y >= b0) & (y <= b1)

    def _eval(self, e, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        out = np.zeros(x.shape)
        inside = self._inside(x, y)
        if np.any(inside):
            out[inside] = e(x[inside], y[inside])
        return out

    def value(self, x, y):
        return self._eval(self.e, x, y)

    def grad(self, x, y):
        return self._eval(self.ex, x, y), self._eval(self.ey, x, y)


def check_support(fn: _TestFn, n=400, tol=1e-12):
    a0, a1, b0, b1 = fn.box
    s = np.linspace(0.0, 1.0, n)
    xs = np.concatenate([a0 + (a1 - a0) * s, a0 + (a1 - a0) * s, np.full(n, a0), np.full(n, a1)])
    ys = np.concatenate([np.full(n, b0), np.full(n, b1), b0 + (b1 - b0) * s, b0 + (b1 - b0) * s])
    vals = np.abs(fn.e(xs, ys))
    if np.max(vals) >= tol:
        raise SupportViolation(f"test function {fn.e} reaches {np.max(vals):.3e} on the box boundary")


def _quadrature_points(box, n_cells):
    a0, a1, b0, b1 = box
    xi, wi = np.polynomial.legendre.leggauss(4)
    hx = (a1 - a0) / n_cells
    hy = (b1 - b0) / n_cells
    cx = a0 + (np.arange(n_cells) + 0.5) * hx
    cy = b0 + (np.arange(n_cells) + 0.5) * hy
    X = (cx[:, None] + 0.5 * hx * xi[None, :]).ravel()
    Y = (cy[:, None] + 0.5 * hy * xi[None, :]).ravel()
    Wx = np.tile(0.5 * hx * wi, n_cells)
    Wy = np.tile(0.5 * hy * wi, n_cells)
    XX, YY = np.meshgrid(X, Y, indexing="ij")
    W = np.outer(Wx, Wy)
    return XX.ravel(), YY.ravel(), W.ravel()


def _front_copies(state, box):
    """Marker positions of every periodic copy of the front that meets ``box``."""
    if state.topology != "periodic" or state.shift == (0.0, 0.0):
        return [(state.x, state.y)]
    sx, sy = state.shift
    a0, a1, b0, b1 = box
    reach = np.hypot(a1 - a0, b1 - b0) + np.hypot(np.ptp(state.x), np.ptp(state.y))
    kmax = int(np.ceil(reach / np.hypot(sx, sy))) + 1
    return [(state.x + k * sx, state.y + k * sy) for k in range(-kmax, kmax + 1)]


def _snapshot_terms(data, state, fns, X, Y, W, box):
    """Measure integrals and flux integrands of the three identities at one time."""
    t = state.t
    side, _, _ = polyline.project(X, Y, state.x, state.y, state.l, state.topology, state.shift)
    rho = np.zeros_like(X)
    mx = np.zeros_like(X)
    my = np.zeros_like(X)
    # points exactly on the front count half for each stream
    for name, mask, weight in (("minus", side > 0, 1.0), ("plus", side < 0, 1.0),
                               ("minus", side == 0, 0.5), ("plus", side == 0, 0.5)):
        if not np.any(mask):
            continue
        a, b = preimage(data, name, X[mask], Y[mask], t)
        s = data.side(name)
        r = np.broadcast_to(transported_density(data, name, a, b, t), a.shape) * weight
        rho[mask] += r
        mx[mask] += r * np.broadcast_to(s.u(a, b), a.shape)
        my[mask] += r * np.broadcast_to(s.v(a, b), a.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        uu = np.where(rho > 0, mx / np.where(rho > 0, rho, 1.0), 0.0)
        vv = np.where(rho > 0, my / np.where(rho > 0, rho, 1.0), 0.0)

    U, V = velocities(data, state)
    f, g, hh = fns
    fv, (fx, fy) = f.value(X, Y), f.grad(X, Y)
    gv, (gx, gy) = g.value(X, Y), g.grad(X, Y)
    hv, (hx, hy) = hh.value(X, Y), hh.grad(X, Y)
    M = np.array([np.sum(W * rho * fv), np.sum(W * mx * gv), np.sum(W * my * hv)])
    F = np.array([np.sum(W * (mx * fx + my * fy)),
                  np.sum(W * mx * (uu * gx + vv * gy)),
                  np.sum(W * my * (uu * hx + vv * hy))])
    dl = state.dl
    for xs, ys in _front_copies(state, box):
        fl, (flx, fly) = f.value(xs, ys), f.grad(xs, ys)
        gl, (glx, gly) = g.value(xs, ys), g.grad(xs, ys)
        hl, (hlx, hly) = hh.value(xs, ys), hh.grad(xs, ys)
        wl = np.full(xs.shape, dl)
        if state.topology == "open":
            wl[0] = wl[-1] = 0.5 * dl
        M += [np.sum(wl * state.P * fl), np.sum(wl * state.I * gl), np.sum(wl * state.J * hl)]
        F += [np.sum(wl * (state.I * flx + state.J * fly)),
              np.sum(wl * state.I * (U * glx + V * gly)),
              np.sum(wl * state.J * (U * hlx + V * hly))]
    return M, F


def _box_mass(data, state, X, Y, W, box):
    one = _TestFn("1", box)
    M, _ = _snapshot_terms(data, state, (one, one, one), X, Y, W, box)
    return float(M[0])


def weak_residual(data: InitialData, history: FrontHistory, f, g, h, t1, t2, box,
                  n_cells=64, test_id="", check=True):
    """Signed defects of the weak mass and momentum identities on ``[t1, t2]``.

    ``f``, ``g``, ``h`` are expressions in ``x, y`` restricted to ``box``;
    they must vanish on its boundary.  Area integrals use 4x4 Gauss-Legendre
    points per cell of an ``n_cells x n_cells`` grid, the front measure the
    trapezoid rule in ``l``, and time integrals the trapezoid rule over the
    stored states in ``[t1, t2]`` (both ends must be stored times).
    """
    fns = tuple(_TestFn(e, box) for e in (f, g, h))
    if check:
        for fn in fns:
            check_support(fn)
    times = history.times
    i1 = int(np.argmin(np.abs(times - t1)))
    i2 = int(np.argmin(np.abs(times - t2)))
    if abs(times[i1] - t1) > 1e-12 or abs(times[i2] - t2) > 1e-12 or i2 <= i1:
        raise ValueError("t1 < t2 must both be stored times of the history")
    X, Y, W = _quadrature_points(box, n_cells)
    Ms, Fs = [], []
    for k in range(i1, i2 + 1):
        M, F = _snapshot_terms(data, history.states[k], fns, X, Y, W, box)
        Ms.append(M)
        Fs.append(F)
    Fs = np.array(Fs)
    flux = np.trapezoid(Fs, times[i1:i2 + 1], axis=0)
    d = Ms[-1] - Ms[0] - flux
    box_mass = _box_mass(data, history.states[i2], X, Y, W, box)
    return WeakResidual(test_id, float(d[0]), float(d[1]), float(d[2]), box_mass)

# }}}
