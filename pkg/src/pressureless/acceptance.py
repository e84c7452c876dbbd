"""The acceptance suite: every end-to-end check with its tolerance.

Each ``criterion_*`` function runs one experiment and returns a list of
:class:`Outcome` rows.  ``run_all`` is shared by ``pressureless validate``
and ``tests/test_acceptance.py``.
"""

from __future__ import annotations

import filecmp
import os
import tempfile
from typing import NamedTuple

import numpy as np

from . import constant_state as cs
from . import dispersion as dp
from . import front as fr
from . import oracle as orc
from . import scenario as sc
from . import variational as vr
from .fieldexpr import differentiate, parse

EPS = np.finfo(float).eps


class Outcome(NamedTuple):
    criterion: str
    value: float
    expected: float
    tol: float
    passed: bool
    note: str = ""

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag} {self.criterion}: value={self.value:.6g} expected={self.expected:.6g} "
                f"tol={self.tol:.3g}" + (f" ({self.note})" if self.note else ""))


def _reference_constant_state():
    return cs.ConstantStateScenario(rho=1.0, rho_tilde=4.0, u=0.0, v=-1.0, k_hat0=0.5, P0=1.0)


# {{{ 1, 8: closed form and first integrals

def _closed_form_run():
    scen = _reference_constant_state()
    hist = fr.track(scen.data(), 16, 1e-3, 2.0, store_every=10)
    return scen, hist


def criterion_1(run=None):
    scen, hist = run or _closed_form_run()
    out = []
    for t in (0.5, 1.0, 2.0):
        k = int(np.argmin(np.abs(hist.times - t)))
        s = hist.states[k]
        P_exact, _ = cs.closed_form_P(scen, s.l, s.t)
        err = float(np.max(np.abs(s.P - P_exact) / P_exact))
        out.append(Outcome(f"1 constant-state P rel. error t={t:g}", err, 0.0, 1e-6, err < 1e-6))
    P1, _ = cs.closed_form_P(scen, 0.0, 1.0)
    out.append(Outcome("1 closed form P(1) = sqrt(10)", float(P1), float(np.sqrt(10.0)), 1e-12,
                       abs(float(P1) - np.sqrt(10.0)) < 1e-12))
    return out


def criterion_8(run=None):
    scen, hist = run or _closed_form_run()
    C, G = cs.first_integrals(hist, scen.u, scen.v)
    dC = float(np.max(np.ptp(C, axis=0)))
    dG = float(np.max(np.ptp(G, axis=0)))
    return [Outcome("8 first integral uJ - vI drift on [0, 2]", dC, 0.0, 1e-8, dC < 1e-8),
            Outcome("8 first integral u y_l - v x_l drift on [0, 2]", dG, 0.0, 1e-8, dG < 1e-8)]

# }}}


def criterion_2():
    scen = _reference_constant_state()
    t_end = 50.0
    hist = fr.track(scen.data(), 16, 1e-2, t_end, store_every=1000)
    s = hist.last
    kap = float(cs.kappa(scen.rho, scen.rho_tilde))
    k_hat = cs.k_hat_of(s, scen.u, scen.v)
    k_err = float(np.max(np.abs(k_hat - kap)) / kap)
    x0, y0 = hist.states[0].x, hist.states[0].y
    disp = kap * t_end * np.hypot(scen.u, scen.v)
    pos_err = float(np.max(np.hypot(s.x - x0 - kap * scen.u * t_end,
                                    s.y - y0 - kap * scen.v * t_end)) / disp)
    return [Outcome("2 k_hat(50) vs kappa = 1/3 (relative)", k_err, 0.0, 0.01, k_err < 0.01,
                    f"k_hat={float(np.mean(k_hat)):.6f}"),
            Outcome("2 front position vs x0 + kappa (u, v) t at t=50 (relative)", pos_err, 0.0,
                    0.01, pos_err < 0.01)]


def criterion_3():
    rho, w = 1.0, 1.0
    data = sc.riemann(rho, w)
    hist = fr.track(data, 32, 0.01, 1.0)
    speed = max(float(np.max(np.hypot(*fr.velocities(data, s)))) for s in hist.states[1:])
    P = hist.stack("P")[1:]
    t = hist.times[1:, None]
    p_err = float(np.max(np.abs(P - 2 * rho * w * t) / (2 * rho * w * t)))
    last = hist.last
    res = orc.sticky_run(data, hist, last.dl / 4, 1.0)
    bin_err = float(np.max(np.abs(orc.bin_comparison(res, last))))
    return [Outcome("3 Riemann front speed", speed, 0.0, 1e-10, speed < 1e-10),
            Outcome("3 Riemann P = 2 rho w t (relative)", p_err, 0.0, 1e-8, p_err < 1e-8),
            Outcome("3 Riemann sticky-particle bin mass vs P dl (h = dl/4)", bin_err, 0.0, 0.02,
                    bin_err < 0.02)]


# {{{ 4, 5: variational surface vs tracked front

def _potential_run(f, eps, n_markers, dt, t_end=0.5):
    data = sc.potential_perturbation(f, eps)
    return data, fr.track(data, n_markers, dt, t_end)


def _measured_gap(data, hist, l_target, box=(-1.0, 1.0, -1.0, 1.0), grid_n=257):
    s = hist.last
    i = int(np.argmin(np.abs(s.l - l_target)))
    pot = vr.Potential.from_data(data)
    x, y = float(s.x[i]), float(s.y[i])
    (_, y_var), = vr.singular_surface(pot, s.t, [x], (y - 0.05, y + 0.05), box, grid_n)
    return y_var - y, float(s.l[i])


def criterion_4():
    eps, t = 1e-3, 0.5
    data, hist = _potential_run("a^2", eps, 41, 0.005, t)
    gap, l = _measured_gap(data, hist, 0.2)
    expected = eps * t * t / 12
    rel = abs(gap - expected) / expected
    predicted = -vr.theorem31_gap("a^2", eps, t, l)
    data0, hist0 = _potential_run("a", eps, 41, 0.005, t)
    gap0, _ = _measured_gap(data0, hist0, 0.2)
    return [Outcome("4 y-gap variational - tracked, f=a^2 (relative to eps t^2/12)", rel, 0.0, 0.1,
                    rel < 0.1, f"gap={gap:.6g}, first-order theory {predicted:.6g}"),
            Outcome("4 y-gap control f=a (f_aa=0)", abs(gap0), 0.0, 1e-8, abs(gap0) < 1e-8)]


def _defect_and_estimate(data, l_lo, l_hi, coarse, fine, t_end):
    pot = vr.Potential.from_data(data)
    vals = []
    for n, dt in (coarse, fine):
        hist = fr.track(data, n, dt, t_end)
        D = vr.theorem32_relation(hist, pot)[-1]
        s = hist.last
        keep = (s.l >= l_lo - 1e-12) & (s.l <= l_hi + 1e-12)
        vals.append((s.l[keep], D[keep], hist))
    (l1, D1, _), (l2, D2, h2) = vals
    D2c = np.interp(l1, l2, D2)
    # round-off floor from the size of the terms that cancel
    s = h2.last
    scale = np.max(np.abs(np.stack([s.a_plus - s.a_minus, s.b_plus - s.b_minus]))) + EPS
    estimate = np.abs(D1 - D2c) + 1e3 * EPS * scale
    return D2c, estimate


def criterion_5():
    eps, t = 1e-3, 0.5
    data = sc.potential_perturbation("a^2", eps)
    D, est = _defect_and_estimate(data, -0.3, 0.3, (41, 0.005), (81, 0.0025), t)
    margin = float(np.min(np.abs(D) / est))
    rdata = sc.riemann()
    Dr, estr = _defect_and_estimate(rdata, -0.5, 0.5, (32, 0.02), (64, 0.01), 1.0)
    rmax = float(np.max(np.abs(Dr) / estr))
    return [Outcome("5 surface-condition defect / discretization estimate, f=a^2 (min over l)", margin,
                    5.0, 0.0, margin > 5.0, f"defect ~ {float(np.median(np.abs(D))):.4g}"),
            Outcome("5 Riemann defect / discretization estimate (max)", rmax, 1.0, 0.0, rmax < 1.0)]

# }}}


def criterion_6():
    data = _reference_constant_state().data()
    res = []
    for n, dt in ((64, 0.01), (128, 0.005)):
        hist = fr.track(data, n, dt, 1.0)
        rx, ry = fr.adhesion_residual(data, hist)
        res.append(float(max(np.max(np.abs(rx)), np.max(np.abs(ry)))))
    ratio = res[0] / res[1] if res[1] > 0 else np.inf
    return [Outcome("6 adhesion residual at t=1", res[0], 0.0, 1e-4, res[0] < 1e-4),
            Outcome("6 adhesion residual reduction, dt and dl halved", ratio, 3.0, 0.0, ratio >= 3.0)]


WEAK_BOX = (-0.4, 0.4, -1.5, 0.5)
WEAK_FN = "(x+0.4)^2*(0.4-x)^2*(y+1.5)^2*(0.5-y)^2"


def _weak(data, dt, n_cells, box=WEAK_BOX, fn=WEAK_FN, t1=0.2, t2=1.0):
    hist = fr.track(data, 32, dt, t2)
    w = orc.weak_residual(data, hist, fn, fn, fn, t1, t2, box, n_cells=n_cells)
    return max(abs(w.mass), abs(w.mom_x), abs(w.mom_y)), w.box_mass


def criterion_7():
    cdata = _reference_constant_state().data()
    d_coarse, _ = _weak(cdata, 0.02, 32)
    d_fine, mass = _weak(cdata, 0.01, 64)
    box_r = (-0.4, 0.4, -1.5, 1.5)
    fn_r = "(x+0.4)^2*(0.4-x)^2*(y+1.5)^2*(1.5-y)^2"
    d_r, mass_r = _weak(sc.riemann(), 0.01, 64, box_r, fn_r)
    rel = max(d_fine / mass, d_r / mass_r)
    ratio = d_coarse / d_fine
    return [Outcome("7 weak-form defects relative to box mass", rel, 0.0, 1e-3, rel < 1e-3),
            Outcome("7 weak-form defect reduction, quadrature step and dt halved", ratio, 2.0, 0.6,
                    abs(ratio - 2.0) <= 0.6, f"{d_coarse:.3g} -> {d_fine:.3g}")]


def criterion_9():
    out = []
    rates = {}
    for xi in (4.0, 16.0, 64.0):
        r = dp.measure_growth(1.0, xi, 10.0, "exact_mode")
        rates[xi] = r
        pred = dp.predicted_rate(1.0, xi)
        err = abs(r - pred) / pred
        out.append(Outcome(f"9 exact-mode growth xi={xi:g} (relative)", err, 0.0, 0.02, err < 0.02))
    for xi in (4.0, 16.0):
        q = rates[4 * xi] / rates[xi]
        out.append(Outcome(f"9 rate(4 xi)/rate(xi), xi={xi:g}", q, 2.0, 0.05, abs(q - 2.0) <= 0.05))
    return out


# {{{ 10: random expressions

_UNARY = ("sin", "cos", "exp_sin", "sqrt_pos", "neg")
_BINARY = ("+", "-", "*", "/", "^")


def random_expression(rng, depth=3):
    """Text of a random smooth expression in ``a, b`` with no singularities."""
    if depth == 0 or rng.random() < 0.2:
        choice = rng.integers(3)
        if choice == 0:
            return "a"
        if choice == 1:
            return "b"
        return repr(round(float(rng.uniform(-3, 3)), 3))
    if rng.random() < 0.4:
        op = _UNARY[rng.integers(len(_UNARY))]
        inner = random_expression(rng, depth - 1)
        if op == "exp_sin":
            return f"exp(sin({inner}))"
        if op == "sqrt_pos":
            return f"sqrt(1 + ({inner})^2)"
        if op == "neg":
            return f"-({inner})"
        return f"{op}({inner})"
    op = _BINARY[rng.integers(len(_BINARY))]
    left = random_expression(rng, depth - 1)
    right = random_expression(rng, depth - 1)
    if op == "/":
        return f"({left})/(2 + sin({right}))"
    if op == "^":
        return f"({left})^{int(rng.integers(0, 4))}"
    return f"({left}) {op} ({right})"


def derivative_check(n=1000, seed=0, step=1e-6):
    """Worst mixed relative error of symbolic vs central-difference gradients."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        e = parse(random_expression(rng))
        a, b = rng.uniform(-2, 2, size=2)
        for var, (da, db) in (("a", (step, 0.0)), ("b", (0.0, step))):
            sym = float(differentiate(e, var)(a, b))
            fd = (float(e(a + da, b + db)) - float(e(a - da, b - db))) / (2 * step)
            worst = max(worst, abs(sym - fd) / max(1.0, abs(sym)))
    return worst


def criterion_10():
    worst = derivative_check()
    return [Outcome("10 fieldexpr symbolic vs finite-difference gradient, 1000 expressions",
                    worst, 0.0, 1e-5, worst < 1e-5)]

# }}}


def criterion_11():
    from . import cli
    same = True
    with tempfile.TemporaryDirectory() as d1, tempfile.TemporaryDirectory() as d2:
        for d in (d1, d2):
            cli.main(["simulate", "--config", "symmetric-riemann.cfg", "--out", d])
            cli.main(["constant-state", "--config", "rho1-rho4.cfg", "--out", d,
                      "--set", "front.t_max=0.5"])
            cli.main(["dispersion", "--out", d])
        names = sorted(n for n in os.listdir(d1))
        same = names == sorted(os.listdir(d2)) and all(
            filecmp.cmp(os.path.join(d1, n), os.path.join(d2, n), shallow=False) for n in names)
    return [Outcome("11 repeated runs give byte-identical CSV/JSON", float(same), 1.0, 0.0, same,
                    f"{len(names)} files")]


def run_all(selected=None, echo=None):
    """Run the criteria (all, or the numbers in ``selected``) and return all outcomes."""
    shared = None
    outcomes = []
    for k in range(1, 12):
        if selected and k not in selected:
            continue
        if k in (1, 8):
            shared = shared or _closed_form_run()
            rows = globals()[f"criterion_{k}"](shared)
        else:
            rows = globals()[f"criterion_{k}"]()
        for row in rows:
            if echo:
                echo(row.line())
        outcomes.extend(rows)
    return outcomes
