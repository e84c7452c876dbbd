"""Command-line entry point: ``pressureless <subcommand> [--config F] [--set k=v] [--out D]``.

Exit status is 0 on success, 1 when ``validate`` finds a failing criterion,
2 for configuration errors and 3 for solver errors; errors are also written
to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import config as cfgmod
from . import constant_state as cs
from . import dispersion as dp
from . import front as fr
from . import oracle as orc
from . import variational as vr
from .errors import ConfigError, PressurelessError
from .output import summary_entry, write_csv, write_summary

OUT_ENV = "PRESSURELESS_OUT"


def _track(cfg, data):
    f = cfg["front"]
    return fr.track(data, f["n_markers"], f["dt"], f["t_max"], store_every=f["store_every"])


# {{{ subcommands

def cmd_simulate(cfg, out):
    data = cfgmod.build_data(cfg)
    hist = _track(cfg, data)
    rows = []
    for k, s in enumerate(hist.states):
        U, V = fr.velocities(data, s)
        if k >= 2:
            rx, ry = fr.adhesion_residual(data, fr.FrontHistory(hist.states[:k + 1]))
        else:
            rx = ry = [None] * len(s)
        for i in range(len(s)):
            rows.append((s.t, s.l[i], s.x[i], s.y[i], s.P[i], s.I[i], s.J[i], U[i], V[i],
                         s.a_minus[i], s.b_minus[i], s.a_plus[i], s.b_plus[i], rx[i], ry[i]))
    write_csv(os.path.join(out, "front.csv"),
              ["t", "l", "x", "y", "P", "I", "J", "U", "V", "a_minus", "b_minus",
               "a_plus", "b_plus", "res_x", "res_y"], rows)
    last = hist.last
    U, V = fr.velocities(data, last)
    summary = {
        "final_time": summary_entry(last.t),
        "n_markers": summary_entry(len(last)),
        "min_P": summary_entry(float(np.min(last.P))),
        "max_front_speed": summary_entry(float(np.max(np.hypot(U, V)))),
    }
    if len(hist) >= 3:
        rx, ry = fr.adhesion_residual(data, hist)
        summary["max_adhesion_residual"] = summary_entry(
            float(max(np.max(np.abs(rx)), np.max(np.abs(ry)))), 0.0, 1e-4)
    write_summary(os.path.join(out, "simulate.json"), summary)
    return summary


def _potential(cfg, data):
    if not data.potential:
        raise ConfigError("scenario has no velocity potential (use riemann or potential_perturbation)")
    return vr.Potential.from_data(data)


def cmd_variational(cfg, out):
    data = cfgmod.build_data(cfg)
    pot = _potential(cfg, data)
    v = cfg["variational"]
    t, box, grid_n = v["t"], v["box"], v["grid_n"]
    a0, a1, b0, b1 = box
    n = v["map_n"]
    xs = np.linspace(0.5 * a0, 0.5 * a1, n)
    ys = np.linspace(0.5 * b0, 0.5 * b1, n)
    psi_rows = []
    for x in xs:
        for y in ys:
            ms = vr.hopf_lax(pot, t, x, y, box, grid_n)
            psi_rows.append((t, x, y, ms.value, len(ms.minimizers)))
    write_csv(os.path.join(out, "psi_map.csv"), ["t", "x", "y", "psi", "n_minimizers"], psi_rows)
    pts = vr.singular_surface(pot, t, v["xs"], (v["y_lo"], v["y_hi"]), box, grid_n)
    srows = []
    for x, y in pts:
        ms = vr.hopf_lax(pot, t, x, y, box, grid_n)
        srows.append((t, x, y, len(ms.minimizers)))
    write_csv(os.path.join(out, "singular_surface.csv"), ["t", "x", "y", "n_minimizers"], srows)
    summary = {"n_surface_points": summary_entry(len(pts)),
               "min_minimizers_on_surface": summary_entry(min(r[3] for r in srows), 2, 0,
                                                          min(r[3] for r in srows) == 2)}
    write_summary(os.path.join(out, "variational.json"), summary)
    return summary


def cmd_compare_surfaces(cfg, out):
    s = cfg["scenario"]
    if s["kind"] != "potential_perturbation":
        raise ConfigError("compare-surfaces needs scenario.kind = potential_perturbation")
    data = cfgmod.build_data(cfg)
    pot = _potential(cfg, data)
    v = cfg["variational"]
    f = cfg["front"]
    hist = fr.track(data, f["n_markers"], f["dt"], v["t"], store_every=1)
    last = hist.last
    rows = []
    for l_target in v["xs"]:
        i = int(np.argmin(np.abs(last.l - l_target)))
        x, y = float(last.x[i]), float(last.y[i])
        (_, y_var), = vr.singular_surface(pot, last.t, [x], (y - 0.05, y + 0.05), v["box"],
                                         v["grid_n"])
        _, y_rh1 = vr.rh_perturbation_surface(s["f"], s["eps"], last.t, float(last.l[i]))
        first_order = -vr.theorem31_gap(s["f"], s["eps"], last.t, float(last.l[i]))
        rows.append((last.t, last.l[i], x, y, y_var, y_var - y, first_order, y_rh1))
    write_csv(os.path.join(out, "theorem31.csv"),
              ["t", "l", "x_front", "y_front", "y_variational", "gap_measured",
               "gap_first_order", "y_front_first_order"], rows)
    D = vr.theorem32_relation(hist, pot)
    E = vr.surface_condition_defect(hist, pot)
    trows = [(st.t, st.l[i], D[k, i], E[k, i])
             for k, st in enumerate(hist.states) for i in range(len(st))]
    write_csv(os.path.join(out, "theorem32.csv"), ["t", "l", "defect", "defect_pointwise"], trows)
    expected = s["eps"] * v["t"] ** 2 / 12
    summary = {"max_gap_measured": summary_entry(max(r[5] for r in rows)),
               "gap_f_a2_expected": summary_entry(expected),
               "max_abs_defect_final": summary_entry(float(np.max(np.abs(D[-1]))))}
    write_summary(os.path.join(out, "compare-surfaces.json"), summary)
    return summary


def cmd_constant_state(cfg, out, unsafe_long_horizon=False):
    s = cfg["scenario"]
    if s["kind"] != "constant_state":
        raise ConfigError("constant-state needs scenario.kind = constant_state")
    scen = cs.ConstantStateScenario(s["rho"], s["rho_tilde"], s["u"], s["v"], s["x0"], s["y0"],
                                    s["k_hat0"], s["P0"], s["l_min"], s["l_max"], s["topology"])
    data = scen.data()
    hist = _track(cfg, data)
    kap = float(cs.kappa(scen.rho, scen.rho_tilde))
    k_hat = cs.k_hat_of(hist, scen.u, scen.v)
    flags = cs.stability_window(hist.times, k_hat)
    rows = []
    worst = 0.0
    for k, st in enumerate(hist.states):
        P_c, _ = cs.closed_form_P(scen, st.l, st.t)
        P_c = np.broadcast_to(P_c, st.P.shape)
        worst = max(worst, float(np.max(np.abs(st.P - P_c) / P_c)))
        for i in range(len(st)):
            rows.append((st.t, st.l[i], st.P[i], P_c[i], k_hat[k, i], kap, not flags[k, i]))
    write_csv(os.path.join(out, "constant_state.csv"),
              ["t", "l", "P_numeric", "P_closed", "k_hat", "kappa", "stable"], rows)
    summary = {"kappa": summary_entry(kap),
               "k_hat_final": summary_entry(float(np.mean(k_hat[-1]))),
               "max_rel_error_P": summary_entry(worst, 0.0, 1e-6, worst < 1e-6),
               "stability_violations": summary_entry(int(flags.sum()), 0, 0, not flags.any())}
    c = cfg["constant_state"]
    if c["p_equation"]:
        unsafe = unsafe_long_horizon or c["unsafe_long_horizon"]
        T, P = cs.evolve_p_equation(data, cfg["front"]["n_markers"], cfg["front"]["dt"],
                                    c["p_equation_t_max"], unsafe_long_horizon=unsafe)
        l = hist.states[0].l
        write_csv(os.path.join(out, "p_equation.csv"), ["t", "l", "P"],
                  [(T[k], l[i], P[k, i]) for k in range(len(T)) for i in range(len(l))])
    write_summary(os.path.join(out, "constant_state.json"), summary)
    return summary


def cmd_dispersion(cfg, out):
    d = cfg["dispersion"]
    table = dp.growth_table(d["K"], d["xis"], d["t_max"], d["integrator"], d["n_points"])
    write_csv(os.path.join(out, "dispersion.csv"), ["xi", "predicted", "measured", "integrator", "N"],
              [tuple(r) for r in table])
    summary = {f"rate_xi_{r.xi:g}": summary_entry(r.measured, r.predicted, 0.02 * r.predicted,
                                                  abs(r.measured - r.predicted) <= 0.02 * r.predicted)
               for r in table}
    write_summary(os.path.join(out, "dispersion.json"), summary)
    return summary


def cmd_oracle(cfg, out):
    data = cfgmod.build_data(cfg)
    hist = _track(cfg, data)
    o = cfg["oracle"]
    last = hist.last
    res = orc.sticky_run(data, hist, o["h_ratio"] * last.dl, last.t)
    gap = orc.bin_comparison(res, last)
    dl = last.dl
    rows = [(last.l[i], res.bin_mass[i], last.P[i] * dl, gap[i], res.bin_mom_x[i],
             last.I[i] * dl, res.bin_mom_y[i], last.J[i] * dl) for i in range(len(last))]
    write_csv(os.path.join(out, "oracle_bins.csv"),
              ["l", "bin_mass", "P_dl", "rel_gap", "bin_mom_x", "I_dl", "bin_mom_y", "J_dl"], rows)
    w = orc.weak_residual(data, hist, o["f"], o["g"], o["h"], o["t1"], o["t2"], o["box"],
                          n_cells=o["n_cells"], test_id="configured")
    write_csv(os.path.join(out, "weak_residuals.csv"),
              ["test_id", "t1", "t2", "mass", "mom_x", "mom_y", "box_mass"],
              [(w.test_id, o["t1"], o["t2"], w.mass, w.mom_x, w.mom_y, w.box_mass)])
    worst = float(np.max(np.abs(gap)))
    rel = max(abs(w.mass), abs(w.mom_x), abs(w.mom_y)) / w.box_mass
    summary = {"max_bin_rel_gap": summary_entry(worst, 0.0, 0.02, worst < 0.02),
               "weak_defect_rel_box_mass": summary_entry(rel, 0.0, 1e-3, rel < 1e-3),
               "late_absorptions": summary_entry(res.n_late)}
    write_summary(os.path.join(out, "oracle.json"), summary)
    return summary


def cmd_validate(cfg, out, selected=None):
    from . import acceptance
    outcomes = acceptance.run_all(selected, echo=print)
    write_csv(os.path.join(out, "acceptance.csv"),
              ["criterion", "value", "expected", "tol", "pass", "note"],
              [tuple(o) for o in outcomes])
    summary = {o.criterion: summary_entry(o.value, o.expected, o.tol, bool(o.passed))
               for o in outcomes}
    write_summary(os.path.join(out, "validate.json"), summary)
    n_fail = sum(not o.passed for o in outcomes)
    print(f"{len(outcomes) - n_fail}/{len(outcomes)} checks passed")
    return summary, n_fail

# }}}


COMMANDS = {
    "simulate": cmd_simulate,
    "variational": cmd_variational,
    "compare-surfaces": cmd_compare_surfaces,
    "constant-state": cmd_constant_state,
    "dispersion": cmd_dispersion,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="pressureless",
                                description="Shock fronts of 2-D pressureless gas dynamics.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="config file, or the name of a bundled config")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override section.key (repeatable)")
        sp.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or output.dir)")
        sp.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; runs are single-threaded")
        if name == "constant-state":
            sp.add_argument("--unsafe-long-horizon", action="store_true",
                            help="allow the ill-posed P equation beyond its safe horizon")
        if name == "validate":
            sp.add_argument("--only", type=int, action="append", metavar="N",
                            help="run only criterion N (repeatable)")
    return p


def _error_json(exc, code):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    for attr in ("field", "position"):
        if getattr(exc, attr, None) is not None:
            payload[attr] = getattr(exc, attr)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = cfgmod.load_any(args.config, args.set)
        out = args.out or os.environ.get(OUT_ENV) or cfg["output"]["dir"]
        os.makedirs(out, exist_ok=True)
        if args.command == "validate":
            _, n_fail = cmd_validate(cfg, out, args.only)
            return 1 if n_fail else 0
        if args.command == "constant-state":
            cmd_constant_state(cfg, out, args.unsafe_long_horizon)
        else:
            COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        _error_json(exc, 2)
        return 2
    except (PressurelessError, ValueError) as exc:
        _error_json(exc, 3)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
