"""Experiment configuration files.

A configuration is an INI file (Python ``configparser`` dialect) with one
section per module.  Numbers are decimal literals; field expressions are
quoted strings.  Example::

    [scenario]
    kind = riemann
    rho = 1.0
    w = 1.0

    [front]
    n_markers = 32
    dt = 0.01
    t_max = 1.0

Every value can be overridden from the command line as ``section.key=value``.
Unknown sections or keys are errors, as are expressions that do not parse.
"""

from __future__ import annotations

import configparser
import copy
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigError, ExprSyntaxError, PressurelessError
from .fieldexpr import parse

KINDS = ("riemann", "constant_state", "potential_perturbation", "custom")

# key -> (type, default); type "expr:<vars>" is a quoted field expression
SCHEMA = {
    "scenario": {
        "kind": ("str", "riemann"),
        "name": ("str", ""),
        # riemann
        "rho": ("float", 1.0), "w": ("float", 1.0),
        # constant_state
        "rho_tilde": ("float", 4.0), "u": ("float", 0.0), "v": ("float", -1.0),
        "k_hat0": ("float", 0.5), "P0": ("float", 1.0),
        "x0": ("expr:l", "l"), "y0": ("expr:l", "0"),
        # potential_perturbation
        "f": ("expr:a,b", "a^2"), "eps": ("float", 1e-3),
        # custom
        "rho_minus": ("expr:a,b", "1"), "u_minus": ("expr:a,b", "0"), "v_minus": ("expr:a,b", "-1"),
        "rho_plus": ("expr:a,b", "1"), "u_plus": ("expr:a,b", "0"), "v_plus": ("expr:a,b", "1"),
        "level_set": ("expr:a,b", "-b"), "curve_A": ("expr:l", "l"), "curve_B": ("expr:l", "0"),
        # shared curve parameters
        "l_min": ("float", -0.5), "l_max": ("float", 0.5), "topology": ("str", "periodic"),
    },
    "front": {
        "n_markers": ("int", 32), "dt": ("float", 0.01), "t_max": ("float", 1.0),
        "store_every": ("int", 1),
    },
    "variational": {
        "t": ("float", 0.5), "grid_n": ("int", 257), "box": ("floats", (-1.5, 1.5, -1.5, 1.5)),
        "xs": ("floats", (0.0, 0.1, 0.2, 0.3)), "y_lo": ("float", 0.0), "y_hi": ("float", 0.5),
        "map_n": ("int", 21),
    },
    "constant_state": {
        "t_values": ("floats", (0.5, 1.0, 2.0)), "p_equation": ("bool", False),
        "p_equation_t_max": ("float", 0.1), "unsafe_long_horizon": ("bool", False),
    },
    "dispersion": {
        "K": ("float", 1.0), "xis": ("floats", (4.0, 16.0, 64.0)), "t_max": ("float", 10.0),
        "integrator": ("str", "exact_mode"), "n_points": ("int", 64),
    },
    "oracle": {
        "h_ratio": ("float", 0.25), "n_cells": ("int", 32), "t1": ("float", 0.2),
        "t2": ("float", 1.0), "box": ("floats", (-0.4, 0.4, -1.5, 0.5)),
        "f": ("expr:x,y", "(x+0.4)^2*(0.4-x)^2*(y+1.5)^2*(0.5-y)^2"),
        "g": ("expr:x,y", "(x+0.4)^2*(0.4-x)^2*(y+1.5)^2*(0.5-y)^2"),
        "h": ("expr:x,y", "(x+0.4)^2*(0.4-x)^2*(y+1.5)^2*(0.5-y)^2"),
    },
    "run": {
        "seed": ("int", 0), "jitter": ("bool", False),
    },
    "output": {
        "dir": ("str", "out"),
    },
}


@dataclass
class ScenarioConfig:
    sections: dict = field(default_factory=dict)
    source: str = "<defaults>"

    def __getitem__(self, section):
        return self.sections[section]

    @property
    def kind(self):
        return self.sections["scenario"]["kind"]

    def get(self, dotted):
        section, key = dotted.split(".", 1)
        return self.sections[section][key]


def _unquote(text):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _convert(section, key, raw):
    kind, _ = SCHEMA[section][key]
    where = f"{section}.{key}"
    text = _unquote(raw)
    try:
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "floats":
            return tuple(float(p) for p in text.replace(",", " ").split())
        if kind == "str":
            return text
    except ValueError:
        raise ConfigError(f"{where}: cannot read {raw!r} as {kind}") from None
    variables = tuple(kind.split(":", 1)[1].split(","))
    try:
        parse(text, variables)
    except ExprSyntaxError as exc:
        err = ConfigError(f"{where}: {exc}")
        err.field = where
        err.position = exc.position
        raise err from None
    return text


def defaults():
    return {sec: {k: copy.copy(d) for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}


def load(path=None, overrides=(), text=None):
    """Read a configuration file (or ``text``), apply ``key=value`` overrides, validate."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    source = "<defaults>"
    try:
        if text is not None:
            cp.read_string(text)
            source = "<string>"
        elif path is not None:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
            source = str(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    sections = defaults()
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp[sec].items():
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {sec}.{key}")
            sections[sec][key] = _convert(sec, key, raw)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, raw = item.split("=", 1)
        sec, key = dotted.strip().split(".", 1)
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"unknown key {dotted.strip()}")
        sections[sec][key] = _convert(sec, key, raw)
    cfg = ScenarioConfig(sections, source)
    validate(cfg)
    return cfg


def validate(cfg: ScenarioConfig):
    s = cfg["scenario"]
    if s["kind"] not in KINDS:
        raise ConfigError(f"scenario.kind must be one of {', '.join(KINDS)}")
    if s["topology"] not in ("open", "periodic"):
        raise ConfigError("scenario.topology must be open or periodic")
    if not s["l_max"] > s["l_min"]:
        raise ConfigError("scenario.l_max must exceed scenario.l_min")
    fr = cfg["front"]
    for key in ("n_markers", "dt", "t_max", "store_every"):
        if not fr[key] > 0:
            raise ConfigError(f"front.{key} must be positive")
    if fr["n_markers"] < 3:
        raise ConfigError("front.n_markers must be at least 3")
    if cfg["variational"]["t"] <= 0 or cfg["dispersion"]["t_max"] <= 0:
        raise ConfigError("time horizons must be positive")
    for sec in ("variational", "oracle"):
        if len(cfg[sec]["box"]) != 4:
            raise ConfigError(f"{sec}.box needs four numbers a0 a1 b0 b1")
    if cfg["dispersion"]["integrator"] not in ("exact_mode", "finite_difference"):
        raise ConfigError("dispersion.integrator must be exact_mode or finite_difference")


def bundled(name):
    """Path-like handle of a configuration shipped with the package."""
    ref = resources.files("pressureless").joinpath("configs", name)
    if not ref.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return ref


def bundled_names():
    return sorted(p.name for p in resources.files("pressureless").joinpath("configs").iterdir()
                  if p.name.endswith(".cfg"))


def load_any(path_or_name, overrides=()):
    """Load a file path, or a bundled config by name if no such file exists."""
    import os
    if path_or_name is None:
        return load(None, overrides)
    if os.path.exists(path_or_name):
        return load(path_or_name, overrides)
    try:
        ref = bundled(path_or_name)
    except PressurelessError:
        raise ConfigError(f"config file {path_or_name!r} not found") from None
    return load(None, overrides, text=ref.read_text(encoding="utf-8"))


def build_data(cfg: ScenarioConfig):
    """``InitialData`` described by the ``[scenario]`` section."""
    from . import scenario as sc
    s = cfg["scenario"]
    kind = s["kind"]
    if kind == "riemann":
        return sc.riemann(s["rho"], s["w"], s["l_min"], s["l_max"], s["topology"])
    if kind == "constant_state":
        return sc.constant_state(s["rho"], s["rho_tilde"], s["u"], s["v"], x0=s["x0"], y0=s["y0"],
                                 k_hat0=s["k_hat0"], P0=s["P0"], l_min=s["l_min"],
                                 l_max=s["l_max"], topology=s["topology"])
    if kind == "potential_perturbation":
        return sc.potential_perturbation(s["f"], s["eps"], s["l_min"], s["l_max"])
    curve = sc.Curve(s["curve_A"], s["curve_B"], s["l_min"], s["l_max"], topology=s["topology"],
                     shift=(s["l_max"] - s["l_min"], 0.0))
    return sc.InitialData.from_expressions(
        s["rho_minus"], s["u_minus"], s["v_minus"], s["rho_plus"], s["u_plus"], s["v_plus"],
        level_set=s["level_set"], curve=curve, name=s["name"] or "custom")
