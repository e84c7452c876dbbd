import json
import os

import pytest

from pressureless import cli, config, output
from pressureless.errors import ConfigError


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# config

@pytest.mark.parametrize("name", config.bundled_names())
def test_bundled_configs_load_and_build(name):
    cfg = config.load_any(name)
    data = config.build_data(cfg)
    assert data.curve.l_max > data.curve.l_min


def test_bundled_set_is_complete():
    assert {"symmetric-riemann.cfg", "rho1-rho4.cfg", "potential-a2.cfg"} <= set(
        config.bundled_names())


def test_overrides_apply_and_convert():
    cfg = config.load(overrides=["front.dt=0.02", "variational.box=-1 1 -2 2",
                                 "constant_state.p_equation=yes"])
    assert cfg.get("front.dt") == 0.02
    assert cfg["variational"]["box"] == (-1.0, 1.0, -2.0, 2.0)
    assert cfg["constant_state"]["p_equation"] is True


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        config.load(text="[front]\nbogus = 1\n")
    with pytest.raises(ConfigError):
        config.load(overrides=["front=1"])


def test_malformed_expression_names_field_and_position():
    with pytest.raises(ConfigError) as info:
        config.load(text='[scenario]\nkind = potential_perturbation\nf = "a^2 +* b"\n')
    assert info.value.field == "scenario.f"
    assert info.value.position == 5


def test_invalid_values_rejected():
    for text in ("[front]\ndt = -1\n", "[scenario]\ntopology = torus\n",
                 "[front]\nn_markers = many\n", "[dispersion]\nintegrator = euler\n"):
        with pytest.raises(ConfigError):
            config.load(text=text)


# cli

def test_simulate_writes_csv_and_summary(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "--config", "symmetric-riemann.cfg",
                     "--set", "front.t_max=0.2", "--set", "front.dt=0.05",
                     "--out", str(tmp_path))
    assert code == 0
    header, rows = output.read_csv(tmp_path / "front.csv")
    assert "P" in header and rows
    summary = json.loads((tmp_path / "simulate.json").read_text())
    assert summary


@pytest.mark.parametrize("cmd, sets, files", [
    ("variational", ["variational.grid_n=65", "variational.map_n=3", "variational.xs=0 0.2"],
     ["psi_map.csv", "singular_surface.csv", "variational.json"]),
    ("compare-surfaces", ["front.t_max=0.2", "front.dt=0.01"],
     ["theorem31.csv", "theorem32.csv", "compare-surfaces.json"]),
])
def test_potential_subcommands(tmp_path, capsys, cmd, sets, files):
    argv = [cmd, "--config", "potential-a2.cfg", "--out", str(tmp_path)]
    for s in sets:
        argv += ["--set", s]
    code, _, err = run(capsys, *argv)
    assert code == 0, err
    for f in files:
        assert (tmp_path / f).is_file()


def test_constant_state_and_p_equation_horizon(tmp_path, capsys):
    base = ["constant-state", "--config", "rho1-rho4.cfg", "--out", str(tmp_path),
            "--set", "front.t_max=0.2", "--set", "front.n_markers=8"]
    code, _, err = run(capsys, *base)
    assert code == 0, err
    assert (tmp_path / "constant_state.csv").is_file()
    code, _, err = run(capsys, *base, "--set", "constant_state.p_equation=true",
                       "--set", "constant_state.p_equation_t_max=0.5")
    assert code == 2
    assert json.loads(err)["error"] == "ConfigError"


def test_dispersion_subcommand(tmp_path, capsys):
    code, _, _ = run(capsys, "dispersion", "--set", "dispersion.xis=4 16", "--out", str(tmp_path))
    assert code == 0
    header, rows = output.read_csv(tmp_path / "dispersion.csv")
    assert len(rows) == 2


def test_oracle_subcommand(tmp_path, capsys):
    code, _, err = run(capsys, "oracle", "--config", "symmetric-riemann.cfg",
                       "--set", "front.n_markers=8", "--set", "front.dt=0.1",
                       "--set", "front.store_every=1", "--set", "oracle.n_cells=8",
                       "--out", str(tmp_path))
    assert code == 0, err
    assert (tmp_path / "oracle_bins.csv").is_file()
    assert (tmp_path / "weak_residuals.csv").is_file()


def test_validate_single_criterion(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", "--only", "10", "--out", str(tmp_path))
    assert code == 0
    assert "PASS 10" in out
    assert (tmp_path / "acceptance.csv").is_file()


def test_bad_override_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--set", "front.nope=3", "--out", str(tmp_path))
    assert code == 2
    assert json.loads(err)["exit_code"] == 2


def test_expression_error_reported_as_json(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--set", "scenario.kind=potential_perturbation",
                       "--set", "scenario.f=sin(a", "--out", str(tmp_path))
    assert code == 2
    payload = json.loads(err)
    assert payload["field"] == "scenario.f"
    assert payload["position"] == 5


def test_inadmissible_scenario_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--set", "scenario.kind=custom",
                       "--set", "scenario.v_minus=1", "--set", "scenario.v_plus=-1",
                       "--out", str(tmp_path))
    assert code == 3
    assert json.loads(err)["error"] == "InadmissibleScenario"


def test_missing_config_file(capsys):
    code, _, _ = run(capsys, "simulate", "--config", "/nonexistent/x.cfg")
    assert code == 2


def test_threads_validated(capsys):
    code, _, _ = run(capsys, "simulate", "--threads", "0")
    assert code == 2


def test_output_dir_from_environment(tmp_path, capsys, monkeypatch):
    target = tmp_path / "envout"
    monkeypatch.setenv(cli.OUT_ENV, str(target))
    code, _, _ = run(capsys, "dispersion", "--set", "dispersion.xis=4")
    assert code == 0
    assert os.path.isfile(target / "dispersion.csv")


def test_repeated_runs_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / f"r{k}"
        run(capsys, "simulate", "--config", "rho1-rho4.cfg", "--set", "front.t_max=0.1",
            "--set", "front.n_markers=8", "--out", str(d))
        outs.append(((d / "front.csv").read_bytes(), (d / "simulate.json").read_bytes()))
    assert outs[0] == outs[1]


def test_bundled_potential_config_runs_unmodified(tmp_path, capsys):
    code, _, err = run(capsys, "variational", "--config", "potential-a2.cfg", "--out", str(tmp_path))
    assert code == 0, err
    summary = json.loads((tmp_path / "variational.json").read_text())
    assert summary["min_minimizers_on_surface"]["pass"] is True


def test_repeated_validate_runs_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / f"v{k}"
        code, _, _ = run(capsys, "validate", "--only", "1", "--only", "9", "--only", "10",
                         "--out", str(d))
        assert code == 0
        outs.append(((d / "acceptance.csv").read_bytes(), (d / "validate.json").read_bytes()))
    assert outs[0] == outs[1]
