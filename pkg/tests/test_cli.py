"""Config parsing, CSV writing, and the solve/sweep/figures entry points."""

import importlib.util
import json
import subprocess
import sys

import pytest

from pinchsim import SystemParams
from pinchsim.cli import (
    CSV_HEADER,
    ConfigError,
    RunConfig,
    load_config,
    parse_values,
    run_cli,
)

HAVE_PLOT = importlib.util.find_spec("pinchplot") is not None


def test_parse_values_grid():
    assert parse_values("0:5:30") == (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    assert parse_values("0.25:0.25:1.5") == pytest.approx(
        (0.25, 0.5, 0.75, 1.0, 1.25, 1.5))
    assert parse_values("2:1:2") == (2.0,)


def test_parse_values_list():
    assert parse_values("1,2,4,8") == (1.0, 2.0, 4.0, 8.0)
    assert parse_values("0.5") == (0.5,)


def test_parse_values_errors():
    for bad in ("1:2", "a:1:5", "5:0:10", "10:1:5", "a,b", ""):
        with pytest.raises(ConfigError):
            parse_values(bad)


def test_default_config_matches_default_params():
    assert RunConfig().to_system_params() == SystemParams()


def test_load_config_empty_file(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    assert load_config(path) == RunConfig()


def test_load_config_full(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "n_antennas": 2,
        "n_users": 3,
        "p_max_dbm": 20.0,
        "schemes": "prop,max_se",
        "axis": "r_min",
        "values": "0.25:0.25:0.75",
        "n_trials": 7,
        "master_seed": 4,
        "policy": "zero_infeasible",
    }))
    cfg = load_config(path)
    assert cfg.n_antennas == 2
    assert cfg.schemes == ("prop", "max_se")
    assert cfg.values == (0.25, 0.5, 0.75)
    params = cfg.to_system_params()
    assert params.N == 2 and params.K == 3
    assert params.P_max == pytest.approx(0.1, rel=1e-12)


def test_load_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"bogus": 1}')
    with pytest.raises(ConfigError, match="unknown config key: bogus"):
        load_config(path)


def test_load_config_type_errors(tmp_path):
    cases = [
        ({"n_antennas": 2.5}, "n_antennas"),
        ({"n_trials": True}, "n_trials"),
        ({"r_min": "high"}, "r_min"),
        ({"policy": "maybe"}, "policy"),
        ({"axis": "bandwidth"}, "axis"),
        ({"schemes": ["prop", "bogus"]}, "schemes"),
        ({"values": [1.0, "x"]}, "values"),
        ({"master_seed": -1}, "master_seed"),
    ]
    for i, (data, key) in enumerate(cases):
        path = tmp_path / f"bad{i}.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ConfigError, match=key):
            load_config(path)


def test_load_config_not_json(tmp_path):
    path = tmp_path / "nope.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(path)
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="object"):
        load_config(path)


def test_solve_key_value_output(capsys):
    assert run_cli(["solve", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    lines = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert lines["scheme"] == "prop"
    assert lines["feasible"] == "true"
    assert lines["converged"] == "true"
    assert float(lines["ee"]) > 0.0
    assert float(lines["slack"]) > 0.0
    for k in range(1, 6):
        assert f"h_{k}" in lines and f"tau_{k}" in lines
    total_tau = sum(float(lines[f"tau_{k}"]) for k in range(1, 6))
    assert total_tau == pytest.approx(1.0, abs=1e-9)


def test_solve_json_output(capsys):
    assert run_cli(["solve", "--seed", "3", "--scheme", "equal_time", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["scheme"] == "equal_time"
    assert payload["feasible"] is True
    assert payload["taus"] == [0.2] * 5
    assert len(payload["gains"]) == 5
    assert payload["ee"] > 0.0


def test_solve_infeasible_exit_code(tmp_path, capsys):
    path = tmp_path / "steep.json"
    path.write_text('{"r_min": 12.0}')
    assert run_cli(["solve", "--config", str(path), "--seed", "3"]) == 2
    out = capsys.readouterr().out
    assert "feasible=false" in out
    assert "ee=" not in out


def test_sweep_writes_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = run_cli(["sweep", "--axis", "r_min", "--values", "0.5,1.0",
                  "--trials", "2", "--seed", "3", "--out", str(out)])
    assert rc == 0
    assert f"wrote {out}" in capsys.readouterr().out
    text = out.read_text(encoding="utf-8")
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 4
    row = lines[1].split(",")
    assert row[0] == "r_min" and row[1] == "0.5" and row[2] == "prop"
    assert row[6] == "2" and row[7] == "3"
    assert "\r" not in text


def test_sweep_empty_cells_when_nothing_feasible(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = run_cli(["sweep", "--axis", "p_max_dbm", "--values", "0",
                  "--schemes", "conventional", "--trials", "3",
                  "--seed", "9", "--out", str(out)])
    assert rc == 0
    lines = out.read_text(encoding="utf-8").strip().split("\n")
    assert lines[1] == "p_max_dbm,0,conventional,,,0,3,9"


def test_sweep_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--axis", "n_antennas", "--values", "1,2",
            "--trials", "2", "--seed", "5"]
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_config_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    out_cfg = tmp_path / "from_config.csv"
    cfg.write_text(json.dumps({
        "n_users": 2, "axis": "r_min", "values": [0.5],
        "n_trials": 2, "master_seed": 6, "out": str(out_cfg),
    }))
    assert run_cli(["sweep", "--config", str(cfg)]) == 0
    assert out_cfg.exists()
    # flags override the config file
    out_flag = tmp_path / "from_flag.csv"
    assert run_cli(["sweep", "--config", str(cfg), "--values", "1.0",
                    "--out", str(out_flag)]) == 0
    assert out_flag.read_text(encoding="utf-8").split("\n")[1].split(",")[1] == "1"


def test_usage_errors_exit_one(tmp_path, capsys):
    assert run_cli([]) == 1
    assert run_cli(["warp"]) == 1
    assert run_cli(["sweep", "--values", "0.5"]) == 1  # missing axis
    assert run_cli(["sweep", "--axis", "r_min"]) == 1  # missing values
    assert run_cli(["sweep", "--axis", "r_min", "--values", "5:0:10"]) == 1
    assert run_cli(["sweep", "--axis", "r_min", "--values", "0.5",
                    "--schemes", "prop,bogus"]) == 1
    capsys.readouterr()


def test_config_errors_exit_one(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"bogus": 1}')
    assert run_cli(["solve", "--config", str(path)]) == 1
    assert "unknown config key: bogus" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert run_cli(["--help"]) == 0
    assert "solve" in capsys.readouterr().out


def test_io_failure_exits_three(tmp_path, capsys):
    missing_dir = tmp_path / "not_there" / "x.csv"
    rc = run_cli(["sweep", "--axis", "r_min", "--values", "0.5",
                  "--trials", "1", "--seed", "1", "--out", str(missing_dir)])
    assert rc == 3
    # an unreadable config file is an I/O failure too
    assert run_cli(["solve", "--config", str(tmp_path / "unknown.json")]) == 3
    capsys.readouterr()


def test_figures_writes_three_csvs(tmp_path, capsys):
    out_dir = tmp_path / "figs"
    rc = run_cli(["figures", "--trials", "2", "--seed", "3",
                  "--out-dir", str(out_dir)])
    assert rc == 0
    captured = capsys.readouterr().out
    for name, axis, n_values in (("fig2.csv", "p_max_dbm", 7),
                                 ("fig3.csv", "r_min", 6),
                                 ("fig4.csv", "n_antennas", 4)):
        path = out_dir / name
        assert path.exists()
        assert f"wrote {path}" in captured
        lines = path.read_text(encoding="utf-8").strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + n_values * 4
        assert all(line.split(",")[0] == axis for line in lines[1:])


@pytest.mark.skipif(HAVE_PLOT, reason="plot package installed; hook exercised elsewhere")
def test_figures_plot_flag_needs_plot_package(tmp_path, capsys):
    rc = run_cli(["figures", "--trials", "1", "--seed", "1",
                  "--out-dir", str(tmp_path / "figs"), "--plot"])
    assert rc == 1
    assert "pinchplot" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pinchsim", "solve", "--seed", "1"],
        capture_output=True, text=True, cwd=tmp_path, timeout=120,
    )
    assert proc.returncode == 0
    assert "scheme=prop" in proc.stdout
