import json

import pytest

from adiasweep.cli import main
from adiasweep.config import (
    ConfigError,
    merge_settings,
    parse_config_file,
    sweep_config_from_settings,
)

SMALL_SWEEP = [
    "sweep",
    "--model", "two-level",
    "--k", "0",
    "--tmin", "15",
    "--tmax", "20",
    "--ppd", "10",
    "--samples", "16",
    "--rtol", "1e-9",
    "--atol", "1e-11",
]


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        """
        # comment line
        model = two-level
        k = 1e-3   # trailing comment
        t_min = 30
        samples = 32
        """
    )
    values = parse_config_file(str(cfg))
    assert values["model"] == "two-level"
    assert values["k"] == "1e-3"
    settings = merge_settings(values, {"samples": 64, "t_max": 60.0})
    assert settings["samples"] == 64  # CLI override wins
    assert settings["k"] == 1e-3
    sweep_cfg = sweep_config_from_settings(settings)
    assert sweep_cfg.model.k == 1e-3
    assert sweep_cfg.typical.samples == 64


def test_config_file_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mode = two-level\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_file(str(cfg))


def test_config_file_rejects_bad_value(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("model = two-level\nk = abc\n")
    with pytest.raises(ConfigError, match="invalid value"):
        merge_settings(parse_config_file(str(cfg)), {})


def test_sweep_csv_end_to_end(tmp_path, capsys):
    out = tmp_path / "records.csv"
    cache = tmp_path / "cache"
    argv = SMALL_SWEEP + ["--out", str(out), "--cache-dir", str(cache)]
    assert main(argv) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "T,eps,eps_bar_T,eps_bar_1,eps_bar_2,ratio1,ratio2,epsT2,slope,norm_drift"
    assert len(lines) >= 3
    # second run hits the cache and produces the identical file
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_sweep_json_output(tmp_path):
    out = tmp_path / "records.json"
    argv = SMALL_SWEEP + [
        "--out", str(out), "--format", "json", "--cache-dir", str(tmp_path / "c"),
    ]
    assert main(argv) == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1
    assert doc["records"]
    assert doc["estimates"]["order-1"]["source"] == "model"


def test_sweep_config_file_with_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "r.csv"
    cfg.write_text(
        "model = two-level\nk = 0\nt_min = 15\nt_max = 20\npoints_per_decade = 10\n"
        f"samples = 16\nrtol = 1e-9\natol = 1e-11\nout = {out}\nno_cache = true\n"
    )
    assert main(["sweep", "--config", str(cfg), "--tmax", "18"]) == 0
    assert out.exists()


def test_sweep_exit_code_on_config_error(capsys):
    assert main(["sweep", "--model", "two-level", "--tmin", "2", "--tmax", "50"]) == 1
    assert "configuration error" in capsys.readouterr().err


def test_sweep_exit_code_on_numerical_failure(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "model = two-level\nk = 0\nt_min = 15\nt_max = 16\nsamples = 16\n"
        f"max_steps = 20\nout = {tmp_path/'x.csv'}\nno_cache = true\n"
    )
    assert main(["sweep", "--config", str(cfg)]) == 2


def test_estimate_output(capsys):
    assert main(["estimate", "--model", "three-level-case2", "--k", "1e-3"]) == 0
    out = capsys.readouterr().out
    assert "b_n" in out
    assert "0.000000e+00" in out  # order-1 coefficient vanishes
    assert "approximate order-2 reference" in out


def test_estimate_rejects_unknown_model(capsys):
    with pytest.raises(SystemExit):  # argparse choices
        main(["estimate", "--model", "six-level"])


def test_schedule_dump(tmp_path):
    out = tmp_path / "sched.csv"
    assert main([
        "schedule-dump", "--family", "rational", "--k", "1e-3",
        "--points", "11", "--out", str(out),
    ]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "s,value,deriv1"
    assert len(lines) == 12
    s, value, d1 = (float(x) for x in lines[6].split(","))
    assert s == 0.5
    assert value == 0.25
    assert abs(d1) < 1e-12


def test_schedule_dump_exponential(tmp_path):
    out = tmp_path / "exp.csv"
    assert main([
        "schedule-dump", "--family", "exponential", "--k", "1e-2",
        "--points", "5", "--out", str(out),
    ]) == 0
    rows = out.read_text().splitlines()[1:]
    assert float(rows[0].split(",")[1]) == 0.0
    assert float(rows[-1].split(",")[1]) == 0.0


def test_check_single_fast_criterion(tmp_path, capsys):
    assert main(["check", "--only", "1", "--cache-dir", str(tmp_path / "c")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS")
    assert "analytic estimator" in out


def test_check_rejects_unknown_criterion(tmp_path, capsys):
    assert main(["check", "--only", "42", "--cache-dir", str(tmp_path / "c")]) == 1
