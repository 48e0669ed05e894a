import json

import numpy as np
import pytest

from peakon_lab import __version__
from peakon_lab.cli import main
from peakon_lab.io import (
    FIELD_COLUMNS,
    SWEEP_COLUMNS,
    TRAJECTORY_COLUMNS,
    ConfigError,
    fmt,
    parse_config,
    read_csv,
)


def write_cfg(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def run(*argv):
    return main([str(a) for a in argv])


# --- solve ------------------------------------------------------------------


def test_solve_writes_outputs(tmp_path):
    cfg = write_cfg(tmp_path, {"t_final": 0.01})
    out = tmp_path / "run"
    assert run("solve", "--config", cfg, "--out", out) == 0
    header, data = read_csv(out / "trajectory.csv")
    assert header == list(TRAJECTORY_COLUMNS)
    assert data[-1, 0] == 0.01
    fh, fd = read_csv(out / f"fields_{len(data) - 1}.csv")
    assert fh == list(FIELD_COLUMNS) and fd.shape == (128, 5)
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "solve" and man["tool_version"] == __version__
    assert man["seed"] == 0
    assert man["config"]["c_s"] > 0 and man["config"]["dt"] is None


def test_solve_zero_data(tmp_path):
    cfg = write_cfg(tmp_path, {"u0": "zero", "v0": "zero", "t_final": 0.05})
    assert run("solve", "--config", cfg, "--out", tmp_path / "z") == 0
    _, data = read_csv(tmp_path / "z" / "trajectory.csv")
    assert np.all(data[:, 1:] == 0)


def test_solve_missing_config(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert run("solve", "--config", missing, "--out", tmp_path / "o") == 1
    assert str(missing) in capsys.readouterr().err


@pytest.mark.parametrize("bad", [{"delta0": 2.0}, {"bogus": 1}, {"u0": {"tan": [[1, 1]]}},
                                 {"u0": {"cos": [[100, 1.0]]}}, {"t_final": 5.0}])
def test_solve_config_errors(tmp_path, bad):
    cfg = write_cfg(tmp_path, bad)
    assert run("solve", "--config", cfg, "--out", tmp_path / "o") == 1


def test_solve_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run("solve", "--config", p, "--out", tmp_path / "o") == 1


def test_solve_blowup_keeps_partial(tmp_path):
    cfg = write_cfg(tmp_path, {"u0": {"cos": [[1, 3.0]]}, "t_final": 3.0, "override_lifespan": True})
    out = tmp_path / "b"
    assert run("solve", "--config", cfg, "--out", out) == 2
    assert (out / "manifest.json").exists()
    _, data = read_csv(out / "trajectory.csv")
    assert len(data) >= 1 and data[-1, 0] < 3.0


def test_smooth_reference_h1_constant(tmp_path):
    cfg = write_cfg(tmp_path, {})
    out = tmp_path / "ref"
    assert run("solve", "--config", cfg, "--out", out) == 0
    header, data = read_csv(out / "trajectory.csv")
    h1 = data[:, header.index("H1")]
    assert np.max(np.abs(h1 - h1[0])) <= 1e-6 * abs(h1[0])


def test_pt_and_peakon_data(tmp_path):
    cfg = write_cfg(tmp_path, {"u0": {"peakon": {"c": 0.5}}, "v0": "pt", "t_final": 0.001,
                               "override_lifespan": True, "eps": 0.05})
    assert run("solve", "--config", cfg, "--out", tmp_path / "p") == 0


def test_outputs_are_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, {"t_final": 0.01, "eps": 0.1})
    for name in ("a", "b"):
        assert run("solve", "--config", cfg, "--out", tmp_path / name) == 0
    for f in ("trajectory.csv", "fields_0.csv", "fields_1.csv", "manifest.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_manifest_reload_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, {"t_final": 0.01, "s": 2.75})
    out = tmp_path / "m"
    run("solve", "--config", cfg, "--out", out)
    man = json.loads((out / "manifest.json").read_text())
    reloaded = parse_config(man["config"]).resolved()
    dump = lambda d: json.dumps(d, sort_keys=True)  # noqa: E731
    assert dump(reloaded) == dump(man["config"])


def test_floats_round_trip():
    for x in (0.1, 1 / 3, np.pi, 1e-300, -2.5e17):
        assert float(fmt(x)) == x


def test_parse_config_rejects_bad_seed():
    with pytest.raises(ConfigError):
        parse_config({"seed": -1})


# --- classify ---------------------------------------------------------------


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_classify_gamma(capsys):
    assert run("classify", "--gamma", 3.5, 1.0) == 0
    out = _json_out(capsys)
    assert out["region"] == "A1" and out["exponent"] == 1.0 and "eps_used" in out


def test_classify_mu(capsys):
    assert run("classify", "--mu", 3.5, 2.0) == 0
    out = _json_out(capsys)
    assert out["region"] == "B5" and out["exponent"] == 0.5


def test_classify_out_of_scope(capsys):
    assert run("classify", "--gamma", 2.0, 1.0) == 1
    assert "requires s > 5/2" in capsys.readouterr().err


def test_classify_eps(capsys):
    assert run("classify", "--gamma", 2.8, 1.4, "--eps", 0.01) == 0
    assert _json_out(capsys)["eps_used"] == 0.01


def test_classify_needs_point():
    assert run("classify", "--gamma", 3.0) == 1


def test_classify_table(capsys):
    assert run("classify", "--table", "--mu", "--resolution", 10) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "s,r_or_p,region,exponent"
    assert len(lines) > 50
    assert all(row.split(",")[2].startswith("B") for row in lines[1:])


# --- sweep ------------------------------------------------------------------


def test_sweep_a1(tmp_path):
    cfg = write_cfg(tmp_path, {"s": 3.0, "r": 1.75})
    out = tmp_path / "sw"
    assert run("sweep", "--config", cfg, "--out", out) == 0
    header, data = read_csv(out / "sweep.csv")
    assert header == list(SWEEP_COLUMNS) and data.shape == (4, 4)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["slope"] >= 0.9 and summary["pass"] is True
    assert (out / "manifest.json").exists()


def test_sweep_single_delta(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"r": 1.75, "deltas": [0.01]})
    assert run("sweep", "--config", cfg, "--out", tmp_path / "sw") == 1
    assert "need >= 3 deltas" in capsys.readouterr().err


def test_sweep_blowup(tmp_path):
    cfg = write_cfg(tmp_path, {"r": 1.75, "blowup_factor": 0.01})
    out = tmp_path / "sw"
    assert run("sweep", "--config", cfg, "--out", out) == 2
    header, _ = read_csv(out / "sweep.csv")
    assert header == list(SWEEP_COLUMNS)


def test_sweep_needs_r_or_p(tmp_path):
    cfg = write_cfg(tmp_path, {"r": 1.0, "p": 0.5})
    assert run("sweep", "--config", cfg, "--out", tmp_path / "sw") == 1


# --- validate ---------------------------------------------------------------


@pytest.mark.parametrize("argv", [("validate", "pt"), ("validate", "--suite", "oracle")])
def test_validate_suites(argv, capsys):
    assert run(*argv) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_validate_failure_exit_code(monkeypatch, capsys):
    from peakon_lab import validation

    fake = lambda: [validation.Check("always off", 1.0, 0.5, False)]  # noqa: E731
    monkeypatch.setitem(validation.SUITES, "pt", fake)
    assert run("validate", "pt") == 3
    assert "FAIL" in capsys.readouterr().out


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as info:
        run("validate", "bogus")
    assert info.value.code == 1
