"""CLI tests: subcommands, formats, provenance, and exit codes."""

import json
import subprocess
import sys

import numpy as np
import pandas as pd
import pytest

from sigmmd.cli import main
from sigmmd.config import two_sample_config_from_dict


def write_cfg(tmp_path, name, payload):
    f = tmp_path / name
    f.write_text(json.dumps(payload))
    return str(f)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


SIM_CFG = {"spec": {"model": {"kind": "scaled_bm", "sigma": 0.3}, "n_steps": 6,
                    "seed": 4},
           "n_paths": 3}


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_json_portable_array(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "sim.json", SIM_CFG)
    code, out, _ = run(capsys, ["simulate", "--config", cfg])
    assert code == 0
    payload = json.loads(out)
    assert isinstance(payload, list) and len(payload) == 3
    for entry in payload:
        assert set(entry) == {"dim", "times", "values"}
        assert entry["dim"] == 1
        assert len(entry["times"]) == 7
        assert all(len(row) == 1 for row in entry["values"])


def test_simulate_seed_override_and_determinism(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "sim.json", SIM_CFG)
    _, base, _ = run(capsys, ["simulate", "--config", cfg])
    _, again, _ = run(capsys, ["simulate", "--config", cfg])
    assert base == again
    _, other, _ = run(capsys, ["simulate", "--config", cfg, "--seed", "99"])
    assert json.loads(other) != json.loads(base)


def test_simulate_csv_with_provenance_comment(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "sim.json", SIM_CFG)
    out_file = tmp_path / "paths.csv"
    code, _, _ = run(capsys, ["simulate", "--config", cfg, "--format", "csv",
                              "--out", str(out_file)])
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0].startswith("# {")
    prov = json.loads(lines[0][2:])
    assert prov["command"] == "simulate" and prov["package"] == "sigmmd"
    assert lines[1] == "path,time,c0"
    assert len(lines) == 2 + 3 * 7
    df = pd.read_csv(out_file, comment="#")
    assert list(df.columns) == ["path", "time", "c0"]


def test_simulate_multichannel(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "sim.json", {
        "spec": [{"model": {"kind": "gbm"}, "n_steps": 5},
                 {"model": {"kind": "ou"}, "n_steps": 5}],
        "n_paths": 2})
    code, out, _ = run(capsys, ["simulate", "--config", cfg])
    assert code == 0
    payload = json.loads(out)
    assert payload[0]["dim"] == 3  # time channel + two model channels


# ---------------------------------------------------------------------------
# test
# ---------------------------------------------------------------------------

TEST_CFG = {
    "x": {"sim": {"model": {"kind": "gbm"}, "n_steps": 12, "seed": 0},
          "n_paths": 12},
    "y": {"sim": {"model": {"kind": "ou"}, "n_steps": 12, "seed": 1},
          "n_paths": 12},
    "test": {"statistic": {"estimator": "unbiased",
                           "kernel": {"kind": "truncated", "depth": 4}},
             "null_method": "permutation", "B": 99, "seed": 0,
             "pipeline": {"steps": [{"kind": "time_augment"}]}}}


def test_test_command_json_result(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "t.json", TEST_CFG)
    code, out, _ = run(capsys, ["test", "--config", cfg])
    assert code == 0
    res = json.loads(out)
    assert res["reject"] is True
    assert res["p_value"] <= 0.05
    assert res["null_method"] == "permutation"
    assert res["statistic"] > res["threshold"]
    # provenance carries the fully resolved test config
    back = two_sample_config_from_dict(res["provenance"]["config"]["test"])
    assert back.B == 99 and back.statistic.estimator == "unbiased"


def test_test_command_csv_and_seed_override(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "t.json", TEST_CFG)
    code, out, _ = run(capsys, ["test", "--config", cfg, "--format", "csv",
                                "--seed", "7"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# {")
    assert lines[1].split(",")[:4] == ["statistic", "threshold", "p_value", "reject"]
    row = lines[2].split(",")
    assert row[8] == "7"  # seed column reflects the override


def test_test_command_from_path_files(tmp_path, capsys):
    sim_x = write_cfg(tmp_path, "sx.json", SIM_CFG)
    x_file = tmp_path / "x.json"
    code, _, _ = run(capsys, ["simulate", "--config", sim_x, "--out", str(x_file)])
    assert code == 0
    cfg = write_cfg(tmp_path, "t.json", {
        "x": {"file": str(x_file)},
        "y": {"file": str(x_file)},
        "test": {"statistic": {"estimator": "biased",
                               "kernel": {"kind": "truncated", "depth": 3}},
                 "null_method": "permutation", "B": 19}})
    code, out, _ = run(capsys, ["test", "--config", cfg])
    assert code == 0
    res = json.loads(out)
    assert res["reject"] is False
    assert res["statistic"] == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# power
# ---------------------------------------------------------------------------

POWER_CFG = {
    "spec_x": {"model": {"kind": "scaled_bm", "sigma": 0.2}, "n_steps": 6},
    "spec_y": {"model": {"kind": "scaled_bm", "sigma": 0.6}, "n_steps": 6},
    "scalings": [1.0], "batch_sizes": [8], "estimators": ["biased", "unbiased"],
    "kernel": {"kind": "truncated", "depth": 3},
    "pipeline": {"steps": [{"kind": "time_augment"}]},
    "B": 30, "reps": 1, "pool_factor": 2, "seed": 3}


def test_power_csv_columns(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "p.json", POWER_CFG)
    out_file = tmp_path / "rows.csv"
    code, _, _ = run(capsys, ["power", "--config", cfg, "--format", "csv",
                              "--out", str(out_file)])
    assert code == 0
    df = pd.read_csv(out_file, comment="#")
    assert list(df.columns) == ["scaling", "batch_size", "estimator", "type1",
                                "type2", "std", "reps", "seed"]
    assert len(df) == 2
    assert set(df["estimator"]) == {"biased", "unbiased"}
    assert ((df["type1"] >= 0) & (df["type1"] <= 1)).all()
    assert ((df["type2"] >= 0) & (df["type2"] <= 1)).all()


def test_power_json_rows(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "p.json", POWER_CFG)
    code, out, _ = run(capsys, ["power", "--config", cfg])
    assert code == 0
    payload = json.loads(out)
    assert len(payload["rows"]) == 2
    assert payload["provenance"]["command"] == "power"
    assert payload["rows"][0]["batch_size"] == 8


# ---------------------------------------------------------------------------
# levels
# ---------------------------------------------------------------------------

LEVELS_CFG = {
    "x": {"sim": {"model": {"kind": "scaled_bm", "sigma": 0.2}, "n_steps": 6,
                  "seed": 0}, "n_paths": 10},
    "y": {"sim": {"model": {"kind": "scaled_bm", "sigma": 0.5}, "n_steps": 6,
                  "seed": 1}, "n_paths": 10},
    "depth": 3, "B": 20, "n1": 4, "n2": 4}


def test_levels_json(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "l.json", LEVELS_CFG)
    code, out, _ = run(capsys, ["levels", "--config", cfg])
    assert code == 0
    payload = json.loads(out)
    rows = payload["rows"]
    assert len(rows) == 2 * 4
    assert {r["hypothesis"] for r in rows} == {"null", "alt"}
    level0 = [r for r in rows if r["level"] == 0]
    assert all(r["mean"] == 0.0 and r["log10_abs_mean"] is None for r in level0)
    nonzero = [r for r in rows if r["level"] > 0 and r["mean"] != 0.0]
    for r in nonzero:
        assert r["log10_abs_mean"] == pytest.approx(np.log10(abs(r["mean"])))


def test_levels_csv(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "l.json", LEVELS_CFG)
    code, out, _ = run(capsys, ["levels", "--config", cfg, "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "hypothesis,level,mean,std,q05,q95,log10_abs_mean"
    assert len(lines) == 2 + 8


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def make_price_csv(tmp_path, n=41, seed=0):
    rng = np.random.default_rng(seed)
    dates = pd.date_range("2021-01-01", periods=n, freq="D")
    prices = 50.0 * np.cumprod(1.0 + 0.02 * rng.normal(size=n))
    f = tmp_path / "prices.csv"
    pd.DataFrame({"date": dates.strftime("%Y-%m-%d"), "price": prices}) \
        .to_csv(f, index=False)
    return str(f)


def test_ingest_writes_path_files_and_summary(tmp_path, capsys):
    src = make_price_csv(tmp_path)
    cfg = write_cfg(tmp_path, "i.json", {"source": src, "window": 10,
                                         "ratio": 0.5})
    out_base = tmp_path / "ret.json"
    code, out, _ = run(capsys, ["ingest", "--config", cfg, "--out", str(out_base)])
    assert code == 0
    summary = json.loads(out)
    assert summary["report"]["n_calibration_windows"] == 2
    assert summary["report"]["n_test_windows"] == 2
    from sigmmd.pathio import read_paths
    cal = read_paths(summary["calibration_file"])
    tst = read_paths(summary["test_file"])
    assert len(cal) == 2 and len(tst) == 2
    assert cal[0].n_points == 11  # cumulative paths start at zero
    assert cal[0].values[0, 0] == 0.0


def test_ingest_json_requires_out(tmp_path, capsys):
    src = make_price_csv(tmp_path)
    cfg = write_cfg(tmp_path, "i.json", {"source": src, "window": 10})
    code, _, err = run(capsys, ["ingest", "--config", cfg])
    assert code == 2
    assert "needs --out" in err


def test_ingest_csv_format(tmp_path, capsys):
    src = make_price_csv(tmp_path)
    cfg = write_cfg(tmp_path, "i.json", {"source": src, "window": 10})
    out_file = tmp_path / "win.csv"
    code, _, _ = run(capsys, ["ingest", "--config", cfg, "--format", "csv",
                              "--out", str(out_file)])
    assert code == 0
    df = pd.read_csv(out_file, comment="#")
    assert list(df.columns) == ["split", "window", "step", "price"]
    assert set(df["split"]) == {"calibration", "test"}
    assert len(df) == 40


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_exit_code_2_on_config_errors(tmp_path, capsys):
    code, _, err = run(capsys, ["test", "--config", str(tmp_path / "missing.json")])
    assert code == 2 and "config error" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, ["test", "--config", str(bad)])
    assert code == 2
    cfg = write_cfg(tmp_path, "unk.json", dict(SIM_CFG, extra=1))
    code, _, err = run(capsys, ["simulate", "--config", cfg])
    assert code == 2 and "unknown keys" in err


def test_exit_code_3_on_data_errors(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "t.json", {
        "x": {"file": str(tmp_path / "nope.json")},
        "y": {"file": str(tmp_path / "nope.json")}})
    code, _, err = run(capsys, ["test", "--config", cfg])
    assert code == 3 and "data error" in err
    src = make_price_csv(tmp_path, n=5)
    icfg = write_cfg(tmp_path, "i.json", {"source": src, "window": 100})
    code, _, err = run(capsys, ["ingest", "--config", icfg, "--format", "csv"])
    assert code == 3


def test_exit_code_4_on_numerical_failure(tmp_path, capsys):
    # huge-amplitude paths overflow the PDE solve
    rng = np.random.default_rng(0)
    times = np.linspace(0.0, 1.0, 10).tolist()
    entries = [{"dim": 1, "times": times,
                "values": (1e10 * rng.normal(size=(10, 1))).tolist()}
               for _ in range(3)]
    pf = tmp_path / "huge.json"
    pf.write_text(json.dumps(entries))
    cfg = write_cfg(tmp_path, "t.json", {
        "x": {"file": str(pf)}, "y": {"file": str(pf)},
        "test": {"statistic": {"estimator": "biased",
                               "kernel": {"kind": "pde", "dyadic_order": 0}},
                 "B": 5}})
    code, _, err = run(capsys, ["test", "--config", cfg])
    assert code == 4 and "numerical error" in err


def test_argparse_rejects_bad_flags(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", "x.json", "--format", "xml"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# installed entry points
# ---------------------------------------------------------------------------

def test_module_and_script_entry_points(tmp_path):
    out = subprocess.run([sys.executable, "-m", "sigmmd", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip().endswith("0.1.0")
    script = subprocess.run(["sigmmd", "--version"], capture_output=True, text=True)
    assert script.returncode == 0
