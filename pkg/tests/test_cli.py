import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from slablens import cli
from slablens import config as cfgmod
from slablens.errors import ConfigError, ConvergenceError

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXAMPLE = os.path.join(ROOT, "configs", "default.json")

SMALL_TD = [
    "omega_grid.n_points=2000",
    'fig3.h_over_k00={"start": 0.0, "stop": 3.0, "num": 7}',
    "fig4.n_ev_panels=2",
    'fig4.x_over_lambda0={"start": -0.5, "stop": 0.5, "num": 11}',
]


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    rows = list(csv.reader(lines[1:]))
    return lines[0], rows[0], rows[1:]


def test_example_config_reproduces_defaults():
    with open(EXAMPLE) as fh:
        shipped = json.load(fh)
    assert shipped == cfgmod.DEFAULTS
    cfg = cfgmod.load_config(EXAMPLE)
    assert cfg["f0_hz"] == 1e10 and cfg["L_over_lambda0"] == 1.0
    assert cfg["z_offset_over_lambda0"] == 0.001
    assert cfg["window"]["Te_s"] == 1e-3 and cfg["omega_grid"]["n_points"] == 100000


def test_overrides_and_hash():
    a = cfgmod.load_config(None, ["fig2.delta_pp=[1e-6]", "threads=4"])
    assert a["fig2"]["delta_pp"] == [1e-6]
    b = cfgmod.load_config(None, ["fig2.delta_pp=[1e-6]"])
    assert cfgmod.config_hash(a) == cfgmod.config_hash(b)
    c = cfgmod.load_config(None, ["fig2.delta_pp=[1e-7]"])
    assert cfgmod.config_hash(a) != cfgmod.config_hash(c)
    assert len(cfgmod.config_hash(a)) == 16


@pytest.mark.parametrize("override", [
    "fig2.delta_pp=2", "nope=1", "f0_hz=-1", "window.Te_periods=5", "noequals",
    'material={"type": "dispersive_dng", "slope": 3}', "fig3.h_over_k00.stop=3.6",
    "resolution_table.times_s=[1e-11]",
])
def test_bad_config_exit_code(tmp_path, override):
    assert cli.main(["validate-config", "--override", override]) == cli.EXIT_CONFIG


def test_unreadable_config_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["validate-config", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["validate-config", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_CONFIG


def test_threads_resolution(monkeypatch):
    cfg = cfgmod.load_config()
    monkeypatch.setenv("SLABLENS_THREADS", "3")
    assert cli.resolve_threads(None, cfg) == 3
    assert cli.resolve_threads(2, cfg) == 2
    monkeypatch.setenv("SLABLENS_THREADS", "many")
    with pytest.raises(ConfigError):
        cli.resolve_threads(None, cfg)
    monkeypatch.delenv("SLABLENS_THREADS")
    assert cli.resolve_threads(None, cfg) == 1


def test_fig2_output_contract(tmp_path):
    assert cli.main(["fig2", "--out", str(tmp_path)]) == 0
    head, cols, rows = read_csv(tmp_path / "fig2.csv")
    cfg = cfgmod.load_config()
    assert head == f"# slablens fig2 config_hash={cfgmod.config_hash(cfg)}"
    assert cols == ["h_over_k00", "abs_value", "delta_pp"]
    assert len(rows) == 3 * 700
    for v in rows[0]:
        mant = v.split("e")[0].lstrip("-")
        assert len(mant.replace(".", "")) == 17
    vals = np.array(rows, dtype=float)
    first = vals[vals[:, 0] == vals[0, 0]]
    assert np.allclose(first[:, 1], 1.0, atol=1e-3)  # propagating limit
    _, mcols, mrows = read_csv(tmp_path / "fig2_markers.csv")
    m = np.array(mrows, dtype=float)
    assert np.allclose(m[:, 1], [2.5, 3.8, 5.0], rtol=2e-3)
    assert np.allclose(m[:, 3], m[:, 1], rtol=0.1)


def test_fig2_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["fig2", "--out", str(a)]) == 0
    assert cli.main(["fig2", "--out", str(b), "--threads", "2"]) == 0
    assert (a / "fig2.csv").read_bytes() == (b / "fig2.csv").read_bytes()


def test_resolution_table(tmp_path):
    assert cli.main(["resolution-table", "--out", str(tmp_path)]) == 0
    tab = json.loads((tmp_path / "resolution_table.json").read_text())
    inv = {row["R_e"]: row for row in tab["inverse"]}
    assert inv[1.0]["required_loss"] == 1.0 and inv[1.0]["required_time_s"] == pytest.approx(1e-10)
    assert inv[5.0]["required_time_s"] / 60 == pytest.approx(39, rel=0.02)
    for row in tab["time"]:
        assert row["R_e_of_dual_delta_pp"] == pytest.approx(row["R_e"], rel=1e-12)
    assert tab["config_hash"] == cfgmod.config_hash(cfgmod.load_config())


def test_field_map_vacuum_null(tmp_path):
    args = ["field-map", "--out", str(tmp_path), "--override", 'field_map.material={"type": "vacuum"}',
            "--override", "field_map.h_max_over_k00=40",
            "--override", 'field_map.x_over_lambda0={"start": -0.5, "stop": 0.5, "num": 5}',
            "--override", 'field_map.z_over_lambda0={"start": 0.5, "stop": 2.5, "num": 3}']
    assert cli.main(args) == 0
    _, cols, rows = read_csv(tmp_path / "field_map.csv")
    assert cols[:7] == ["x_over_lambda0", "z_over_lambda0", "region", "re_E", "im_E", "abs_E",
                        "reference_abs_E"]
    a = np.array([[float(r[5]), float(r[6])] for r in rows])
    assert np.allclose(a[:, 0], a[:, 1], rtol=1e-3)


def test_field_map_perfect_image_and_divergence(tmp_path):
    args = ["field-map", "--out", str(tmp_path),
            "--override", 'field_map.x_over_lambda0={"start": -0.25, "stop": 0.25, "num": 3}',
            "--override", 'field_map.z_over_lambda0={"start": 1.75, "stop": 2.5, "num": 2}',
            "--override", "field_map.divergence_delta_pp=[1e-4, 1e-6, 1e-8]"]
    assert cli.main(args) == 0
    _, cols, rows = read_csv(tmp_path / "field_map.csv")
    for r in rows:
        z = float(r[1])
        if r[2] == "perfect_image":
            assert z == 2.5 and float(r[5]) == pytest.approx(float(r[6]), rel=1e-3)
        else:
            assert r[2] == "divergent_outer"
            if float(r[0]) == 0.0:
                d = [float(v) for v in r[7:]]
                assert d[0] < d[1] < d[2]


def test_convergence_failure_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise ConvergenceError("forced")

    monkeypatch.setattr(cli, "evaluate_field", boom)
    assert cli.main(["field-map", "--out", str(tmp_path)]) == cli.EXIT_CONVERGENCE


def test_fig3_fig4_small(tmp_path):
    ov = sum((["--override", o] for o in SMALL_TD), [])
    assert cli.main(["fig3", "--out", str(tmp_path)] + ov) == 0
    _, cols, rows = read_csv(tmp_path / "fig3.csv")
    assert cols == ["h_over_k00", "normalized_abs_W", "t_s"]
    v = np.array(rows, dtype=float)
    for t in np.unique(v[:, 2]):
        assert v[v[:, 2] == t, 1].max() == 1.0
    assert cli.main(["fig4", "--out", str(tmp_path / "b"), "--threads", "2"] + ov) == 0
    assert cli.main(["fig4", "--out", str(tmp_path / "c")] + ov) == 0
    assert (tmp_path / "b" / "fig4.csv").read_bytes() == (tmp_path / "c" / "fig4.csv").read_bytes()
    _, mcols, mrows = read_csv(tmp_path / "c" / "fig4_markers.csv")
    assert mcols[2] == "predicted_delta_x_over_lambda0"
    assert [round(float(r[2]), 2) for r in mrows] == [0.37, 0.32, 0.28]


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "slablens.cli", "validate-config"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["config"]["f0_hz"] == 1e10
