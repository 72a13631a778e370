import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwf import cli
from qwf.output import csv_text, fmt, manifest_path_for, sha256_text


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_cells_round_trip(x):
    assert float(fmt(x)) == x


def test_fmt_other_types():
    assert fmt(3) == "3" and fmt(np.int64(-2)) == "-2" and fmt(True) == "1"
    assert fmt(float("nan")) == "nan" and fmt(None) == ""
    assert csv_text(["a", "b"], [(1, 0.1)]) == "a,b\n1,0.10000000000000001\n"


def test_manifest_names(tmp_path):
    assert manifest_path_for(tmp_path / "x.csv").name == "x.manifest.json"
    assert manifest_path_for(tmp_path / "dir") == tmp_path / "dir" / "manifest.json"


def run(argv):
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return exc.code


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), np.array([[float(c) for c in line.split(",")] for line in lines[1:]])


def test_fronts_json(tmp_path, capsys):
    assert run(["fronts", "--g", "0.5"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["regime"] == "nested_cones"
    assert data["v_e"] == pytest.approx(3.520345186)


def test_evolve_csv_and_manifest(tmp_path):
    out = tmp_path / "psi.csv"
    assert run(["evolve", "--g", "0.25", "--t", "30", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["n", "re_psi", "im_psi", "p"]
    assert np.sum(rows[:, 3]) == pytest.approx(1.0, abs=1e-12)
    manifest = json.loads((tmp_path / "psi.manifest.json").read_text())
    assert manifest["files"][str(out)] == sha256_text(out.read_text())
    assert manifest["parameters"]["t"] == 30.0 and manifest["ring_size"] > 0
    assert manifest["engine_version"]


def test_outputs_are_deterministic(tmp_path, monkeypatch):
    bodies = []
    for threads in ("1", "3"):
        monkeypatch.setenv("QWF_THREADS", threads)
        out = tmp_path / f"loc{threads}.csv"
        assert run(["localization", "--scan", "g", "--g", "0.2:0.3:0.05", "--t", "200", "--out", str(out)]) == 0
        bodies.append(out.read_bytes())
    assert bodies[0] == bodies[1]


def test_localization_columns(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["localization", "--scan", "t", "--t", "1:5:1", "--g", "0", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["t", "ipr", "entropy", "r0", "t_r0"]
    assert rows.shape == (5, 5)


def test_staircase_columns(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["staircase", "--g", "0", "--t", "3000", "--steps", "3", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["s", "h_s", "w_s", "area", "h_pred", "w_pred"]
    assert rows.shape == (3, 6)


def test_spinchain_and_asymptotics(tmp_path):
    out = tmp_path / "sc.csv"
    assert run(["spinchain", "--g", "0.125", "--t", "40", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[-1] == "abs_diff" and rows[:, -1].max() < 1e-12
    out = tmp_path / "a.csv"
    assert run(["asymptotics", "--g", "0.25", "--front", "origin", "--t", "500", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["z", "predicted_abs_psi", "exact_abs_psi"]
    assert run(["asymptotics", "--g", "0.1", "--front", "origin", "--t", "500"]) == 2


def test_cdf_directory(tmp_path):
    out = tmp_path / "cdf"
    assert run(["cdf", "--g", "0", "--t", "100,200", "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"cdf_t100.csv", "cdf_t200.csv", "collapse.csv", "collapse.json", "manifest.json"} <= names
    header, rows = read_csv(out / "cdf_t100.csv")
    assert header == ["n", "u", "Phi", "Phi_theory"]


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("g = 0.5\nt = 20\n")
    assert run(["evolve", "--config", str(cfg)]) == 0
    direct = capsys.readouterr().out
    assert run(["evolve", "--g", "0.5", "--t", "20"]) == 0
    assert capsys.readouterr().out == direct
    # the command line wins over the file
    assert run(["evolve", "--config", str(cfg), "--t", "10"]) == 0
    assert capsys.readouterr().out != direct


@pytest.mark.parametrize("argv", [
    [],
    ["nonsense"],
    ["evolve", "--t", "-1"],
    ["evolve", "--t", "abc"],
    ["evolve", "--couplings", "0.5,1"],
    ["staircase", "--steps", "0"],
    ["staircase", "--g", "0", "--front", "internal-right"],
    ["reproduce", "fig9"],
])
def test_usage_errors_exit_2(argv):
    assert run(argv) == 2


def test_io_errors_exit_1(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["fronts", "--out", str(blocker / "inside.json")]) == 1
    assert run(["evolve", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_reproduce_fig2(tmp_path):
    out = tmp_path / "fig2"
    assert run(["reproduce", "fig2", "--out", str(out)]) == 0
    header, rows = read_csv(out / "fig2_g0.5.csv")
    assert header == ["q", "omega", "v", "v_over_ve"]
    assert np.max(np.abs(rows[:, 3])) == pytest.approx(1.0, abs=1e-6)
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["files"]) == 4


def test_parse_range():
    assert np.allclose(cli.parse_range("0.1:0.3:0.1"), [0.1, 0.2, 0.3])
    assert np.allclose(cli.parse_range("1,2.5"), [1, 2.5])
    with pytest.raises(ValueError):
        cli.parse_range("1:2")
