import json
import math
import sys

import numpy as np
import pytest

from normesh import _parallel
from normesh.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_params
from normesh.mesh import read_json

OMEGA = "omega=1.0471975511965976"


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_row(capsys):
    code, out, _ = _run(capsys, "table")
    assert code == EXIT_OK
    assert any("β³" in line and "N2³" in line and "solid lune" in line
               for line in out.splitlines())


def test_gen_segment_example(capsys, tmp_path):
    path = tmp_path / "m.json"
    code, out, _ = _run(capsys, "gen", "--kind", "circular_segment", "--param", OMEGA,
                        "--n", "4", "--m", "2", "--out", str(path), "--csv",
                        str(tmp_path / "p.csv"))
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["grid_shape"] == [9, 17]
    assert abs(summary["c"] - 2 * math.sqrt(2)) <= 1e-12
    assert len(np.loadtxt(tmp_path / "p.csv", delimiter=",")) == summary["card"]


def test_dim_sphere(capsys):
    code, out, _ = _run(capsys, "dim", "--kind", "sphere", "--n", "3")
    assert code == EXIT_OK and json.loads(out)["numeric_rank"] == 16


def test_round_trip_and_verify(capsys, tmp_path):
    path = tmp_path / "m.json"
    _run(capsys, "gen", "--kind", "planar_lune", "--example", "--n", "2", "--m", "2",
         "--dedup", "--out", str(path))
    text = path.read_text()
    mesh = read_json(path)
    from normesh.mesh import write_json
    write_json(mesh, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_text() == text
    rep = tmp_path / "r.json"
    code, out, _ = _run(capsys, "verify", "--mesh", str(path), "--trials", "200", "--seed",
                        "1", "--ref-m", "8", "--lp", "--probe-m", "8", "--report", str(rep))
    assert code == EXIT_OK
    data = json.loads(rep.read_text())
    assert data["pass"] is True and data["lp_constant"] <= 4.0


def test_verify_failure_exit_code(capsys, tmp_path, monkeypatch):
    path = tmp_path / "m.json"
    _run(capsys, "gen", "--kind", "disk", "--n", "2", "--m", "2", "--out", str(path))
    module = sys.modules["normesh.certify"]
    monkeypatch.setattr(module, "_passes", lambda value, bound: False)
    code, _, _ = _run(capsys, "verify", "--mesh", str(path), "--trials", "20")
    assert code == EXIT_FAIL


def test_verify_non_determining_mesh_exit_code(capsys, tmp_path):
    # circle points relabelled as a disk mesh cannot determine P_2 on the disk
    path = tmp_path / "m.json"
    _run(capsys, "gen", "--kind", "circle", "--n", "2", "--m", "2", "--out", str(path))
    data = json.loads(path.read_text())
    data["spec"] = {"kind": "disk", "params": {}}
    path.write_text(json.dumps(data))
    code, _, err = _run(capsys, "verify", "--mesh", str(path), "--trials", "20")
    assert code == EXIT_FAIL and "certification failed" in err


def test_fekete_and_lsq(capsys, tmp_path):
    path = tmp_path / "m.json"
    _run(capsys, "gen", "--kind", "disk", "--n", "3", "--m", "2", "--dedup", "--out", str(path))
    code, out, _ = _run(capsys, "fekete", "--mesh", str(path), "--out", str(tmp_path / "f.csv"),
                        "--report", str(tmp_path / "f.json"))
    assert code == EXIT_OK and json.loads(out)["count"] == 10
    assert np.loadtxt(tmp_path / "f.csv", delimiter=",").shape == (10, 2)
    for fn in ("one", "coord1", "runge"):
        code, out, _ = _run(capsys, "lsq", "--mesh", str(path), "--function", fn)
        s = json.loads(out)
        assert code == EXIT_OK and s["bound_holds"] is True
        if fn != "runge":
            assert s["residual"] <= 1e-12


@pytest.mark.parametrize("argv", [
    ["gen", "--kind", "hexagon", "--n", "2", "--m", "2"],
    ["gen", "--kind", "circular_sector", "--param", "omega=60deg", "--n", "2", "--m", "2"],
    ["gen", "--kind", "circular_sector", "--param", "omega=60", "--n", "2", "--m", "2"],
    ["gen", "--kind", "circular_sector", "--param", "omega", "--n", "2", "--m", "2"],
    ["gen", "--kind", "disk", "--n", "2", "--m", "1"],
    ["gen", "--kind", "disk", "--n", "0", "--m", "2"],
    ["gen", "--kind", "circular_sector", "--n", "2", "--m", "2"],
    ["verify", "--mesh", "/nonexistent/mesh.json"],
    ["frobnicate"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == EXIT_USAGE


def test_parse_params():
    p = parse_params(["omega=1.0", "V=[0.1,0,-0.2]", "axis=x"])
    assert p == {"omega": 1.0, "V": [0.1, 0, -0.2], "axis": "x"}


def test_threads_env(monkeypatch):
    monkeypatch.setenv("NORMESH_THREADS", "3")
    assert _parallel.workers() == 3
    for raw in ("0", "", "junk", "-2"):
        monkeypatch.setenv("NORMESH_THREADS", raw)
        assert _parallel.workers() >= 1
    monkeypatch.setenv("NORMESH_THREADS", "4")
    X = np.arange(10.0).reshape(-1, 1)
    out = _parallel.chunked_rows(lambda B: B[:, 0] * 2, X, chunk=3)
    np.testing.assert_array_equal(out, 2 * X[:, 0])
