import csv
import json

import pytest

from lfembed.cli import main


@pytest.fixture
def matrix_csv(tmp_path):
    path = tmp_path / "matrix.csv"
    path.write_text("t0,a,b,c\n0,3,5,1/2\n3,0,2,7/2\n5,2,0,11/2\n1/2,7/2,11/2,0\n")
    return path


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_embed_matrix_rational(matrix_csv, tmp_path, capsys):
    rep = tmp_path / "r.json"
    code, _, _ = run(["embed", "--input", matrix_csv, "--basepoint", "t0", "--operators", "identity",
                      "--arith", "rational", "-r", rep], capsys)
    assert code == 0
    doc = json.loads(rep.read_text())
    assert doc["arith"] == "rational"
    assert doc["distortion"]["within_bounds"]
    from fractions import Fraction
    assert Fraction(doc["distortion"]["dist"]) <= 216


def test_embed_non_metric_exits_3_with_triple(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n0,1,10\n1,0,1\n10,1,0\n")
    code, _, err = run(["embed", "-i", bad], capsys)
    assert code == 3
    assert "triangle" in err and "'a', 'b', 'c'" in err


@pytest.mark.parametrize("args", [
    ["embed", "-i", "missing.csv"],
    ["embed", "--family", "grid", "--dim", "2"],
    ["embed", "--family", "grid", "--dim", "2", "--radius", "2", "--operators", "random"],
    ["embed", "--family", "grid", "--dim", "2", "--radius", "2", "--seed", "3"],
    ["embed"],
])
def test_input_errors_exit_2(args, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(args, capsys)
    assert code == 2 and err.startswith("error:")


def test_embed_twice_is_byte_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        e, r = tmp_path / f"e{k}.json", tmp_path / f"r{k}.json"
        code, _, _ = run(["embed", "--family", "random_graph", "-n", "30", "--p", "1/8", "--gen-seed", "4",
                          "--operators", "random", "--seed", "7", "-e", e, "-r", r, "--certify"], capsys)
        assert code == 0
        outs.append((e.read_bytes(), r.read_bytes()))
    assert outs[0] == outs[1]


def test_verify_grid_and_full_ledger(tmp_path, capsys):
    e, ledger = tmp_path / "e.json", tmp_path / "l.csv"
    assert run(["embed", "--family", "grid", "--dim", "2", "--radius", "2", "-e", e, "-r", tmp_path / "r.json"], capsys)[0] == 0
    code, out, _ = run(["verify", "--embedding", e, "--full-ledger", ledger], capsys)
    assert code == 0
    assert json.loads(out)["cases"]["ok"]
    rows = list(csv.reader(ledger.open()))
    assert len(rows) - 1 == 13 * 12 // 2
    assert all(r[-1] == "1" for r in rows[1:])


def test_verify_tampered_embedding_exits_4_naming_pair(tmp_path, capsys):
    e = tmp_path / "e.json"
    run(["embed", "--family", "grid", "--dim", "2", "--radius", "2", "-e", e, "-r", tmp_path / "r.json"], capsys)
    doc = json.loads(e.read_text())
    name = "(1, 0)"
    blk = next(iter(doc["image"][name]["blocks"].values()))
    first = next(iter(blk))
    blk[first] = "1000"
    e.write_text(json.dumps(doc))
    code, _, err = run(["verify", "--embedding", e], capsys)
    assert code == 4
    assert "FAILED pair" in err and "'(1, 0)'" in err


def test_verify_from_inputs(matrix_csv, capsys):
    code, out, _ = run(["verify", "-i", matrix_csv, "--operators", "half", "--include-ledger"], capsys)
    assert code == 0 and len(json.loads(out)["cases"]["ledger"]) == 6


def test_auto_arith_switches_to_float_beyond_64_points(capsys):
    code, out, _ = run(["embed", "--family", "random_tree", "-n", "70", "--gen-seed", "1"], capsys)
    assert code == 0 and json.loads(out)["arith"] == "float"
    code, out, _ = run(["embed", "--family", "random_tree", "-n", "70", "--gen-seed", "1", "--arith", "rational"], capsys)
    assert code == 0 and json.loads(out)["arith"] == "rational"


def test_generate_grid(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(["generate", "--family", "grid", "--dim", "2", "--radius", "2", "-o", out], capsys)[0] == 0
    assert len(json.loads(out.read_text())["points"]) == 13
    code, text, _ = run(["generate", "--family", "random_tree", "-n", "5", "--seed", "2"], capsys)
    assert code == 0 and json.loads(text)["kind"] == "metric_space"
    assert run(["generate", "--family", "random_tree", "-n", "5"], capsys)[0] == 2


def test_amalgamate_two_parts(tmp_path, matrix_csv, capsys):
    g = tmp_path / "g.json"
    run(["generate", "--family", "grid", "--dim", "1", "--radius", "2", "-o", g], capsys)
    out, cert = tmp_path / "am.json", tmp_path / "cert.json"
    assert run(["amalgamate", matrix_csv, g, "-o", out, "-c", cert], capsys)[0] == 0
    c = json.loads(cert.read_text())
    assert c["metric_valid"] and [p["max_deviation"] for p in c["parts"]] == ["0", "0"]
    assert len(json.loads(out.read_text())["points"]) == 4 + 5


def test_amalgamate_single_part_equals_part(tmp_path, matrix_csv, capsys):
    out = tmp_path / "am.json"
    assert run(["amalgamate", matrix_csv, "-o", out], capsys)[0] == 0
    doc = json.loads(out.read_text())
    assert doc["distances"] == [["0", "3", "5", "1/2"], ["3", "0", "2", "7/2"],
                                ["5", "2", "0", "11/2"], ["1/2", "7/2", "11/2", "0"]]


def test_amalgamate_rejects_non_metric_part(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n0,1,10\n1,0,1\n10,1,0\n")
    assert run(["amalgamate", bad], capsys)[0] == 3


def test_profile(capsys):
    code, out, _ = run(["profile", "--family", "grid", "--dim", "1", "--radius", "4", "--radii", "1/2,3/2,2"], capsys)
    assert code == 0
    assert [s["max_ball"] for s in json.loads(out)["samples"]] == [1, 3, 5]


def test_explicit_thresholds(matrix_csv, capsys):
    code, out, _ = run(["embed", "-i", matrix_csv, "--thresholds", "1/4,1,100"], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["moduli"]["samples"]) == 3
    assert doc["moduli"]["samples"][-1]["rho"] == "inf"


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "lfembed", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "lfembed" in res.stdout
