import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ssaroots.cli import main


@pytest.fixture
def files(tmp_path):
    const = tmp_path / "const.json"
    const.write_text(json.dumps({"terms": [{"root": [1, 0]}]}))
    quarter = tmp_path / "quarter.json"
    quarter.write_text(json.dumps({"terms": [{"root": [0, 1]}]}))
    cos = tmp_path / "cos.json"
    cos.write_text(json.dumps({"real_terms": [{"rho": 0.9, "omega": 0.125}]}))
    return tmp_path, const, quarter, cos


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_generate(files, capsys):
    _, const, _, cos = files
    assert main(["generate", "--model", str(const), "--N", "4"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert [(r["n"], r["re"], r["im"]) for r in rows] == [(str(k), "1.0", "0.0") for k in range(4)]
    assert main(["generate", "--model", str(cos), "--N", "6"]) == 0
    assert all(r["im"] == "0.0" for r in csv_rows(capsys.readouterr().out))


def test_roots_closed_form(files, capsys):
    _, const, _, _ = files
    assert main(["roots", "--model", str(const), "--L", "3"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert list(rows[0]) == ["re", "im", "kind", "side", "L"]
    ext = [r for r in rows if r["kind"] == "extraneous"]
    assert len(ext) == 1 and abs(float(ext[0]["re"]) + 0.5) < 1e-12


def test_roots_both_sides(files, capsys):
    _, _, quarter, _ = files
    assert main(["roots", "--model", str(quarter), "--L", "2", "--both"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    back = [complex(float(r["re"]), float(r["im"])) for r in rows
            if r["side"] == "backward" and r["kind"] == "extraneous"]
    assert np.allclose(back, [0.5j])


def test_roots_from_series(files, capsys):
    tmp, const, _, _ = files
    series = tmp / "s.csv"
    assert main(["generate", "--model", str(const), "--N", "20", "-o", str(series)]) == 0
    assert main(["roots", "--series", str(series), "--d", "1", "--L", "5"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    sig = [r for r in rows if r["kind"] == "signal"]
    assert len(sig) == 1 and abs(float(sig[0]["re"]) - 1) < 1e-10


def test_separability(files, capsys):
    _, const, quarter, _ = files
    assert main(["separability", "--model1", str(const), "--model2", str(quarter),
                 "--L", "4", "--N", "11"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["left"]["separable"] and out["two_sided"]["separable"]
    assert main(["separability", "--model1", str(const), "--model2", str(quarter),
                 "--L", "4", "--N", "12"]) == 0
    assert not json.loads(capsys.readouterr().out)["two_sided"]["separable"]


def test_border_separability(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("n,re,im\n" + "".join(f"{k},{1.0 if k == 9 else 0.0},0.0\n" for k in range(10)))
    b.write_text("n,re,im\n" + "".join(f"{k},{1.0 if k == 0 else 0.0},0.0\n" for k in range(10)))
    assert main(["separability", "--series1", str(a), "--series2", str(b), "--L", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["border"]["separable"] and out["border"]["reason"] == "border-case"


def test_sweep(tmp_path, capsys):
    poly = tmp_path / "p.json"
    poly.write_text(json.dumps([[-1, 0], [1, 0]]))
    assert main(["sweep", "--poly", str(poly), "--n", "64,128"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert list(rows[0]) == ["n", "mean_modulus", "max_gap_error", "spurious_count"]
    ratio = float(rows[0]["max_gap_error"]) / float(rows[1]["max_gap_error"])
    assert 2.5 <= ratio <= 6


def test_config_file_and_override(files, capsys):
    tmp, const, _, _ = files
    cfg = tmp / "cfg.json"
    cfg.write_text(json.dumps({"model": str(const), "N": 3}))
    assert main(["generate", "--config", str(cfg)]) == 0
    assert len(csv_rows(capsys.readouterr().out)) == 3
    assert main(["generate", "--config", str(cfg), "--N", "5"]) == 0
    assert len(csv_rows(capsys.readouterr().out)) == 5


def test_scenario(tmp_path, capsys):
    out = tmp_path / "run"
    argv = ["scenario", "noised", "--seed", "11", "--runs", "2", "--output-dir", str(out)]
    assert main(argv) == 0
    first = json.loads(capsys.readouterr().out)
    snapshot = {p.name: p.read_bytes() for p in out.iterdir()}
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out) == first
    assert snapshot == {p.name: p.read_bytes() for p in out.iterdir()}


@pytest.mark.parametrize("argv", [
    ["scenario", "noised"],
    ["scenario", "bogus"],
    ["generate", "--N", "4"],
    ["generate", "--model", "/nonexistent.json", "--N", "4"],
    ["sweep", "--poly", "/nonexistent.json", "--n", "10"],
])
def test_config_errors_exit_two(argv, tmp_path, capsys):
    if argv[0] == "scenario":
        argv = argv + ["--output-dir", str(tmp_path)]
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_model_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["generate", "--model", str(bad), "--N", "4"]) == 2


def test_numerical_failure_exits_three(tmp_path, capsys):
    # a series with a zero trajectory space gives a vertical basis
    series = tmp_path / "z.csv"
    series.write_text("n,re,im\n" + "".join(f"{k},{1.0 if k == 9 else 0.0},0.0\n" for k in range(10)))
    code = main(["roots", "--series", str(series), "--d", "1", "--L", "5"])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "ssaroots.cli", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "scenario" in res.stdout
