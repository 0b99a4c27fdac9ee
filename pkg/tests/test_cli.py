import json

import pytest

from outlierlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", "--potential", "[0,0,0.5]", "--a", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["regime"] == "Supercritical"
    assert payload["result"]["a_star"] == pytest.approx(2.5, abs=1e-8)


def test_analyze_sweep(capsys):
    code, out, _ = run(capsys, "analyze", "--potential", "[0,0,0.5]",
                       "--sweep", "a=0.5:2:2")
    assert code == 0
    sweep = json.loads(out)["result"]["sweep"]
    assert [s["a"] for s in sweep] == [0.5, 2.0]


def test_missing_potential_is_usage_error(capsys):
    code, _, err = run(capsys, "analyze", "--a", "2")
    assert code == 1
    assert "potential" in err


def test_bad_grid_is_usage_error(capsys):
    code, _, err = run(capsys, "predict", "--potential", "[0,0,0.5]",
                       "--a", "2", "--n", "100", "--r", "1", "--grid", "nope")
    assert code == 1
    assert "grid" in err


def test_math_failure_is_exit_2(capsys):
    # critical coupling: prediction refused with a mathematical error
    code, _, err = run(capsys, "predict", "--potential", "[0,0,0.5]",
                       "--a", "1", "--n", "100", "--r", "1")
    assert code == 2


def test_kappa_rejection(capsys):
    code, _, err = run(capsys, "predict", "--potential", "[0,0,0.5]",
                       "--a", "2", "--n", "8", "--r", "2")
    assert code == 1
    assert "n/4" in err


def test_predict_csv_grid(capsys):
    code, out, _ = run(capsys, "predict", "--potential", "[0,0,0.5]",
                       "--a", "2", "--n", "400", "--r", "1",
                       "--grid", "2.2:2.8:11", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,density"
    assert len(lines) == 12


def test_csv_without_grid_is_usage_error(capsys):
    code, _, err = run(capsys, "analyze", "--potential", "[0,0,0.5]",
                       "--a", "2", "--format", "csv")
    assert code == 1


def test_mc_determinism_bytes(tmp_path, capsys):
    args = ["mc", "--potential", "[0,0,0.5]", "--a", "2", "--n", "80",
            "--r", "1", "--trials", "25", "--seed", "11"]
    f1, f2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(args + ["--out", str(f1)]) == 0
    assert main(args + ["--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_oracle_determinism_bytes(tmp_path):
    args = ["oracle", "--potential", "[0,0,0.5]", "--a", "2", "--n", "10",
            "--r", "1", "--interval", "2.2:2.8"]
    f1, f2 = tmp_path / "o1.json", tmp_path / "o2.json"
    assert main(args + ["--out", str(f1)]) == 0
    assert main(args + ["--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_mc_non_gaussian_guard(capsys):
    code, _, err = run(capsys, "mc", "--potential", "[0,0,0,0,0.25]",
                       "--a", "2", "--n", "50", "--r", "1",
                       "--trials", "5", "--seed", "1")
    assert code == 1
    assert "MC requires Gaussian potential" in err


def test_oracle_precision_guard(capsys):
    code, _, err = run(capsys, "oracle", "--potential", "[0,0,0.5]",
                       "--a", "2", "--n", "10", "--r", "1",
                       "--precision-bits", "64")
    assert code == 1


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"potential": [0, 0, 0.5], "a": 0.5}))
    code, out, _ = run(capsys, "analyze", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["result"]["regime"] == "Subcritical"
    code, out, _ = run(capsys, "analyze", "--config", str(cfg), "--a", "2")
    assert code == 0
    assert json.loads(out)["result"]["regime"] == "Supercritical"
