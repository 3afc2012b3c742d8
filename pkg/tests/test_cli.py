"""Command-line driver: reports, exit codes, config precedence, determinism."""

import json

import numpy as np
import pytest

from permbounds import cli, make_circulant3, matrix_to_json_dict


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1])


def read(path):
    return path.read_text(encoding="utf-8").splitlines()


def test_verify_writes_csv_report(tmp_path, capsys):
    out = tmp_path / "v.csv"
    code, summary = run(
        capsys, "verify", "--n", 3, "--trials", 25, "--seed", 1, "--out", out, "--no-plot"
    )
    assert code == 0
    assert summary["violations"] == 0 and summary["out"] == str(out)
    assert summary["plot"] is None
    lines = read(out)
    assert lines[0] == "# permbounds-csv v1 command=verify"
    assert lines[1] == "i,check,n,k,p,lhs,rhs,ratio,slack,class"
    assert len(lines) == 2 + 25 + 1  # header pair, one row per trial, summary
    assert lines[-1].startswith("# summary trials=25 checks=25 violations=0")
    assert all(line.split(",")[1] == "perm" for line in lines[2:-1])


def test_verify_row_mode_runs_both_subperm_checks(tmp_path, capsys):
    out = tmp_path / "v.csv"
    code, summary = run(
        capsys,
        "verify", "--n", 4, "--k", 2, "--p", 1.5,
        "--trials", 10, "--out", out, "--no-plot",
    )
    assert code == 0
    lines = read(out)
    kinds = {line.split(",")[1] for line in lines[2:-1]}
    assert kinds == {"subperm2", "subperm_p"}
    assert len(lines) == 2 + 20 + 1


def test_verify_corrupt_bound_hook_trips_the_gate(tmp_path, capsys):
    code, summary = run(
        capsys,
        "verify", "--n", 3, "--trials", 5,
        "--corrupt-bound", "--out", tmp_path / "v.csv", "--no-plot",
    )
    assert code == 1
    assert summary["violations"] == 5


def test_verify_json_format(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, summary = run(
        capsys, "verify", "--n", 3, "--trials", 6, "--format", "json", "--out", out, "--no-plot"
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "permbounds-json v1"
    assert doc["command"] == "verify"
    assert len(doc["reports"]) == 6
    assert doc["summary"]["violations"] == 0


def test_flow_random_matrix_monotone(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, summary = run(
        capsys, "flow", "--n", 3, "--t-points", 8, "--out", out, "--no-plot"
    )
    assert code == 0
    assert summary["monotone"] is True
    assert summary["method"] == "reduced"
    lines = read(out)
    assert lines[0] == "# permbounds-csv v1 command=flow"
    assert lines[1].startswith("t,eta,s00")
    assert len(lines) == 2 + 9  # schema, header, t=0 plus 8 grid points


def test_flow_brute_method_agrees_with_reduced(tmp_path, capsys):
    a, b = tmp_path / "r.csv", tmp_path / "b.csv"
    run(capsys, "flow", "--n", 3, "--t-points", 5, "--out", a, "--no-plot")
    run(capsys, "flow", "--n", 3, "--t-points", 5, "--method", "brute", "--out", b, "--no-plot")
    rows_a = [list(map(float, line.split(","))) for line in read(a)[2:]]
    rows_b = [list(map(float, line.split(","))) for line in read(b)[2:]]
    np.testing.assert_allclose(rows_a, rows_b, atol=1e-10)


def test_flow_circulant_reports_negative_initial_slope(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, summary = run(
        capsys,
        "flow", "--circulant", 0, 0, "--p", 1.5,
        "--t-points", 10, "--out", out, "--no-plot",
    )
    assert code == 0  # the gate applies only at p = 2
    assert summary["initial_slope"] < -1e-6
    assert summary["monotone"] is False
    assert read(out)[1].startswith("t,eta,phi,x,y,")


def test_flow_matrix_file(tmp_path, capsys):
    mfile = tmp_path / "m.json"
    mfile.write_text(json.dumps(matrix_to_json_dict(make_circulant3(0.5, 0.25))))
    code, summary = run(
        capsys, "flow", "--matrix", mfile, "--t-points", 5, "--out", tmp_path / "f.csv", "--no-plot"
    )
    assert code == 0 and summary["n"] == 3 and summary["monotone"] is True


def test_flow_missing_matrix_file_exits_two(tmp_path, capsys):
    code, summary = run(
        capsys, "flow", "--matrix", tmp_path / "nope.json", "--out", tmp_path / "f.csv", "--no-plot"
    )
    assert code == 2 and "error" in summary


def test_cp_single_exponent(tmp_path, capsys):
    out = tmp_path / "cp.csv"
    code, summary = run(
        capsys,
        "cp", "--n", 2, "--p", 1.5, "--starts", 2, "--iters", 80,
        "--out", out, "--no-plot",
    )
    assert code == 0
    assert abs(summary["best_first"] - 1.0) <= 1e-6
    assert summary["bracket_violations"] == 0
    lines = read(out)
    assert lines[1] == "n,p,best_ratio,lower_bound,upper_bound,conjecture_gap,starts_to_best,iters"
    assert len(lines) == 3


def test_cp_grid_report(tmp_path, capsys):
    code, summary = run(
        capsys,
        "cp", "--n", 3, "--p-grid", "1:2:3", "--starts", 2, "--iters", 60,
        "--format", "json", "--out", tmp_path / "cp.json", "--no-plot",
    )
    assert code == 0
    doc = json.loads((tmp_path / "cp.json").read_text())
    assert [r["p"] for r in doc["results"]] == [1.0, 1.5, 2.0]
    for r in doc["results"]:
        assert r["lower_bound"] - 1e-9 <= r["best_ratio"] <= r["upper_bound"] + 1e-9
        assert r["conjecture_gap"] == pytest.approx(r["best_ratio"] - r["lower_bound"])


def test_cp_bad_grid_exits_two(tmp_path, capsys):
    code, summary = run(capsys, "cp", "--p-grid", "1-2-3", "--out", tmp_path / "x.csv")
    assert code == 2 and "error" in summary


def test_interp_permanent_tensor(tmp_path, capsys):
    out = tmp_path / "i.csv"
    code, summary = run(
        capsys,
        "interp", "--perm-tensor", "--n", 3, "--t-points", 3,
        "--starts", 3, "--iters", 80, "--out", out, "--no-plot",
    )
    assert code == 0 and summary["passed"] is True
    assert abs(summary["q_value"] - 1.0) <= 1e-8
    lines = read(out)
    assert lines[1] == "t,pv0,pv1,pv2,midpoint_estimate,endpoint_bound,violation"
    assert len(lines) == 2 + 3 + 1


def test_interp_random_form_with_explicit_exponents(tmp_path, capsys):
    code, summary = run(
        capsys,
        "interp", "--random-form", "--m", 2, "--n", 3,
        "--q", 1, 1, "--r", 0.25, 0.75, "--t-points", 2,
        "--starts", 2, "--iters", 60, "--out", tmp_path / "i.csv", "--no-plot",
    )
    assert code == 0 and summary["m"] == 2 and summary["passed"] is True


def test_config_file_merging_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 7, "n": 3, "plot": False}))
    out = tmp_path / "v.csv"
    code, summary = run(
        capsys, "verify", "--config", cfg, "--trials", 4, "--out", out
    )
    assert code == 0
    assert summary["trials"] == 4 and summary["n"] == 3  # flag beats file beats default
    assert summary["plot"] is None


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, summary = run(capsys, "verify", "--config", cfg, "--out", tmp_path / "v.csv")
    assert code == 2 and "bogus" in summary["error"]


def test_default_output_paths(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, summary = run(capsys, "verify", "--n", 2, "--trials", 3, "--no-plot")
    assert code == 0
    assert summary["out"] == "permbounds_verify.csv"
    assert (tmp_path / "permbounds_verify.csv").exists()


def test_plot_files_are_rendered(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, summary = run(capsys, "flow", "--n", 3, "--t-points", 6, "--out", out)
    assert code == 0
    png = tmp_path / "f.png"
    assert summary["plot"] == str(png)
    data = png.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n" and len(data) > 1000


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--n", "3", "--trials", "8"],
        ["flow", "--n", "3", "--t-points", "6"],
        ["flow", "--circulant", "0.2", "0.7", "--p", "1.5", "--t-points", "6"],
        ["cp", "--n", "2", "--p-grid", "1:2:3", "--starts", "2", "--iters", "50"],
        ["interp", "--perm-tensor", "--n", "3", "--t-points", "2", "--starts", "2", "--iters", "50"],
    ],
)
def test_reports_and_figures_are_reproducible(tmp_path, capsys, argv):
    paths = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.csv"
        code, summary = run(capsys, *argv, "--seed", 3, "--out", out)
        assert code == 0
        paths.append((out, tmp_path / f"{tag}.png"))
    (out_a, png_a), (out_b, png_b) = paths
    assert out_a.read_bytes() == out_b.read_bytes()
    assert png_a.read_bytes() == png_b.read_bytes()
