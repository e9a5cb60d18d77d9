import json
import math

import numpy as np
import pytest

from oddcoupling.cli import run
from oddcoupling.jsonio import dumps


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "k4.json").write_text(json.dumps(
        {"n": 4, "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}))
    (tmp_path / "book5.json").write_text(json.dumps(
        {"n": 7, "edges": [[0, 1]] + [[0, k] for k in range(2, 7)]
         + [[1, k] for k in range(2, 7)]}))
    (tmp_path / "edge.txt").write_text("# two-body\n0 1\n")
    (tmp_path / "sin.json").write_text(json.dumps(
        {"family": "sine_sum", "terms": {"1": 1.0}}))
    (tmp_path / "cubic.json").write_text(json.dumps(
        {"family": "odd_poly", "coeffs": [-1.0, 1.0]}))
    (tmp_path / "series.json").write_text(json.dumps(
        {"family": "sine_series", "P": math.pi, "terms": {"1": 1.0}}))
    return tmp_path


def test_bounds_book5(workdir):
    out = workdir / "report.json"
    code = run(["bounds", "--graph", str(workdir / "book5.json"),
                "--coupling", str(workdir / "series.json"), "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["dim_H1"] == 5
    assert rep["cc"] == 2
    assert rep["bounds"]["chain_bound"] == 4


def test_bounds_text_graph(workdir):
    out = workdir / "r.json"
    code = run(["bounds", "--graph", str(workdir / "edge.txt"),
                "--coupling", str(workdir / "sin.json"), "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["report"]["dim_H1"] == 0


def test_solve_deterministic(workdir):
    outs = []
    for name in ("a.json", "b.json"):
        out = workdir / name
        code = run(["solve", "--graph", str(workdir / "k4.json"),
                    "--coupling", str(workdir / "sin.json"),
                    "--starts", "60", "--seed", "7", "--out", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    atlas = json.loads(outs[0])["atlas"]
    assert atlas["n_starts"] == 60
    assert atlas["points"]


def test_stability_subcommand(workdir):
    out = workdir / "s.json"
    code = run(["stability", "--graph", str(workdir / "k4.json"),
                "--coupling", str(workdir / "sin.json"),
                "--point", "0,0,0,0", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["report"]["verdict"] == "linearly_stable_up_to_symmetry"
    assert rep["membership"]["passed"] is True


def test_stability_rejects_non_equilibrium(workdir, capsys):
    code = run(["stability", "--graph", str(workdir / "k4.json"),
                "--coupling", str(workdir / "sin.json"),
                "--point", "0,0.5,1.0,2.0"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_simulate_with_csv(workdir):
    out = workdir / "t.json"
    csv_path = workdir / "traj.csv"
    code = run(["simulate", "--graph", str(workdir / "k4.json"),
                "--coupling", str(workdir / "sin.json"),
                "--x0", "0.1,0.5,-0.4,0.9", "--t-end", "50",
                "--csv", str(csv_path), "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["converged"] is True
    header = csv_path.read_text().splitlines()[0]
    assert header == "t,x0,x1,x2,x3,energy"


def test_continue_curve_with_csv(workdir):
    (workdir / "c3.json").write_text(json.dumps(
        {"n": 3, "edges": [[0, 1], [1, 2], [2, 0]]}))
    out = workdir / "m.json"
    csv_path = workdir / "curve.csv"
    spec_path = workdir / "spec.csv"
    code = run(["continue", "--graph", str(workdir / "c3.json"),
                "--coupling", str(workdir / "cubic.json"),
                "--point", "0,1,0", "--max-steps", "400",
                "--csv", str(csv_path), "--spectrum-csv", str(spec_path),
                "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())["sample"]
    assert rep["closed"] is True
    assert csv_path.exists() and spec_path.exists()
    lines = spec_path.read_text().splitlines()
    assert lines[0] == "index,lambda0,lambda1,lambda2"
    assert len(lines) == len(rep["points"]) + 1


def test_basin_subcommand(workdir):
    out = workdir / "b.json"
    code = run(["basin", "--graph", str(workdir / "edge.txt"),
                "--coupling", str(workdir / "sin.json"),
                "--point", "0,0", "--radius", "0.1", "--trials", "5",
                "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["return_fraction"] == 1.0
    assert rep["evidence"] == "empirical evidence"


def test_cover_check_and_find_and_lift(workdir):
    (workdir / "hex.json").write_text(json.dumps(
        {"n": 6, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 0]]}))
    (workdir / "tri.json").write_text(json.dumps(
        {"n": 3, "edges": [[0, 1], [1, 2], [2, 0]]}))
    out = workdir / "c.json"
    code = run(["cover", "check", "--graph", str(workdir / "hex.json"),
                "--target", str(workdir / "tri.json"),
                "--phi", "0,1,2,0,1,2", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["is_covering"] is True
    assert rep["is_generalized_covering"] is True

    code = run(["cover", "find", "--graph", str(workdir / "hex.json"),
                "--target", str(workdir / "tri.json"), "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["count"] >= 6

    code = run(["cover", "lift", "--graph", str(workdir / "hex.json"),
                "--target", str(workdir / "tri.json"),
                "--phi", "0,1,2,0,1,2",
                "--coupling", str(workdir / "sin.json"),
                "--point", f"0,{math.pi},0", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["lifted"]["residual"] <= 1e-9


def test_cover_find_budget_exit_code(workdir, capsys):
    (workdir / "tri.json").write_text(json.dumps(
        {"n": 3, "edges": [[0, 1], [1, 2], [2, 0]]}))
    code = run(["cover", "find", "--graph", str(workdir / "tri.json"),
                "--target", str(workdir / "tri.json"), "--cap", "2"])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_blocks_subcommand(workdir):
    (workdir / "bowtie.json").write_text(json.dumps(
        {"n": 5, "edges": [[0, 1], [1, 2], [2, 0], [0, 3], [3, 4], [4, 0]]}))
    out = workdir / "bl.json"
    code = run(["blocks", "--graph", str(workdir / "bowtie.json"),
                "--coupling", str(workdir / "sin.json"),
                "--point", "0,0,0,0,0", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert len(rep["blocks"]) == 2
    assert rep["cut_vertices"] == [0]
    assert rep["stability"]["combined_verdict"] == "linearly_stable_up_to_symmetry"


def test_corpus_list(capsys):
    assert run(["corpus", "list"]) == 0
    out = capsys.readouterr().out
    assert "k4-sin" in out and "cover7-cubic" in out


def test_corpus_run_single(workdir, capsys):
    out = workdir / "corpus.json"
    code = run(["corpus", "run", "p3-sin", "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "PASS" in text
    rep = json.loads(out.read_text())
    assert rep["reports"][0]["passed"] is True


def test_validation_exit_code(workdir, capsys):
    code = run(["bounds", "--graph", str(workdir / "k4.json"),
                "--coupling", str(workdir / "k4.json")])  # not a coupling file
    assert code == 2


def test_json_float_format_round_trip():
    vals = [math.pi, 1 / 3, 1e-17, 123456.75, -0.0, 2.0]
    text = dumps({"vals": vals})
    back = json.loads(text)["vals"]
    assert back == vals


def test_threads_env_fallback(workdir, monkeypatch):
    monkeypatch.setenv("OCL_THREADS", "3")
    out = workdir / "env.json"
    code = run(["solve", "--graph", str(workdir / "k4.json"),
                "--coupling", str(workdir / "sin.json"),
                "--starts", "20", "--seed", "1", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["config"]["threads"] == 3
