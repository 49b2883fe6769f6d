from __future__ import annotations

import json
import subprocess
import sys

import pytest

from curvlab.cli import (
    EXIT_INPUT,
    EXIT_NOT_STABILIZED,
    EXIT_NUMERIC,
    EXIT_OK,
    main,
)


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExamples:
    def test_list(self, capsys):
        code, out, _ = run_cli(["examples", "list"], capsys)
        names = out.split()
        assert code == EXIT_OK
        assert "veronese" in names and "graph_d2_N2" in names
        assert names == sorted(set(names), key=names.index)  # no duplicates

    def test_show_graph(self, capsys):
        code, out, _ = run_cli(["examples", "show", "graph_d2_N2"], capsys)
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["shifts"] == [0, -2]
        gen = data["generators"][0]["components"]
        assert gen[0] == [{"exponents": [0, 0], "coeff": "1"}]
        assert gen[1] == [{"exponents": [2, 0], "coeff": "1"}]

    def test_show_unknown(self, capsys):
        code, _, err = run_cli(["examples", "show", "nope"], capsys)
        assert code == EXIT_INPUT and "unknown" in err


class TestInvariantsCommand:
    def test_free_d2(self, capsys):
        code, out, _ = run_cli(
            ["invariants", "free_d2", "--max-degree", "10", "--output", "json"], capsys
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["profile"]["chi"] == "1"
        assert rep["profile"]["degree"] == 2

    def test_veronese(self, capsys):
        code, out, _ = run_cli(
            ["invariants", "veronese", "--max-degree", "8", "--output", "json"], capsys
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["profile"]["chi"] == "0"
        assert rep["profile"]["mu"] == "4"
        assert rep["generating_function"]["text"] == "-3/(1-t)^3 + 4/(1-t)^4"
        assert rep["dims"]["dims_H"] == [1, 6, 15, 28, 45, 66, 91, 120, 153]

    def test_graph(self, capsys):
        code, out, _ = run_cli(
            ["invariants", "graph_d2_N2", "--max-degree", "10", "--output", "json"],
            capsys,
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["profile"]["chi"] == "1"
        # two defect degrees: the c-vector is tied to its filtration
        assert rep["defect_degrees"] == [-2, 0]
        assert rep["profile"]["c_vector_canonical"] is False

    def test_not_stabilized_exit_code(self, tmp_path, capsys):
        spec = {
            "d": 2,
            "rank": 1,
            "shifts": [0],
            "generators": [{"components": [[{"exponents": [5, 0], "coeff": "1"}]]}],
        }
        path = tmp_path / "late.json"
        path.write_text(json.dumps(spec))
        code, _, err = run_cli(["invariants", str(path), "--max-degree", "5"], capsys)
        assert code == EXIT_NOT_STABILIZED
        assert "raise the maximum degree" in err
        code2, _, _ = run_cli(["invariants", str(path), "--max-degree", "9"], capsys)
        assert code2 == EXIT_OK


class TestCurvatureCommand:
    def test_free_both_methods(self, capsys):
        code, out, _ = run_cli(
            [
                "curvature",
                "free_d2",
                "--method",
                "both",
                "--r-schedule",
                "0.5,0.6",
                "--max-degree",
                "30",
                "--samples",
                "40",
                "--output",
                "json",
            ],
            capsys,
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        methods = {e["method"]: e for e in rep["curvature"]}
        assert abs(methods["asymptotic"]["value"] - 1.0) < 1e-9
        assert abs(methods["boundary-mc"]["value"] - 1.0) < 1e-6
        assert rep["gauss_bonnet_residual"] < 1e-9

    def test_even_asymptotic(self, capsys):
        code, out, _ = run_cli(
            ["curvature", "even_d2", "--max-degree", "14", "--output", "json"], capsys
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert abs(rep["curvature"][0]["value"]) < 1e-6
        assert rep["gauss_bonnet_residual"] < 1e-6

    def test_depth_refusal_is_numeric_failure(self, capsys):
        code, _, err = run_cli(
            [
                "curvature",
                "even_d2",
                "--method",
                "both",
                "--max-degree",
                "12",
                "--r-schedule",
                "0.9,0.99",
            ],
            capsys,
        )
        assert code == EXIT_NUMERIC
        assert "raise max degree or lower r" in err


class TestMetricBasisCommand:
    def test_maximal_d3(self, capsys):
        code, out, _ = run_cli(
            ["metric-basis", "maximal_ideal_d3", "--max-degree", "8", "--output", "json"],
            capsys,
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["basis"]["counts"] == {"1": 3}
        assert rep["codimension"]["verdict"] == "finite"
        assert rep["codimension"]["codimension"] == 1
        assert max(rep["frame_residuals"].values()) <= 1e-10
        assert all(
            r["residual"] <= r["tail_bound"] + 1e-12 for r in rep["inner_profile"]
        )

    def test_z1_growth(self, capsys):
        code, out, _ = run_cli(
            ["metric-basis", "z1_d2", "--max-degree", "10", "--output", "json"], capsys
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert [rep["basis"]["counts"].get(str(n), 0) for n in range(1, 11)] == [1] * 10
        assert max(rep["frame_residuals"].values()) <= 1e-10

    def test_non_ideal_rejected(self, capsys):
        code, _, err = run_cli(["metric-basis", "graph_d2_N1"], capsys)
        assert code == EXIT_INPUT


class TestVerifyCommand:
    @pytest.mark.parametrize("fixture", ["free_d3", "veronese", "graph_d2_N1"])
    def test_fixtures_pass(self, fixture, capsys):
        degree = "8" if fixture == "veronese" else "14"
        code, out, _ = run_cli(
            ["verify", fixture, "--max-degree", degree, "--output", "json"], capsys
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["all_passed"]

    def test_corrupted_spec(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"d": 2, "rank": 1,')
        code, _, err = run_cli(["verify", str(bad)], capsys)
        assert code == EXIT_INPUT
        assert "line" in err  # parse location reported

    def test_unknown_input(self, capsys):
        code, _, err = run_cli(["invariants", "no_such_fixture"], capsys)
        assert code == EXIT_INPUT


class TestDeterminism:
    def test_json_reports_byte_identical(self, capsys):
        args = [
            "curvature",
            "free_d2",
            "--method",
            "both",
            "--r-schedule",
            "0.5,0.6",
            "--max-degree",
            "25",
            "--samples",
            "20",
            "--seed",
            "5",
            "--output",
            "json",
        ]
        _, out1, _ = run_cli(args, capsys)
        _, out2, _ = run_cli(args, capsys)
        assert out1 == out2

    def test_threads_do_not_change_output(self, capsys):
        base = ["invariants", "even_d2", "--max-degree", "12", "--output", "json"]
        _, out1, _ = run_cli(base + ["--threads", "1"], capsys)
        _, out2, _ = run_cli(base + ["--threads", "4"], capsys)
        rep1, rep2 = json.loads(out1), json.loads(out2)
        rep1["config"].pop("threads")
        rep2["config"].pop("threads")
        assert rep1 == rep2

    def test_report_round_trips(self, capsys):
        _, out, _ = run_cli(
            ["invariants", "z1_d2", "--max-degree", "10", "--output", "json"], capsys
        )
        rep = json.loads(out)
        assert json.loads(json.dumps(rep)) == rep


def test_threads_env_fallback(monkeypatch):
    from curvlab.cli import default_threads

    monkeypatch.setenv("CURVLAB_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("CURVLAB_THREADS", "junk")
    assert default_threads() >= 1


def test_entry_point_runs():
    out = subprocess.run(
        [sys.executable, "-m", "curvlab.cli", "examples", "list"],
        capture_output=True,
        text=True,
        cwd="/root/pkg",
    )
    assert out.returncode == 0 and "free_d1" in out.stdout
