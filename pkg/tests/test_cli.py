"""End-to-end tests of the command-line interface."""

import json
import os
import subprocess
import sys

import pytest

from bestsubset.cli import main

COUNTS_CSV = "algorithm,count\nsgd,30\nadam,16\nrmsprop,9\n"
SCORES_CSV = (
    "dataset,a,b,c\n"
    "d1,0.9,0.8,0.7\nd2,0.8,0.7,0.6\nd3,0.7,0.9,0.5\nd4,0.95,0.6,0.5\n"
    "d5,0.9,0.2,0.4\nd6,0.8,0.9,0.1\nd7,0.7,0.3,0.2\nd8,0.6,0.5,0.4\n"
)


@pytest.fixture
def counts_file(tmp_path):
    path = tmp_path / "counts.csv"
    path.write_text(COUNTS_CSV)
    return str(path)


@pytest.fixture
def scores_file(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text(SCORES_CSV)
    return str(path)


def run_main(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_counts_json(self, capsys, counts_file):
        code, out, err = run_main(
            capsys, ["analyze", "--counts", counts_file, "--delta", "0.05"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["schema_version"] == 1
        assert payload["command"] == "analyze"
        assert payload["seed"] is None
        assert payload["labels"] == ["sgd", "adam", "rmsprop"]
        assert payload["n"] == 55
        assert payload["argmax_set"] == ["sgd"]
        assert "sgd" in payload["subset"]
        assert payload["m_used"] == 6
        assert payload["delta_1"] == pytest.approx(0.045)
        assert "width" in payload and payload["width"] > 0
        assert "selected" in err

    def test_asymptotic_method(self, capsys, counts_file):
        code, out, _ = run_main(
            capsys,
            ["analyze", "--counts", counts_file, "--delta", "0.05", "--method", "asymptotic"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "asymptotic"
        assert payload["m_used"] is None
        # doubled CLT width 2 z_{.025} sqrt(p(1-p)/55) = 0.2632 reaches 16/55
        # but not 9/55
        assert payload["subset"] == ["sgd", "adam"]
        assert payload["width"] == pytest.approx(0.2631871517703590, rel=1e-9)

    def test_m_scan_diagnostic(self, capsys, counts_file):
        code, out, _ = run_main(
            capsys, ["analyze", "--counts", counts_file, "--m-scan"]
        )
        assert code == 0
        scan = json.loads(out)["diagnostics"]["m_scan"]
        assert set(scan) == {"2", "4", "6", "8", "10", "12"}
        assert all(v > 0 for v in scan.values())

    def test_scores_input_with_audit(self, capsys, scores_file):
        code, out, _ = run_main(
            capsys,
            ["analyze", "--scores", scores_file, "--tie-policy", "first", "--tie-seed", "3"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["n"] == 8
        assert payload["tie_resolution"]["tie_policy"] == "first"
        assert payload["seed"] == 3

    def test_delta_out_of_range(self, capsys, counts_file):
        code, _, err = run_main(
            capsys, ["analyze", "--counts", counts_file, "--delta", "1.5"]
        )
        assert code == 2
        assert "delta" in err

    def test_missing_input(self, capsys):
        code, _, err = run_main(capsys, ["analyze", "--delta", "0.05"])
        assert code == 2
        assert "required" in err

    def test_both_inputs_rejected(self, capsys, counts_file, scores_file):
        code, _, _ = run_main(
            capsys, ["analyze", "--counts", counts_file, "--scores", scores_file]
        )
        assert code == 2

    def test_missing_file(self, capsys):
        code, _, err = run_main(capsys, ["analyze", "--counts", "/nonexistent.csv"])
        assert code == 2

    def test_plot_written(self, capsys, counts_file, tmp_path):
        out_png = str(tmp_path / "analysis.png")
        code, out, _ = run_main(
            capsys, ["analyze", "--counts", counts_file, "--plot", out_png]
        )
        assert code == 0
        assert json.loads(out)["plot"] == out_png
        assert os.path.getsize(out_png) > 1000


class TestSimulate:
    def test_small_run_json(self, capsys):
        code, out, err = run_main(
            capsys,
            [
                "simulate", "--dist", "zipf:s=1,A=6", "--n-grid", "30,60",
                "--reps", "60", "--delta", "0.1", "--seed", "4",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["seed"] == 4
        assert payload["distribution"]["alphabet_size"] == 6
        assert payload["distribution"]["top_prob"] == pytest.approx(0.40816, abs=1e-4)
        assert {r["method"] for r in payload["rows"]} == {"finite", "asymptotic"}
        assert "coverage" in err

    def test_plot_data_csv(self, capsys, tmp_path):
        out_csv = str(tmp_path / "rows.csv")
        code, _, _ = run_main(
            capsys,
            [
                "simulate", "--dist", "zipf:s=1,A=5", "--n-grid", "25",
                "--reps", "40", "--seed", "1", "--plot-data", out_csv,
            ],
        )
        assert code == 0
        lines = open(out_csv).read().strip().split("\n")
        assert lines[0] == "method,n,coverage,mean_size,se_coverage,se_size"
        assert len(lines) == 3

    def test_simplex_descriptor(self, capsys):
        code, out, _ = run_main(
            capsys,
            [
                "simulate", "--dist", "simplex:A=5", "--n-grid", "30",
                "--reps", "30", "--seed", "8", "--methods", "finite",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["distribution"]["alphabet_size"] == 5
        assert 0.2 <= payload["distribution"]["top_prob"] < 1.0

    def test_bad_descriptor(self, capsys):
        code, _, err = run_main(
            capsys, ["simulate", "--dist", "cauchy:A=3", "--n-grid", "20", "--reps", "10"]
        )
        assert code == 2
        assert "unknown distribution" in err

    def test_bad_method(self, capsys):
        code, _, _ = run_main(
            capsys,
            [
                "simulate", "--dist", "zipf:s=1,A=3", "--n-grid", "20",
                "--reps", "10", "--methods", "psychic",
            ],
        )
        assert code == 2

    def test_oracle_tie_rejected(self, capsys):
        code, _, err = run_main(
            capsys,
            [
                "simulate", "--dist", "zipf:s=0,A=3", "--n-grid", "20",
                "--reps", "10", "--methods", "oracle", "--oracle-reps", "1000",
            ],
        )
        assert code == 2
        assert "unique" in err


class TestBaselines:
    def test_counts_chain(self, capsys, counts_file):
        code, out, _ = run_main(
            capsys, ["baselines", "--counts", counts_file, "--delta", "0.05"]
        )
        assert code == 0
        payload = json.loads(out)
        chain = payload["rank_verification"]
        assert chain["comparisons"][0]["labels"] == ["sgd", "adam"]
        assert chain["comparisons"][0]["reject"] is True
        assert chain["verified_prefix_length"] == 1
        assert payload["friedman"] is None

    def test_scores_tests(self, capsys, scores_file):
        code, out, _ = run_main(
            capsys, ["baselines", "--scores", scores_file, "--delta", "0.05"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["friedman"] is not None
        assert 0.0 <= payload["friedman"]["p_value"] <= 1.0
        assert payload["nemenyi"]["cd"] > 0
        assert len(payload["nemenyi"]["decisions"]) == 3
        assert payload["rank_verification"] is None

    def test_neither_input(self, capsys):
        code, _, err = run_main(capsys, ["baselines", "--delta", "0.05"])
        assert code == 2
        assert "required" in err


class TestMoments:
    def test_table_instantiation(self, capsys):
        code, out, _ = run_main(capsys, ["moments", "--m", "4", "--n", "10"])
        assert code == 0
        payload = json.loads(out)
        assert payload["coefficients"] == [10, 240]
        assert all(c["holds"] for c in payload["bound_checks"])

    def test_evaluation(self, capsys):
        code, out, _ = run_main(
            capsys, ["moments", "--m", "2", "--n", "10", "--theta", "0.5"]
        )
        assert code == 0
        assert json.loads(out)["evaluation"]["value"] == 2.5

    def test_odd_m_rejected(self, capsys):
        code, _, err = run_main(capsys, ["moments", "--m", "3", "--n", "10"])
        assert code == 2
        assert "even" in err

    def test_usage_error_exit_code(self, capsys):
        assert main(["moments", "--m", "4"]) == 2  # missing --n


def _run_cli(args, threads):
    env = dict(os.environ, BEST_SUBSET_THREADS=str(threads))
    return subprocess.run(
        [sys.executable, "-m", "bestsubset", *args],
        capture_output=True,
        env=env,
        check=False,
    )


class TestDeterminism:
    def test_byte_identical_across_runs_and_threads(self, tmp_path):
        csv1 = str(tmp_path / "a.csv")
        csv2 = str(tmp_path / "b.csv")
        args = [
            "simulate", "--dist", "zipf:s=1,A=8", "--n-grid", "30,70",
            "--reps", "80", "--delta", "0.1", "--seed", "12",
        ]
        r1 = _run_cli(args + ["--plot-data", csv1], threads=1)
        r2 = _run_cli(args + ["--plot-data", csv2], threads=3)
        assert r1.returncode == r2.returncode == 0
        out1 = r1.stdout.replace(csv1.encode(), b"CSV")
        out2 = r2.stdout.replace(csv2.encode(), b"CSV")
        assert out1 == out2
        assert open(csv1, "rb").read() == open(csv2, "rb").read()

    def test_threads_env_validation(self, capsys, monkeypatch):
        monkeypatch.setenv("BEST_SUBSET_THREADS", "zero")
        code, _, err = run_main(
            capsys,
            ["simulate", "--dist", "zipf:s=1,A=3", "--n-grid", "20", "--reps", "10"],
        )
        assert code == 2
        assert "BEST_SUBSET_THREADS" in err
