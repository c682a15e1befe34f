import json

import numpy as np
import pytest

from ksdiff import (
    EmpiricalKsMatrix,
    dataset_from_array,
    gen_example2,
    load_matrix,
    save_dataset_csv,
    save_matrix,
)
from ksdiff.cli import main


@pytest.fixture
def csv_pair(tmp_path):
    rng = np.random.default_rng(0)
    p = dataset_from_array(rng.normal(size=(80, 4)))
    q = dataset_from_array(rng.normal(size=(80, 4)))
    p_path, q_path = tmp_path / "p.csv", tmp_path / "q.csv"
    save_dataset_csv(p, p_path)
    save_dataset_csv(q, q_path)
    return str(p_path), str(q_path)


class TestSelect:
    def test_identical_inputs_score_zero(self, csv_pair, tmp_path):
        p_path, _ = csv_pair
        out = tmp_path / "report.json"
        code = main([
            "select", "--p", p_path, "--q", p_path,
            "--seed", "5", "--out", str(out),
        ])
        assert code == 0
        report = json.loads(out.read_text())
        assert all(row["score"] == 0.0 for row in report["ranking"])

    def test_mismatched_headers_exit_2(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        a.write_text("x,y\n1.0,2.0\n")
        b.write_text("x,z\n1.0,2.0\n")
        code = main(["select", "--p", str(a), "--q", str(b), "--seed", "1", "--out", str(tmp_path / "r.json")])
        assert code == 2

    def test_missing_file_exit_2(self, tmp_path):
        code = main([
            "select", "--p", str(tmp_path / "none.csv"), "--q", str(tmp_path / "none.csv"),
            "--seed", "1", "--out", str(tmp_path / "r.json"),
        ])
        assert code == 2

    def test_mixture_example_ranks_changed_feature_first(self, tmp_path):
        p, q, _ = gen_example2(1000, 424)
        p_path, q_path = tmp_path / "p.csv", tmp_path / "q.csv"
        save_dataset_csv(p, p_path)
        save_dataset_csv(q, q_path)
        out = tmp_path / "report.json"
        code = main([
            "select", "--p", str(p_path), "--q", str(q_path),
            "--seed", "11", "--L", "10", "--out", str(out),
        ])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["ranking"][0]["name"] == "x1"

    def test_exact_solver_over_limit_exit_3(self, tmp_path):
        rng = np.random.default_rng(3)
        ds = dataset_from_array(rng.normal(size=(6, 26)))
        path = tmp_path / "wide.csv"
        save_dataset_csv(ds, path)
        code = main([
            "select", "--p", str(path), "--q", str(path), "--method", "proposed",
            "--solver", "exact", "--k", "3", "--L", "2",
            "--seed", "1", "--out", str(tmp_path / "r.json"),
        ])
        assert code == 3

    def test_k_contract(self, csv_pair, tmp_path):
        p_path, q_path = csv_pair
        out = str(tmp_path / "r.json")
        assert main(["select", "--p", p_path, "--q", q_path, "--solver", "greedy-k",
                     "--seed", "1", "--out", out]) == 2
        assert main(["select", "--p", p_path, "--q", q_path, "--k", "2",
                     "--seed", "1", "--out", out]) == 2

    def test_threshold_and_csv_format(self, csv_pair, tmp_path):
        p_path, q_path = csv_pair
        out = tmp_path / "r.csv"
        code = main([
            "select", "--p", p_path, "--q", q_path, "--seed", "9",
            "--threshold", "0.05", "--format", "csv", "--out", str(out),
        ])
        assert code == 0
        assert out.read_text().splitlines()[0] == "name,index,score,rank"

    def test_greedy_k_reports_selection(self, csv_pair, tmp_path):
        p_path, q_path = csv_pair
        out = tmp_path / "r.json"
        code = main([
            "select", "--p", p_path, "--q", q_path, "--solver", "greedy-k", "--k", "2",
            "--seed", "9", "--out", str(out),
        ])
        assert code == 0
        report = json.loads(out.read_text())
        assert len(report["selected"]) == 2
        assert "objective" in report

    def test_baseline_methods_run(self, csv_pair, tmp_path):
        p_path, q_path = csv_pair
        for method in ("mt", "ide09", "hara15"):
            out = tmp_path / f"{method}.json"
            assert main([
                "select", "--p", p_path, "--q", q_path, "--method", method,
                "--seed", "2", "--out", str(out),
            ]) == 0

    def test_score_only_methods_reject_other_solvers(self, csv_pair, tmp_path):
        p_path, q_path = csv_pair
        code = main([
            "select", "--p", p_path, "--q", q_path, "--method", "mt",
            "--solver", "exact", "--k", "2", "--seed", "2", "--out", str(tmp_path / "r.json"),
        ])
        assert code == 2


class TestMatrixCommand:
    def test_identical_inputs_zero_matrix(self, csv_pair, tmp_path):
        p_path, _ = csv_pair
        out = tmp_path / "h.csv"
        code = main(["matrix", "--p", p_path, "--q", p_path, "--seed", "3", "--out", str(out)])
        assert code == 0
        m = load_matrix(out)
        assert np.array_equal(m.entries, np.zeros((4, 4)))
        assert out.read_text().splitlines()[0] == "# ksdiff-matrix L=10 seed=3 policy=per-pair"

    def test_inputs_not_mutated(self, csv_pair, tmp_path):
        p_path, q_path = csv_pair
        before = open(p_path, "rb").read(), open(q_path, "rb").read()
        main(["matrix", "--p", p_path, "--q", q_path, "--seed", "3", "--out", str(tmp_path / "h.csv")])
        assert (open(p_path, "rb").read(), open(q_path, "rb").read()) == before


class TestPerturbCommand:
    def test_zero_level_mean_shift_is_byte_identical(self, csv_pair, tmp_path):
        p_path, _ = csv_pair
        out = tmp_path / "out.csv"
        code = main([
            "perturb", "--input", p_path, "--kind", "mean_shift", "--c", "0.0",
            "--targets", "0", "--out", str(out),
        ])
        assert code == 0
        assert out.read_bytes() == open(p_path, "rb").read()

    def test_reference_wiring(self, csv_pair, tmp_path):
        p_path, _ = csv_pair
        out = tmp_path / "out.csv"
        code = main([
            "perturb", "--input", p_path, "--kind", "cov_change", "--c", "0.5",
            "--targets", "0,1", "--refs", "2,3", "--out", str(out),
        ])
        assert code == 0
        code = main([
            "perturb", "--input", p_path, "--kind", "cov_change", "--c", "0.5",
            "--targets", "0,1", "--refs", "2", "--out", str(out),
        ])
        assert code == 2


class TestCheckCommand:
    def test_margin_reported_for_diagonal_matrix(self, tmp_path, capsys):
        m = EmpiricalKsMatrix(np.diag([0.0, 0.0, 1.0]), ("a", "b", "c"), 10, 4, "per-pair")
        path = tmp_path / "h.csv"
        save_matrix(m, path)
        code = main(["check", "--matrix", str(path), "--s-star", "2", "--k", "2"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["margin"] == 1.0
        assert report["sufficient_holds"]["2"] is True

    def test_conflicting_k_exit_2(self, tmp_path):
        m = EmpiricalKsMatrix(np.diag([0.0, 0.0, 1.0]), ("a", "b", "c"), 10, 4, "per-pair")
        path = tmp_path / "h.csv"
        save_matrix(m, path)
        assert main(["check", "--matrix", str(path), "--s-star", "2", "--k", "1"]) == 2


class TestExperimentCommand:
    def _spec(self, tmp_path, **overrides):
        spec = {
            "generator": "example2",
            "methods": ["proposed"],
            "N": [60],
            "repetitions": 1,
            "master_seed": 5,
            "L": 3,
        }
        spec.update(overrides)
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec))
        return str(path)

    def test_minimal_sweep_produces_all_files(self, tmp_path):
        out_dir = tmp_path / "out"
        code = main(["experiment", "--spec", self._spec(tmp_path), "--out-dir", str(out_dir)])
        assert code == 0
        report = (out_dir / "report.csv").read_text().splitlines()
        assert report[0] == "method,N,rep_seed,auroc,runtime_sec"
        assert len(report) == 2
        table = (out_dir / "auroc_vs_N.csv").read_text().splitlines()
        assert table[0] == "method,N,mean_auroc,std"
        json.loads((out_dir / "aggregate.json").read_text())

    def test_rerun_aggregates_identical(self, tmp_path):
        spec = self._spec(tmp_path, repetitions=2)
        first, second = tmp_path / "r1", tmp_path / "r2"
        assert main(["experiment", "--spec", spec, "--out-dir", str(first)]) == 0
        assert main(["experiment", "--spec", spec, "--out-dir", str(second)]) == 0
        assert (first / "auroc_vs_N.csv").read_bytes() == (second / "auroc_vs_N.csv").read_bytes()
        assert (first / "aggregate.json").read_bytes() == (second / "aggregate.json").read_bytes()

    def test_malformed_spec_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["experiment", "--spec", str(bad), "--out-dir", str(tmp_path / "o")]) == 2
        missing = tmp_path / "missing.json"
        missing.write_text(json.dumps({"generator": "example2"}))
        assert main(["experiment", "--spec", str(missing), "--out-dir", str(tmp_path / "o")]) == 2
