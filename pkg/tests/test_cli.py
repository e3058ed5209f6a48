"""Command-line tests: every subcommand end to end, exit codes, JSON output,
and byte-identical reruns."""

import json

import numpy as np
import pytest

from epsortho.cli import main
from epsortho.linalg import load_matrix_csv


def run_cli(argv, capsys=None):
    code = main(argv)
    return code


class TestGenMatrix:
    def test_writes_reference_matrix(self, tmp_path):
        out = tmp_path / "w.csv"
        assert main(["gen-matrix", "3", "2", "0.01", "--out", str(out)]) == 0
        w = load_matrix_csv(out)
        assert w.shape == (3, 2)
        assert abs(w[0, 0] - (-0.0829)) <= 1e-3

    def test_square_is_identity(self, tmp_path):
        out = tmp_path / "sq.csv"
        assert main(["gen-matrix", "5", "5", "--out", str(out)]) == 0
        assert np.array_equal(load_matrix_csv(out), np.eye(5))

    def test_default_eps_and_filename(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["gen-matrix", "4", "3"]) == 0
        assert (tmp_path / "w_epsilon_4x3.csv").exists()

    def test_bad_eps_exits_one(self, tmp_path):
        assert main(["gen-matrix", "3", "2", "-1.0", "--out", str(tmp_path / "x.csv")]) == 1

    def test_unwritable_path_exits_one(self, tmp_path):
        assert main(["gen-matrix", "3", "2", "--out", str(tmp_path / "no" / "x.csv")]) == 1


class TestVerify:
    def test_default_grid_passes(self, tmp_path):
        out = tmp_path / "verify.txt"
        assert main(["verify", "--out", str(out)]) == 0
        text = out.read_text()
        assert "FAIL" not in text
        assert "orthogonality" in text

    def test_json_lines_parse(self, tmp_path):
        out = tmp_path / "verify.jsonl"
        assert main(["verify", "--json", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        parsed = [json.loads(line) for line in lines]
        assert all(p["passed"] for p in parsed)
        names = {p["name"] for p in parsed}
        assert {"orthogonality", "q_column_sums", "w_sum_constancy", "a_column_angle"} <= names

    def test_custom_eps(self, tmp_path):
        out = tmp_path / "verify.txt"
        assert main(["verify", "--eps", "0.05", "--out", str(out)]) == 0


class TestPropagate:
    def test_writes_grid(self, tmp_path):
        out = tmp_path / "fig1.csv"
        assert main(["propagate", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == (
            "matrix,distribution,trial,positive_fraction,mean_in,mean_out,cos_in,cos_out"
        )
        assert len(lines) == 1 + 150

    def test_rerun_byte_identical(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["propagate", "--seed", "3", "--out", str(a)]) == 0
        assert main(["propagate", "--seed", "3", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        c = tmp_path / "c.csv"
        assert main(["propagate", "--seed", "4", "--out", str(c)]) == 0
        assert a.read_bytes() != c.read_bytes()


TRAIN_SPEC = """\
[experiment]
name = single
dataset = synth:120:5:2.0
methods = proposed(eps=0.1)
networks = 6
seeds = 0
epochs = 2
batch_size = 20
"""


class TestTrain:
    def test_single_cell_report(self, tmp_path):
        spec = tmp_path / "single.spec"
        spec.write_text(TRAIN_SPEC)
        out = tmp_path / "report.csv"
        assert main(["train", "--spec", str(spec), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "epoch,train_loss,train_acc,val_acc,dead_unit_fraction"
        assert len(lines) == 1 + 3  # epoch 0 plus two epochs

    def test_multi_cell_spec_is_config_error(self, tmp_path):
        spec = tmp_path / "multi.spec"
        spec.write_text(TRAIN_SPEC.replace("seeds = 0", "seeds = 0; 1"))
        assert main(["train", "--spec", str(spec), "--out", str(tmp_path / "r.csv")]) == 2

    def test_bad_method_is_config_error(self, tmp_path):
        spec = tmp_path / "bad.spec"
        spec.write_text(TRAIN_SPEC.replace("proposed(eps=0.1)", "bogus"))
        assert main(["train", "--spec", str(spec), "--out", str(tmp_path / "r.csv")]) == 2

    def test_missing_spec_file_exits_nonzero(self, tmp_path):
        assert main(["train", "--spec", str(tmp_path / "nope.spec"),
                     "--out", str(tmp_path / "r.csv")]) == 2

    def test_rerun_byte_identical(self, tmp_path):
        spec = tmp_path / "single.spec"
        spec.write_text(TRAIN_SPEC)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["train", "--spec", str(spec), "--out", str(a)]) == 0
        assert main(["train", "--spec", str(spec), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


EXPERIMENT_SPEC = """\
[experiment]
name = grid
dataset = synth:120:5:2.0
methods = proposed(eps=0.1); he
networks = 6; 0
seeds = 0; 1
epochs = 1
batch_size = 20
"""


class TestExperiment:
    def test_grid_csv(self, tmp_path):
        spec = tmp_path / "grid.spec"
        spec.write_text(EXPERIMENT_SPEC)
        out = tmp_path / "results.csv"
        assert main(["experiment", "--spec", str(spec), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("method,network,activation")
        assert len(lines) == 1 + 2 * 2 * 2 * 2  # cells x (epochs + 1)

    def test_builtin_name_without_data_fails_cleanly(self, tmp_path):
        assert main(["experiment", "--spec", "iris-deep", "--data", "/nonexistent.csv",
                     "--out", str(tmp_path / "r.csv")]) == 1

    def test_unknown_spec_is_config_error(self, tmp_path):
        assert main(["experiment", "--spec", str(tmp_path / "nope.spec"),
                     "--out", str(tmp_path / "r.csv")]) == 2

    def test_rerun_byte_identical(self, tmp_path):
        spec = tmp_path / "grid.spec"
        spec.write_text(EXPERIMENT_SPEC)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["experiment", "--spec", str(spec), "--out", str(a)]) == 0
        assert main(["experiment", "--spec", str(spec), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_worker_pool_matches_serial(self, tmp_path):
        spec = tmp_path / "grid.spec"
        spec.write_text(EXPERIMENT_SPEC)
        serial = tmp_path / "serial.csv"
        pooled = tmp_path / "pooled.csv"
        assert main(["experiment", "--spec", str(spec), "--out", str(serial)]) == 0
        assert main(["experiment", "--spec", str(spec), "--out", str(pooled),
                     "--workers", "2"]) == 0
        assert serial.read_bytes() == pooled.read_bytes()


class TestUsageErrors:
    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
