import json

import pandas as pd
import pytest

from app.commands.common import resolve_run_config, ConfigError
from app.main import build_parser, main
from app.schemas.experiment import REPORT_COLUMNS

FAST_FLAGS = ["--B", "5", "--M", "40", "--warmup", "10", "--workers", "1", "--seed", "3"]


@pytest.fixture
def dataset_csv(tmp_path):
    path = tmp_path / "data.csv"
    assert main(["gen-data", str(path), "--n", "30", "--seed", "5"]) == 0
    return path


class TestGenData:
    def test_writes_csv(self, dataset_csv):
        frame = pd.read_csv(dataset_csv)
        assert list(frame.columns) == ["y", "x1", "x2", "x3"]
        assert len(frame) == 30

    def test_rejects_small_n(self, tmp_path, capsys):
        assert main(["gen-data", str(tmp_path / "x.csv"), "--n", "5"]) == 1
        assert "n_rows" in capsys.readouterr().err


class TestCalibrateCommand:
    def test_vacuous_tolerance(self, dataset_csv, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code = main(["calibrate", str(dataset_csv), "--eps", "1", "--out-dir", str(out_dir)] + FAST_FLAGS)
        assert code == 0
        stdout = capsys.readouterr().out
        assert "sa: eta_hat=1 converged=1 iters=1" in stdout
        assert "wp: eta_hat=1 converged=1 iters=1" in stdout
        result = json.loads((out_dir / "result_wp.json").read_text(encoding="utf-8"))
        assert result["converged"] is True
        assert result["outer_iterations"] == 1
        plan = json.loads((out_dir / "plan.json").read_text(encoding="utf-8"))
        assert plan == {"n_rows": 30, "n_replicates": 5, "master_seed": 3}

    def test_non_convergence_exit_code(self, dataset_csv, tmp_path):
        code = main(["calibrate", str(dataset_csv), "--method", "sa", "--eps", "1e-9", "--max-outer", "1",
                     "--out-dir", str(tmp_path / "out")] + FAST_FLAGS)
        assert code == 2

    def test_invalid_alpha(self, dataset_csv, capsys):
        assert main(["calibrate", str(dataset_csv), "--alpha", "1.5"]) == 1
        assert "alpha" in capsys.readouterr().err

    def test_missing_dataset(self, tmp_path, capsys):
        assert main(["calibrate", str(tmp_path / "absent.csv")] + FAST_FLAGS) == 1
        assert "not found" in capsys.readouterr().err

    def test_usage_error(self):
        assert main(["calibrate"]) == 1


class TestExperimentCommand:
    def test_report(self, tmp_path, capsys):
        out_dir = tmp_path / "exp"
        code = main(["experiment", "--n", "30", "--datasets", "2", "--max-outer", "2",
                     "--out-dir", str(out_dir)] + FAST_FLAGS)
        assert code == 0
        report = pd.read_csv(out_dir / "report.csv")
        assert list(report.columns) == REPORT_COLUMNS
        assert len(report) == 4
        summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
        assert set(summary["methods"]) == {"sa", "wp"}
        assert "iterations median" in capsys.readouterr().out


class TestConfigPrecedence:
    def parse(self, argv):
        return build_parser().parse_args(argv)

    def test_defaults(self):
        config = resolve_run_config(self.parse(["calibrate", "d.csv"]))
        assert (config.alpha, config.eps, config.eta0, config.ess_frac) == (0.05, 0.005, 1.0, 0.25)
        assert (config.n_bootstrap, config.n_draws, config.warmup) == (100, 1000, 500)
        assert config.kesten_variant == "figure"

    def test_model_defaults(self):
        config = resolve_run_config(self.parse(["calibrate", "d.csv", "--model", "svm"]))
        assert (config.n_draws, config.warmup) == (2000, 500)

    def test_flag_beats_file_beats_default(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"alpha": 0.1, "eps": 0.02, "n_bootstrap": 40}), encoding="utf-8")
        config = resolve_run_config(self.parse(["calibrate", "d.csv", "--config", str(path), "--eps", "0.01"]))
        assert config.alpha == 0.1
        assert config.eps == 0.01
        assert config.n_bootstrap == 40
        assert config.max_outer == 50

    def test_unknown_key_named(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"alpah": 0.1}), encoding="utf-8")
        with pytest.raises(ConfigError, match="alpah"):
            resolve_run_config(self.parse(["calibrate", "d.csv", "--config", str(path)]))

    def test_reset_flag(self):
        config = resolve_run_config(self.parse(["calibrate", "d.csv", "--reset-kesten"]))
        assert config.reset_kesten_each_round
