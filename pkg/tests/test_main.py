"""
Unit Tests for the Command Line
===============================
Argument parsing and the smooth / generate / compare / bench commands.

Run: python -m pytest tests/test_main.py -v
"""

import pytest
import numpy as np
from unittest.mock import patch

import sys
sys.path.insert(0, '.')

import main as cli
from src.formats import read_grid
from src.runner import OperationTimes


@pytest.fixture
def generated(tmp_path):
    """A step-outliers instance written by the generate command."""
    noisy, truth = tmp_path / "noisy.csv", tmp_path / "truth.csv"
    code = cli.main(["generate", "step-outliers", "--n", "512", "--seed", "7",
                     "-o", str(noisy), "--truth", str(truth)])
    assert code == 0
    return noisy, truth


# ============================================================
# Parser Tests
# ============================================================

class TestParser:
    """Test argument validation."""

    def test_s_and_gcv_exclusive(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["smooth", "in.csv", "--s", "1", "--gcv", "-o", str(tmp_path / "o.csv")])

    def test_s_or_gcv_required(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["smooth", "in.csv", "-o", str(tmp_path / "o.csv")])

    def test_unknown_method(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["smooth", "in.csv", "--method", "l3", "--s", "1", "-o", str(tmp_path / "o.csv")])

    def test_bad_log_level_exits_1(self, capsys):
        with patch.object(cli, "bench", return_value=[(16, 0.001)]):
            assert cli.main(["--log-level", "chatty", "bench", "--sizes", "16"]) == 1
        assert "chatty" in capsys.readouterr().err

    def test_config_error_exits_1(self, generated, tmp_path, capsys):
        code = cli.main(["smooth", str(generated[0]), "--method", "l2", "--lambda", "2",
                         "--s", "1", "-o", str(tmp_path / "o.csv")])
        assert code == 1
        assert "error:" in capsys.readouterr().err


# ============================================================
# Command Tests
# ============================================================

class TestCommands:
    """Test the commands end to end."""

    def test_generate_writes_truth_and_mask(self, tmp_path):
        out, mask = tmp_path / "depth.txt", tmp_path / "mask.txt"
        assert cli.main(["generate", "depth-map", "--seed", "2", "-o", str(out), "--mask-out", str(mask)]) == 0
        data, observed = read_grid(out).data, read_grid(mask).data
        assert data.shape == observed.shape == (64, 64)
        assert np.array_equal(np.isnan(data), observed == 0)

    def test_smooth_l1(self, generated, tmp_path):
        out, trace = tmp_path / "out.csv", tmp_path / "trace.csv"
        code = cli.main(["smooth", str(generated[0]), "--method", "l1", "--s", "1e4",
                         "-o", str(out), "--trace", str(trace)])
        assert code in (0, 2)
        assert read_grid(out).data.shape == (512,)
        assert trace.exists()

    def test_smooth_gcv_example(self, tmp_path):
        out, trace = tmp_path / "out.csv", tmp_path / "trace.csv"
        code = cli.main(["smooth", "--synthetic", "step-outliers", "--n", "4096", "--seed", "7",
                         "--gcv", "--method", "l1", "-o", str(out), "--trace", str(trace)])
        lines = trace.read_text().splitlines()
        assert code == 0
        assert read_grid(out).data.shape == (4096,)
        assert len(lines) < 50
        assert float(lines[-1].split(",")[1]) < 1e-3

    def test_smooth_robust_weights(self, generated, tmp_path):
        out, weights = tmp_path / "out.csv", tmp_path / "weights.csv"
        code = cli.main(["smooth", str(generated[0]), "--method", "robust-l2", "--s", "1e4",
                         "-o", str(out), "--weights-out", str(weights)])
        assert code == 0
        w = read_grid(weights).data
        assert np.all((w >= 0) & (w <= 1))

    def test_smooth_synthetic_2d(self, tmp_path):
        out = tmp_path / "peaks.txt"
        code = cli.main(["smooth", "--synthetic", "peaks-outliers", "--n", "32", "--method", "l2",
                         "--s", "10", "-o", str(out)])
        assert code == 0
        assert read_grid(out).data.shape == (32, 32)

    def test_smooth_missing_input(self, tmp_path):
        assert cli.main(["smooth", str(tmp_path / "nope.csv"), "--s", "1", "-o", str(tmp_path / "o.csv")]) == 1

    def test_compare_prints_table(self, capsys):
        assert cli.main(["compare", "smooth-outliers", "--n", "512", "--s", "1000"]) == 0
        out = capsys.readouterr().out
        for label in ("L2", "bisquare-IRLS", "L1", "Best:"):
            assert label in out

    def test_bench_prints_ratios(self, capsys):
        with patch.object(cli, "bench", return_value=[(16, 0.001), (32, 0.002)]):
            assert cli.main(["bench", "--sizes", "16", "32"]) == 0
        out = capsys.readouterr().out
        assert "2.00" in out

    def test_bench_breakdown_prints_shares(self, capsys):
        split = OperationTimes(transform=0.8, shrink=0.1, update=0.1)
        with patch.object(cli, "bench", return_value=[(16, 0.001)]), \
                patch.object(cli, "bench_breakdown", return_value=[(16, split)]):
            assert cli.main(["bench", "--sizes", "16", "--breakdown"]) == 0
        out = capsys.readouterr().out
        assert "dct/idct" in out
        assert "80.0%" in out


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
