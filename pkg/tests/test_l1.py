"""
Unit Tests for L1 Splines
=========================
Soft thresholding, split-Bregman iteration (full and masked), the
objective and control points, plus seeded robustness checks against the
L2 and bisquare-IRLS splines.

Run: python -m pytest tests/test_l1.py -v
"""

import pytest
import numpy as np
from numpy.testing import assert_allclose

import sys
sys.path.insert(0, '.')

from src.grid import extract_mask, relative_change, rmse
from src.l1 import control_points, l1_objective, l1_spline, l1_spline_masked, shrink
from src.l2 import l2_spline, robust_gcv_select_s, robust_l2_spline
from src.oracle import l1_objective_dense, l1_optimality_residual, prox_gradient_reference
from src.synthetic import SyntheticSpec, generate_synthetic, preset
from src.types import GridError, SolveParams, StopReason


def noisy_signal(n, seed, outliers=4):
    """Smooth signal with Gaussian noise and a few large positive spikes."""
    rng = np.random.default_rng(seed)
    x = np.arange(n) / n
    y = np.sin(2 * np.pi * x) + 0.1 * rng.standard_normal(n)
    y[rng.choice(n, outliers, replace=False)] += 3.0
    return y


@pytest.fixture
def signal_64():
    return noisy_signal(64, seed=1)


# ============================================================
# Shrink Tests
# ============================================================

class TestShrink:
    """Test the soft-threshold operator."""

    def test_examples(self):
        assert_allclose(shrink(np.array([-3.0, -0.5, 0.0, 0.5, 3.0]), 1.0), [-2.0, 0.0, 0.0, 0.0, 2.0])

    def test_zero_stays_zero(self):
        assert shrink(np.zeros(3), 0.1).tolist() == [0.0, 0.0, 0.0]

    def test_non_expansive(self):
        rng = np.random.default_rng(0)
        a, b = rng.standard_normal((2, 100))
        assert np.linalg.norm(shrink(a, 0.3) - shrink(b, 0.3)) <= np.linalg.norm(a - b)

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError):
            shrink(np.ones(2), 0.0)


# ============================================================
# Parameter and Report Tests
# ============================================================

class TestSolveParams:
    """Test parameter defaults and validation."""

    def test_lambda_defaults_to_min_s_one(self):
        assert SolveParams(s=0.25).lam == 0.25
        assert SolveParams(s=50.0).lam == 1.0

    def test_s_tilde(self):
        assert SolveParams(s=10.0, lam=4.0).s_tilde == pytest.approx(5.0)

    @pytest.mark.parametrize("kwargs", [
        {"s": 0.0},
        {"s": 1.0, "lam": -1.0},
        {"s": 1.0, "eps": 0.0},
        {"s": 1.0, "max_outer": 0},
        {"s": 1.0, "inner_iters": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SolveParams(**kwargs)


class TestReport:
    """Test the iteration trace."""

    def test_trace_length_and_stop_rule(self, signal_64):
        params = SolveParams(s=5.0)
        _, report = l1_spline(signal_64, params)
        assert len(report.trace) == report.iterations <= params.max_outer
        assert report.converged == (report.trace[-1] < params.eps)
        assert all(change >= params.eps for change in report.trace[:-1])

    def test_cap_of_one(self, signal_64):
        _, report = l1_spline(signal_64, SolveParams(s=5.0, eps=1e-15, max_outer=1))
        assert report.iterations == 1
        assert not report.converged
        assert report.stop_reason is StopReason.ITERATION_CAP

    def test_to_dict(self, signal_64):
        _, report = l1_spline(signal_64, SolveParams(s=5.0))
        data = report.to_dict()
        assert data["iterations"] == report.iterations
        assert data["stop_reason"] in ("tolerance", "iteration_cap")


# ============================================================
# Split-Bregman Tests
# ============================================================

class TestL1Spline:
    """Test the unmasked solver."""

    def test_constant_is_fixed_point(self):
        y = np.full(50, 2.0)
        z, report = l1_spline(y, SolveParams(s=1.0))
        assert_allclose(z, y, atol=1e-12)
        assert report.converged
        assert report.iterations <= 2

    def test_rejects_nan(self):
        with pytest.raises(GridError):
            l1_spline(np.array([1.0, np.nan, 2.0]), SolveParams(s=1.0))

    def test_2d(self):
        rng = np.random.default_rng(2)
        y = np.add.outer(np.linspace(0, 1, 16), np.linspace(0, 1, 12)) + 0.05 * rng.standard_normal((16, 12))
        z, report = l1_spline(y, SolveParams(s=2.0))
        assert z.shape == y.shape
        assert np.all(np.isfinite(z))
        assert report.iterations >= 1

    def test_more_inner_iterations_same_minimizer(self, signal_64):
        one, _ = l1_spline(signal_64, SolveParams(s=1.0, eps=1e-10, max_outer=20000))
        two, _ = l1_spline(signal_64, SolveParams(s=1.0, eps=1e-10, max_outer=20000, inner_iters=2))
        assert relative_change(two, one) < 1e-3

    @pytest.mark.parametrize("n", [64, 256])
    def test_optimality_at_default_eps(self, n):
        """Kinks taken from the zero set of the outlier component."""
        y = noisy_signal(n, seed=n)
        z, report = l1_spline(y, SolveParams(s=0.5))
        assert l1_optimality_residual(y, z, 0.5, outlier_part=report.outlier_part) <= 1e-2

    @pytest.mark.parametrize("n", [64, 256])
    def test_optimality_at_tight_tolerance(self, n):
        y = noisy_signal(n, seed=n)
        z, report = l1_spline(y, SolveParams(s=0.5, eps=1e-12, max_outer=50000))
        assert l1_optimality_residual(y, z, 0.5, outlier_part=report.outlier_part) <= 1e-6

    def test_outlier_part_flags_spikes(self):
        y = np.sin(2 * np.pi * np.arange(64) / 64)
        y[[10, 40]] += 3.0
        z, report = l1_spline(y, SolveParams(s=5.0))
        d = report.outlier_part
        assert d.shape == y.shape
        assert d[10] < 0 and d[40] < 0
        assert np.count_nonzero(d == 0.0) > 0

    def test_agrees_with_proximal_gradient(self, signal_64):
        s = 0.5
        z, _ = l1_spline(signal_64, SolveParams(s=s, eps=1e-12, max_outer=50000))
        reference = prox_gradient_reference(signal_64, s, iters=100000)
        assert relative_change(z, reference) < 1e-3

    def test_beats_l2_on_its_objective(self):
        y = noisy_signal(128, seed=9, outliers=10)
        s = 5.0
        z, _ = l1_spline(y, SolveParams(s=s, eps=1e-6, max_outer=5000))
        assert l1_objective(y, z, s) <= l1_objective(y, l2_spline(y, s), s) + 1e-9

    def test_spectral_objective_matches_dense(self, signal_64):
        z = l2_spline(signal_64, 3.0)
        assert l1_objective(signal_64, z, 3.0) == pytest.approx(l1_objective_dense(signal_64, z, 3.0), rel=1e-10)

    def test_control_points(self):
        y = np.array([0.0, 1.0, 2.0, 3.0])
        z = np.array([0.0, 1.5, 2.0, 3.0 + 1e-9])
        assert control_points(y, z).tolist() == [True, False, True, True]
        assert control_points(y, z, mask=np.array([False, True, True, True])).tolist() == [False, False, True, True]


# ============================================================
# Missing Data Tests
# ============================================================

class TestL1SplineMasked:
    """Test the masked solver."""

    def test_full_mask_reproduces_unmasked_trajectory(self, signal_64):
        params = SolveParams(s=2.0)
        z_full, report_full = l1_spline(signal_64, params)
        z_mask, report_mask = l1_spline_masked(signal_64, np.ones(64, dtype=bool), params)
        assert np.array_equal(z_full, z_mask)
        assert report_full.trace == report_mask.trace

    def test_ramp_gap_inpainted(self):
        ramp = np.linspace(0.0, 1.0, 60)
        mask = np.ones(60, dtype=bool)
        mask[20:36] = False
        z, report = l1_spline_masked(np.where(mask, ramp, np.nan), mask, SolveParams(s=10.0))
        assert report.converged
        assert np.max(np.abs(z[20:36] - ramp[20:36])) < 1e-3

    def test_outlier_part_zero_where_missing(self):
        y = noisy_signal(64, seed=5)
        mask = np.ones(64, dtype=bool)
        mask[30:38] = False
        _, report = l1_spline_masked(y, mask, SolveParams(s=2.0))
        assert np.all(report.outlier_part[~mask] == 0.0)

    def test_nan_marks_missing(self):
        y = noisy_signal(64, seed=4)
        y[10:14] = np.nan
        z, _ = l1_spline_masked(y, np.ones(64, dtype=bool), SolveParams(s=2.0))
        assert np.all(np.isfinite(z))

    def test_depth_map_stays_in_observed_range(self):
        sample = generate_synthetic(preset("depth-map", seed=3))
        y, observed = extract_mask(sample.observation, sample.mask)
        z, _ = l1_spline_masked(y, observed, SolveParams(s=1.0))
        lo, hi = y[observed].min(), y[observed].max()
        slack = 0.1 * (hi - lo)
        filled = z[~observed]
        assert np.all(np.isfinite(filled))
        assert np.all((filled >= lo - slack) & (filled <= hi + slack))

    def test_all_missing_rejected(self):
        with pytest.raises(GridError):
            l1_spline_masked(np.ones(5), np.zeros(5, dtype=bool), SolveParams(s=1.0))


# ============================================================
# Seeded Robustness Tests
# ============================================================

class TestRobustness:
    """Outlier-contaminated signals: the L1 spline should stay on the clean signal."""

    def test_converges_with_gcv_selected_s(self):
        sample = generate_synthetic(preset("smooth-outliers", seed=0))
        s, _ = robust_gcv_select_s(sample.observation)
        _, report = l1_spline(sample.observation, SolveParams(s=s))
        assert report.converged
        assert report.iterations < 50
        assert report.trace[-1] < 1e-3

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_one_sided_outliers(self, seed):
        spec = SyntheticSpec(
            kind="smooth-1d", shape=(4096,), sigma=0.1, outlier_fraction=0.4,
            outlier_range=(0.0, 5.0), clip=(-5.0, 5.0), outlier_segment=(0.4, 0.6), seed=seed,
        )
        sample = generate_synthetic(spec)
        s, _ = robust_gcv_select_s(sample.observation)

        l1_fit, _ = l1_spline(sample.observation, SolveParams(s=s))
        robust_fit, _ = robust_l2_spline(sample.observation, s)
        l2_fit = l2_spline(sample.observation, s)

        l1_error = rmse(l1_fit, sample.truth)
        assert l1_error < 0.5 * rmse(l2_fit, sample.truth)
        assert l1_error < rmse(robust_fit, sample.truth)

    def test_insensitive_to_lambda(self):
        rng = np.random.default_rng(163)
        t = np.arange(163, dtype=np.float64)
        y = 0.01 * t + 0.5 * np.sin(2 * np.pi * t / 12) + 0.3 * rng.standard_normal(163)
        y[rng.choice(163, 8, replace=False)] += 3.0

        fits = [
            l1_spline(y, SolveParams(s=200.0, lam=lam, eps=1e-8, max_outer=20000))[0]
            for lam in (0.1, 1.0, 10.0, 100.0)
        ]
        for i in range(len(fits)):
            for j in range(i + 1, len(fits)):
                assert relative_change(fits[i], fits[j]) < 0.05


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
