"""
Unit Tests for Grid Tensors
===========================
Validation, mask extraction, axis lines and relative change.

Run: python -m pytest tests/test_grid.py -v
"""

import pytest
import numpy as np

import sys
sys.path.insert(0, '.')

from src.grid import (
    LineDescriptor,
    as_grid,
    extract_mask,
    lines_along_axis,
    nearest_fill,
    relative_change,
    rmse,
    validate_mask,
)
from src.types import GridError, MaskError


# ============================================================
# Construction Tests
# ============================================================

class TestAsGrid:
    """Test grid validation."""

    def test_reshape_row_major(self):
        t = as_grid(range(6), shape=[2, 3])
        assert t.shape == (2, 3)
        assert t[1, 0] == 3.0

    def test_size_must_fill_shape(self):
        with pytest.raises(GridError):
            as_grid(range(5), shape=[2, 3])

    def test_zero_dimension_rejected(self):
        with pytest.raises(GridError):
            as_grid([], shape=[0])

    def test_nan_rejected_by_default(self):
        with pytest.raises(GridError):
            as_grid([1.0, np.nan])

    def test_inf_rejected_even_when_nan_allowed(self):
        with pytest.raises(GridError):
            as_grid([1.0, np.inf], allow_nan=True)

    def test_nan_allowed_at_ingestion(self):
        t = as_grid([1.0, np.nan], allow_nan=True)
        assert np.isnan(t[1])


# ============================================================
# Mask Tests
# ============================================================

class TestMasks:
    """Test NaN extraction and mask validation."""

    def test_nan_becomes_zero_and_unobserved(self):
        values, mask = extract_mask(np.array([1.0, np.nan, 3.0]))
        assert values.tolist() == [1.0, 0.0, 3.0]
        assert mask.tolist() == [True, False, True]

    def test_explicit_mask_combines_with_nan(self):
        values, mask = extract_mask(np.array([1.0, np.nan, 3.0]), np.array([False, True, True]))
        assert mask.tolist() == [False, False, True]
        assert values.tolist() == [0.0, 0.0, 3.0]

    def test_all_missing_rejected(self):
        with pytest.raises(MaskError):
            extract_mask(np.array([np.nan, np.nan]))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(MaskError):
            validate_mask(np.ones((2, 2), dtype=bool), (4,))

    def test_nearest_fill_1d(self):
        t = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 5.0])
        observed = np.array([True, False, False, False, False, True])
        assert nearest_fill(t, observed).tolist() == [1.0, 1.0, 1.0, 5.0, 5.0, 5.0]

    def test_nearest_fill_2d_keeps_observed(self):
        t = np.arange(12.0).reshape(3, 4)
        observed = np.ones((3, 4), dtype=bool)
        observed[1, 1] = False
        filled = nearest_fill(t, observed)
        assert np.array_equal(filled[observed], t[observed])
        assert filled[1, 1] in (t[0, 1], t[1, 0], t[1, 2], t[2, 1])

    def test_nearest_fill_needs_an_observation(self):
        with pytest.raises(MaskError):
            nearest_fill(np.zeros(3), np.zeros(3, dtype=bool))


# ============================================================
# Axis Line Tests
# ============================================================

class TestLinesAlongAxis:
    """Test stride descriptors over row-major grids."""

    def test_2x3_axis0(self):
        lines = list(lines_along_axis([2, 3], 0))
        assert len(lines) == 3
        assert all(line.length == 2 for line in lines)

    def test_1d(self):
        lines = list(lines_along_axis([5], 0))
        assert lines == [LineDescriptor(offset=0, stride=1, length=5)]

    def test_3d_axis1_matches_brute_force(self):
        shape = (2, 3, 4)
        lines = list(lines_along_axis(shape, 1))
        assert len(lines) == 8

        flat = np.arange(24).reshape(shape)
        expected = {tuple(flat[i, :, k]) for i in range(2) for k in range(4)}
        got = {tuple(line.indices()) for line in lines}
        assert got == expected

    @pytest.mark.parametrize("axis", [0, 1, 2])
    def test_lines_partition_indices(self, axis):
        shape = (3, 4, 5)
        indices = np.concatenate([line.indices() for line in lines_along_axis(shape, axis)])
        assert sorted(indices.tolist()) == list(range(60))

    def test_view_is_not_a_copy(self):
        flat = np.arange(12.0)
        line = next(iter(lines_along_axis((3, 4), 0)))
        line.view(flat)[:] = -1.0
        assert flat.reshape(3, 4)[:, 0].tolist() == [-1.0, -1.0, -1.0]

    def test_axis_out_of_range(self):
        with pytest.raises(GridError):
            list(lines_along_axis([2, 3], 2))


# ============================================================
# Relative Change Tests
# ============================================================

class TestRelativeChange:
    """Test the stopping-rule metric."""

    def test_identical_is_zero(self):
        a = np.random.default_rng(0).standard_normal((4, 5))
        assert relative_change(a, a) == 0.0

    def test_unit_change(self):
        assert relative_change(np.array([2.0, 0.0]), np.array([1.0, 0.0])) == pytest.approx(1.0)

    def test_zero_denominator_returns_norm_of_a(self):
        assert relative_change(np.array([3.0, 4.0]), np.array([0.0, 0.0])) == pytest.approx(5.0)

    def test_shape_mismatch(self):
        with pytest.raises(GridError):
            relative_change(np.zeros(3), np.zeros(4))

    def test_rmse_on_mask(self):
        a = np.array([1.0, 2.0, 10.0])
        b = np.array([1.0, 0.0, 0.0])
        assert rmse(a, b, np.array([True, True, False])) == pytest.approx(np.sqrt(2.0))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
