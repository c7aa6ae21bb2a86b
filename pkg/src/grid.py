"""
Grid Tensors
============
Dense m-dimensional real grids, observation masks and axis-line iteration.

A GridTensor is a C-contiguous float64 numpy array; a Mask is a boolean
array of the same shape (True = observed). Missing samples arrive as NaN
and are turned into (value 0, mask False) by `extract_mask` before any
solver sees them.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.ndimage import distance_transform_edt

from .types import GridError, GridTensor, Mask, MaskError

LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class LineDescriptor:
    """One axis line of a flat row-major buffer: `length` elements from `offset` every `stride`."""
    offset: int
    stride: int
    length: int

    def indices(self) -> np.ndarray:
        return self.offset + self.stride * np.arange(self.length)

    def view(self, flat: np.ndarray) -> np.ndarray:
        """Strided view (no copy) of this line inside a flat buffer."""
        stop = self.offset + self.stride * (self.length - 1) + 1
        return flat[self.offset:stop:self.stride]


def as_grid(data, shape: Optional[Sequence[int]] = None, allow_nan: bool = False) -> GridTensor:
    """
    Build a validated GridTensor.

    Args:
        data: array-like of reals (flat or already shaped)
        shape: optional target shape; data is reshaped row-major
        allow_nan: accept NaN (missing samples before mask extraction)

    Returns:
        C-contiguous float64 array
    """
    t = np.array(data, dtype=np.float64, order="C")
    if shape is not None:
        shape = tuple(int(n) for n in shape)
        if any(n < 1 for n in shape):
            raise GridError(f"Every dimension must be >= 1, got {shape}")
        if t.size != int(np.prod(shape)):
            raise GridError(f"{t.size} values do not fill shape {shape}")
        t = t.reshape(shape)
    if t.ndim < 1 or t.size == 0:
        raise GridError("A grid needs at least one dimension and one sample")

    bad = ~np.isfinite(t)
    if allow_nan:
        bad &= ~np.isnan(t)
    if bad.any():
        raise GridError(f"Grid contains {int(bad.sum())} non-finite values")
    return t


def validate_mask(mask: Mask, shape: Tuple[int, ...]) -> Mask:
    """Check a mask against its tensor shape; returns it as a bool array."""
    m = np.asarray(mask)
    if m.shape != tuple(shape):
        raise MaskError(f"Mask shape {m.shape} does not match grid shape {tuple(shape)}")
    m = m.astype(bool, copy=False)
    if not m.any():
        raise MaskError("Mask has no observed samples")
    return m


def extract_mask(t: GridTensor, mask: Optional[Mask] = None) -> Tuple[GridTensor, Mask]:
    """
    Split NaN-marked missing samples off a tensor.

    Returns a copy with missing entries set to 0, and the mask of observed
    entries (combined with an explicit `mask` if one is given).
    """
    t = as_grid(t, allow_nan=True)
    observed = np.isfinite(t)
    if mask is not None:
        observed &= validate_mask(mask, t.shape)
    observed = validate_mask(observed, t.shape)

    values = np.where(observed, t, 0.0)
    missing = observed.size - int(observed.sum())
    if missing:
        LOG.debug("%d of %d samples missing", missing, observed.size)
    return values, observed


def nearest_fill(t: GridTensor, observed: Mask) -> GridTensor:
    """Copy of t with every unobserved entry replaced by its nearest observed neighbour (Euclidean)."""
    t = np.asarray(t, dtype=np.float64)
    observed = validate_mask(observed, t.shape)
    if observed.all():
        return t.copy()
    _, nearest = distance_transform_edt(~observed, return_indices=True)
    return t[tuple(nearest)]


def lines_along_axis(shape: Sequence[int], axis: int) -> Iterator[LineDescriptor]:
    """
    Yield the n / n_axis lines of a row-major grid running along `axis`.

    Every flat index is covered by exactly one line.
    """
    shape = tuple(int(n) for n in shape)
    m = len(shape)
    if not 0 <= axis < m:
        raise GridError(f"Axis {axis} out of range for {m}-dimensional grid")

    strides = [int(np.prod(shape[j + 1:])) for j in range(m)]
    length = shape[axis]
    stride = strides[axis]
    other_axes = [j for j in range(m) if j != axis]
    for idx in np.ndindex(*[shape[j] for j in other_axes]):
        offset = sum(i * strides[j] for i, j in zip(idx, other_axes))
        yield LineDescriptor(offset=offset, stride=stride, length=length)


def relative_change(a: GridTensor, b: GridTensor) -> float:
    """
    ‖a − b‖₂ / ‖b‖₂.

    When ‖b‖₂ = 0 the result is ‖a‖₂, so an all-zero previous iterate
    still yields a small value for a small step.
    """
    if np.shape(a) != np.shape(b):
        raise GridError(f"Shape mismatch: {np.shape(a)} vs {np.shape(b)}")
    denom = float(np.linalg.norm(b))
    diff = float(np.linalg.norm(np.subtract(a, b)))
    if denom == 0.0:
        return float(np.linalg.norm(a))
    return diff / denom


def rmse(a: GridTensor, b: GridTensor, mask: Optional[Mask] = None) -> float:
    """Root-mean-square difference, optionally restricted to a mask."""
    if np.shape(a) != np.shape(b):
        raise GridError(f"Shape mismatch: {np.shape(a)} vs {np.shape(b)}")
    diff = np.subtract(a, b)
    if mask is not None:
        diff = diff[validate_mask(mask, np.shape(a))]
    return float(np.sqrt(np.mean(diff ** 2)))
