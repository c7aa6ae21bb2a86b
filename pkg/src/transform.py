"""
Orthonormal DCT-II
==================
Fast forward and inverse orthonormal DCT-II, one-dimensional and separable
m-dimensional.

The transform of length n is computed from one real FFT of the even/odd
permuted sequence (Makhoul's reordering), so every length is O(n log n);
numpy's pocketfft backend handles non-power-of-two lengths with mixed-radix
and Bluestein kernels.

Usage:
    spectrum = dct_nd(t)
    t_back = idct_nd(spectrum)
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .types import GridError, GridTensor


@dataclass(frozen=True)
class TransformPlan:
    """Precomputed twiddles and scales for transforms of one length."""
    length: int
    twiddle: np.ndarray = field(repr=False)   # exp(-i pi k / 2n), k = 0..n//2
    scale: np.ndarray = field(repr=False)     # orthonormal scaling per coefficient

    @classmethod
    def create(cls, length: int) -> "TransformPlan":
        if length < 1:
            raise GridError(f"Transform length must be >= 1, got {length}")
        k = np.arange(length // 2 + 1)
        twiddle = np.exp(-1j * np.pi * k / (2 * length))
        scale = np.full(length, np.sqrt(2.0 / length))
        scale[0] = np.sqrt(1.0 / length)
        twiddle.setflags(write=False)
        scale.setflags(write=False)
        return cls(length=length, twiddle=twiddle, scale=scale)

    def forward(self, x: np.ndarray, axis: int = -1) -> np.ndarray:
        """Orthonormal DCT-II of every line of `x` along `axis`."""
        x = self._lines_last(x, axis)
        n = self.length
        h = n // 2

        v = np.concatenate((x[..., ::2], x[..., 1::2][..., ::-1]), axis=-1)
        w = self.twiddle * np.fft.rfft(v, axis=-1)

        out = np.empty(x.shape, dtype=np.float64)
        out[..., :h + 1] = w.real
        # U[n-k] = -Im(w[k]) for k = 1..n-h-1
        out[..., h + 1:] = -w.imag[..., 1:n - h][..., ::-1]
        out *= self.scale
        return np.moveaxis(out, -1, axis)

    def inverse(self, c: np.ndarray, axis: int = -1) -> np.ndarray:
        """Inverse of `forward` (orthonormal DCT-III) along `axis`."""
        c = self._lines_last(c, axis)
        n = self.length
        h = n // 2

        u = c / self.scale
        u_rev = np.zeros(u.shape[:-1] + (h + 1,), dtype=np.float64)
        u_rev[..., 1:] = u[..., ::-1][..., :h]
        spectrum = np.conj(self.twiddle) * (u[..., :h + 1] - 1j * u_rev)
        v = np.fft.irfft(spectrum, n=n, axis=-1)

        out = np.empty(c.shape, dtype=np.float64)
        half = (n + 1) // 2
        out[..., ::2] = v[..., :half]
        out[..., 1::2] = v[..., half:][..., ::-1]
        return np.moveaxis(out, -1, axis)

    def _lines_last(self, x: np.ndarray, axis: int) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 0:
            raise GridError("Cannot transform a scalar")
        if x.shape[axis] != self.length:
            raise GridError(
                f"Plan for length {self.length} cannot transform length {x.shape[axis]}"
            )
        return np.moveaxis(x, axis, -1)


@lru_cache(maxsize=64)
def get_plan(length: int) -> TransformPlan:
    """Shared, immutable plan for one transform length."""
    return TransformPlan.create(length)


def dct_1d(v) -> np.ndarray:
    """Orthonormal DCT-II of a vector."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise GridError("dct_1d expects a non-empty vector")
    return get_plan(v.size).forward(v)


def idct_1d(v) -> np.ndarray:
    """Inverse orthonormal DCT-II of a vector."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise GridError("idct_1d expects a non-empty vector")
    return get_plan(v.size).inverse(v)


def dct_nd(t: GridTensor, axes: Optional[Sequence[int]] = None) -> GridTensor:
    """Separable DCT-II: `dct_1d` along every axis in turn (all axes by default)."""
    out = np.asarray(t, dtype=np.float64)
    for axis in _axes(out, axes):
        out = get_plan(out.shape[axis]).forward(out, axis=axis)
    return np.ascontiguousarray(out)


def idct_nd(t: GridTensor, axes: Optional[Sequence[int]] = None) -> GridTensor:
    """Separable inverse DCT-II along every axis in turn."""
    out = np.asarray(t, dtype=np.float64)
    for axis in _axes(out, axes):
        out = get_plan(out.shape[axis]).inverse(out, axis=axis)
    return np.ascontiguousarray(out)


def _axes(t: np.ndarray, axes: Optional[Sequence[int]]) -> Sequence[int]:
    if t.ndim == 0 or t.size == 0:
        raise GridError("Cannot transform an empty grid")
    if axes is None:
        return range(t.ndim)
    for axis in axes:
        if not -t.ndim <= axis < t.ndim:
            raise GridError(f"Axis {axis} out of range for {t.ndim}-dimensional grid")
    return axes
