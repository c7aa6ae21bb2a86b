"""
Spectral Operator
=================
Eigenvalues of the second-difference operator D (reflecting borders, unit
spacing) and the spline filter built from them.

In the DCT-II basis D is diagonal, so every spline solve reduces to an
element-wise product with the gain tensor

    gamma = 1 / (1 + s * lambda**2)

where lambda sums the 1-D eigenvalues -2 + 2 cos(k pi / n_j) over axes.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from .types import GridError, GridTensor


@dataclass(frozen=True)
class SpectralFilter:
    """Per-frequency gains of the L2 spline for one grid shape and s."""
    shape: Tuple[int, ...]
    s: float
    gamma: np.ndarray = field(repr=False)

    @property
    def trace(self) -> float:
        """Trace of the hat matrix U diag(gamma) U^T."""
        return float(self.gamma.sum())


def eigenvalues_1d(n: int) -> np.ndarray:
    """Eigenvalues -2 + 2 cos(k pi / n), k = 0..n-1, of the 1-D operator D."""
    if n < 1:
        raise GridError(f"n must be >= 1, got {n}")
    return -2.0 + 2.0 * np.cos(np.pi * np.arange(n) / n)


def lambda_tensor(shape: Sequence[int]) -> GridTensor:
    """Sum over axes of the 1-D eigenvalues, broadcast to the full grid."""
    shape = _shape(shape)
    lam = np.zeros(shape)
    for axis, n in enumerate(shape):
        expand = [1] * len(shape)
        expand[axis] = n
        lam = lam + eigenvalues_1d(n).reshape(expand)
    return lam


def gamma_tensor(shape: Sequence[int], s: float) -> SpectralFilter:
    """Spline gains 1 / (1 + s * lambda^2) for a grid shape."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    return _cached_filter(_shape(shape), float(s))


@lru_cache(maxsize=32)
def _cached_filter(shape: Tuple[int, ...], s: float) -> SpectralFilter:
    lam = lambda_tensor(shape)
    gamma = 1.0 / (1.0 + s * lam * lam)
    gamma.setflags(write=False)
    return SpectralFilter(shape=shape, s=s, gamma=gamma)


def apply_filter(f: SpectralFilter, spectrum: GridTensor) -> GridTensor:
    """Element-wise product of the gains with a DCT spectrum."""
    if np.shape(spectrum) != f.shape:
        raise GridError(f"Spectrum shape {np.shape(spectrum)} does not match filter {f.shape}")
    return f.gamma * spectrum


def _shape(shape: Sequence[int]) -> Tuple[int, ...]:
    shape = tuple(int(n) for n in shape)
    if not shape or any(n < 1 for n in shape):
        raise GridError(f"Invalid grid shape {shape}")
    return shape
