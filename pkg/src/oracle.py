"""
Reference Oracles
=================
Slow, independent implementations used to check the fast solvers:
dense difference operators, Cholesky solves, a naive cosine-sum DCT,
the first-order optimality residual of the L1 spline problem and a
proximal-gradient reference solver.

Nothing here calls the FFT-based transform or the spectral filter.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg

from .grid import lines_along_axis
from .types import GridError

LOG = logging.getLogger(__name__)

MAX_DENSE_SIZE = 4096
KINK_ATOL = 1e-9


class DivergenceError(RuntimeError):
    """Iterates of the reference solver blew up."""


def dense_D(n: int) -> np.ndarray:
    """Second-difference matrix with repeated borders: diagonal (-1, -2, ..., -2, -1), off-diagonals 1."""
    if n < 2:
        raise GridError(f"dense_D needs n >= 2, got {n}")
    _check_size(n)
    D = np.diag(np.full(n - 1, 1.0), 1) + np.diag(np.full(n - 1, 1.0), -1)
    D -= np.diag(D.sum(axis=1))
    return D


def dense_kronecker_sum(shape: Sequence[int]) -> np.ndarray:
    """Row-major m-D operator: sum over axes of I (x) ... (x) D_axis (x) ... (x) I."""
    shape = tuple(int(n) for n in shape)
    n_total = int(np.prod(shape))
    _check_size(n_total)
    L = np.zeros((n_total, n_total))
    for axis, n in enumerate(shape):
        term = np.ones((1, 1))
        for j, nj in enumerate(shape):
            factor = (dense_D(nj) if nj > 1 else np.zeros((1, 1))) if j == axis else np.eye(nj)
            term = np.kron(term, factor)
        L += term
    return L


def dense_l2_solve(y, s: float) -> np.ndarray:
    """(I + s D^T D)^{-1} y for a 1-D signal."""
    y = np.asarray(y, dtype=np.float64)
    return dense_weighted_solve(y, np.ones_like(y), s)


def dense_weighted_solve(y, w, s: float) -> np.ndarray:
    """Solve (W + s D^T D) z = W y for a 1-D signal with diagonal weights w."""
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if y.ndim != 1 or w.shape != y.shape:
        raise GridError("dense_weighted_solve expects matching 1-D y and w")
    if y.size == 1:
        return y.copy()
    D = dense_D(y.size)
    return _spd_solve(np.diag(w) + s * D.T @ D, w * y)


def dense_l2_solve_nd(y, s: float, w=None) -> np.ndarray:
    """(W + s L^T L) z = W y with L the Kronecker-sum operator of y's shape."""
    y = np.asarray(y, dtype=np.float64)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=np.float64)
    L = dense_kronecker_sum(y.shape)
    A = np.diag(w.ravel()) + s * L.T @ L
    return _spd_solve(A, (w * y).ravel()).reshape(y.shape)


def dense_l2_solve_2d(y, s: float) -> np.ndarray:
    """2-D case of `dense_l2_solve_nd`."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2:
        raise GridError(f"Expected a 2-D grid, got {y.ndim} dimensions")
    return dense_l2_solve_nd(y, s)


def _spd_solve(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=True)
    except linalg.LinAlgError as e:
        raise ValueError("Singular system: needs s > 0 or every weight positive") from e
    return linalg.cho_solve(factor, rhs)


def naive_dct(v) -> np.ndarray:
    """Orthonormal DCT-II by direct cosine summation, O(n^2)."""
    v = np.asarray(v, dtype=np.float64)
    n = v.size
    if v.ndim != 1 or n == 0:
        raise GridError("naive_dct expects a non-empty vector")
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    C = np.cos(np.pi * (2 * j + 1) * k / (2 * n))
    scale = np.full(n, np.sqrt(2.0 / n))
    scale[0] = np.sqrt(1.0 / n)
    return scale * (C @ v)


def naive_dct_nd(t) -> np.ndarray:
    """`naive_dct` applied line by line along every axis of a row-major grid."""
    t = np.array(t, dtype=np.float64, order="C")
    flat = t.ravel()
    for axis in range(t.ndim):
        for line in lines_along_axis(t.shape, axis):
            view = line.view(flat)
            view[:] = naive_dct(view.copy())
    return flat.reshape(t.shape)


def l1_objective_dense(y, z, s: float) -> float:
    """F(z) = ||z - y||_1 + s ||Dz||_2^2 with the dense 1-D operator."""
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    Dz = dense_D(y.size) @ z
    return float(np.sum(np.abs(z - y)) + s * Dz @ Dz)


def l1_optimality_residual(y, z, s: float, atol: float = KINK_ATOL, outlier_part=None) -> float:
    """
    Distance of 0 from the subdifferential of F at z.

    With g = 2s D^T D z: |g_i + sign(z_i - y_i)| where z_i != y_i and
    max(|g_i| - 1, 0) where |z_i - y_i| <= atol. Zero iff z minimizes F.

    When the solver's outlier component d is given, the kinks are the
    samples with d_i == 0 and sign(d_i) replaces sign(z_i - y_i) elsewhere;
    at an exact minimizer d = z - y, so both forms agree there.
    """
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if y.shape != z.shape:
        raise GridError(f"Shape mismatch: {y.shape} vs {z.shape}")
    if y.ndim == 1:
        op = dense_D(y.size)
    else:
        op = dense_kronecker_sum(y.shape)
    g = 2.0 * s * (op.T @ (op @ z.ravel()))
    if outlier_part is None:
        r = (z - y).ravel()
        on_kink = np.abs(r) <= atol
    else:
        r = np.asarray(outlier_part, dtype=np.float64)
        if r.shape != y.shape:
            raise GridError(f"Shape mismatch: {y.shape} vs {r.shape}")
        r = r.ravel()
        on_kink = r == 0.0
    res = np.where(on_kink, np.maximum(np.abs(g) - 1.0, 0.0), np.abs(g + np.sign(r)))
    return float(res.max())


def prox_gradient_reference(
    y,
    s: float,
    step: Optional[float] = None,
    iters: int = 10000,
    history: Optional[List[float]] = None,
) -> np.ndarray:
    """
    Proximal gradient on F(z) = ||z - y||_1 + s ||Dz||^2 for a 1-D signal.

    Gradient step on s ||Dz||^2, then a shrink toward y with threshold `step`.
    The default step is 1 / (32 s), the reciprocal Lipschitz bound.

    Args:
        history: if given, receives F after every iteration
    """
    y = np.asarray(y, dtype=np.float64)
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    if step is None:
        step = 1.0 / (32.0 * s)
    if not 0 < step < 1.0 / (16.0 * s):
        raise ValueError(f"step must lie in (0, 1/(16 s)), got {step}")

    D = dense_D(y.size)
    DtD = D.T @ D
    limit = 1e6 * (1.0 + np.linalg.norm(y))
    z = y.copy()
    for k in range(iters):
        x = z - step * 2.0 * s * (DtD @ z)
        r = x - y
        z = y + np.sign(r) * np.maximum(np.abs(r) - step, 0.0)
        if history is not None:
            history.append(l1_objective_dense(y, z, s))
        if not np.all(np.isfinite(z)) or np.linalg.norm(z) > limit:
            raise DivergenceError(f"Proximal gradient diverged at iteration {k + 1}")
    return z


def _check_size(n: int):
    if n > MAX_DENSE_SIZE:
        raise GridError(f"Dense oracle limited to {MAX_DENSE_SIZE} unknowns, got {n}")
