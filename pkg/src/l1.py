"""
L1 Splines
==========
Minimize ||z - y||_1 + s ||Dz||_2^2 by split-Bregman iteration.

Each outer iteration is one spectral L2 solve with s~ = 2s / lambda, one
soft-thresholding step and one Bregman update:

    z <- idct(gamma~ * dct(d + y - b))
    d <- shrink(z - y + b, 1 / lambda)
    b <- b + (z - y - d)

With missing data the z-update becomes a weighted spline solve and d, b
are only updated where the sample is observed.

The last d is kept on the report: observed samples where it is exactly 0
are the ones the spline passes through, the rest are fitted as outliers.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .grid import as_grid, extract_mask, nearest_fill, relative_change
from .l2 import weighted_l2_spline
from .spectral import apply_filter, gamma_tensor, lambda_tensor
from .transform import dct_nd, idct_nd
from .types import GridError, GridTensor, Mask, SolveParams, SolveReport, WeightedSolveParams

LOG = logging.getLogger(__name__)


def shrink(v: GridTensor, gamma: float) -> GridTensor:
    """Soft threshold: sign(v) * max(|v| - gamma, 0), with shrink(0) = 0."""
    if gamma <= 0:
        raise ValueError(f"Shrinkage threshold must be positive, got {gamma}")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - gamma, 0.0)


def l1_spline(y: GridTensor, params: SolveParams) -> Tuple[GridTensor, SolveReport]:
    """
    L1 spline of a fully observed grid.

    Args:
        y: finite data
        params: s, lambda, eps, max_outer, inner_iters

    Returns:
        (estimate, report with one relative change per outer iteration)
    """
    try:
        y = as_grid(y)
    except GridError as e:
        raise GridError(f"l1_spline needs finite input: {e}") from e

    f = gamma_tensor(y.shape, params.s_tilde)
    threshold = 1.0 / params.lam
    d = np.zeros_like(y)
    b = np.zeros_like(y)
    z_prev = y
    report = SolveReport()

    for _ in range(params.max_outer):
        for _ in range(params.inner_iters):
            z = idct_nd(apply_filter(f, dct_nd(d + y - b)))
            d = shrink(z - y + b, threshold)
        b = b + (z - y - d)

        change = relative_change(z, z_prev)
        z_prev = z
        LOG.debug("outer iter %d: change %.3e", report.iterations + 1, change)
        if report.record(change, params.eps):
            break

    report.outlier_part = d
    _log_summary("l1 spline", report, params)
    return z_prev, report


def l1_spline_masked(
    y: GridTensor,
    mask: Mask,
    params: SolveParams,
) -> Tuple[GridTensor, SolveReport]:
    """
    L1 spline with missing data.

    The z-update is a weighted spline solve warm-started from the previous
    z; d and b stay exactly zero where the mask is False. A full mask runs
    `l1_spline` itself, so both give identical iterates.
    """
    y, observed = extract_mask(y, mask)
    if observed.all():
        return l1_spline(y, params)

    f = gamma_tensor(y.shape, params.s_tilde)
    threshold = 1.0 / params.lam
    d = np.zeros_like(y)
    b = np.zeros_like(y)
    z = nearest_fill(y, observed)
    z_prev = z
    report = SolveReport()

    for _ in range(params.max_outer):
        for _ in range(params.inner_iters):
            inner = WeightedSolveParams(
                s=params.s_tilde,
                tol=params.masked_inner_tol,
                max_iter=params.masked_inner_max_iter,
                initial=z,
            )
            z, _ = weighted_l2_spline(d + y - b, observed, inner, spectral_filter=f)
            d = np.where(observed, shrink(z - y + b, threshold), 0.0)
        b = np.where(observed, b + (z - y - d), 0.0)

        change = relative_change(z, z_prev)
        z_prev = z
        LOG.debug("outer iter %d: change %.3e", report.iterations + 1, change)
        if report.record(change, params.eps):
            break

    report.outlier_part = d
    _log_summary("masked l1 spline", report, params)
    return z, report


def l1_objective(y: GridTensor, z: GridTensor, s: float, mask: Optional[Mask] = None) -> float:
    """F(z) = ||z - y||_1 (observed points) + s ||Dz||_2^2, with ||Dz|| from the spectrum."""
    y = as_grid(y, allow_nan=True)
    z = as_grid(z)
    if y.shape != z.shape:
        raise GridError(f"Shape mismatch: {y.shape} vs {z.shape}")
    y, observed = extract_mask(y, mask)
    fit = float(np.sum(np.abs(z - y)[observed]))
    dz = lambda_tensor(z.shape) * dct_nd(z)
    return fit + s * float(np.sum(dz * dz))


def control_points(y: GridTensor, z: GridTensor, mask: Optional[Mask] = None, atol: float = 1e-6) -> Mask:
    """Observed points the spline passes through: |z_i - y_i| <= atol."""
    y, observed = extract_mask(y, mask)
    if np.shape(z) != y.shape:
        raise GridError(f"Shape mismatch: {y.shape} vs {np.shape(z)}")
    return observed & (np.abs(np.asarray(z) - y) <= atol)


def _log_summary(name: str, report: SolveReport, params: SolveParams):
    if report.converged:
        LOG.info("%s converged in %d iterations (change %.3e)",
                 name, report.iterations, report.final_change)
    else:
        LOG.warning("%s hit the %d-iteration cap (change %.3e > eps %.1e)",
                    name, params.max_outer, report.final_change, params.eps)
