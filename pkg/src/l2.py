"""
L2 Splines
==========
Classical smoothing splines solved with one DCT round trip, the weighted /
missing-data fixed-point iteration, bisquare-IRLS robust weighting and
generalized cross validation (GCV) for the smoothing parameter s.

The robust variant is a plain bisquare-IRLS baseline: residuals are
studentized by 1.4826 * MAD with no leverage correction.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from .grid import as_grid, extract_mask, nearest_fill, relative_change
from .spectral import SpectralFilter, apply_filter, gamma_tensor
from .transform import dct_nd, idct_nd
from .types import GridTensor, Mask, MaskError, SolveReport, StopReason, WeightedSolveParams

LOG = logging.getLogger(__name__)

BISQUARE_TUNE = 4.685
MAD_TO_SIGMA = 1.4826

DEFAULT_LOG10_RANGE = (-6.0, 6.0)
DEFAULT_GCV_POINTS = 61
DEFAULT_IRLS_ROUNDS = 3


def l2_spline(y: GridTensor, s: float) -> GridTensor:
    """Minimizer of ||z - y||^2 + s ||Dz||^2: idct(gamma * dct(y))."""
    y = as_grid(y)
    return _smooth(y, gamma_tensor(y.shape, s))


def _smooth(y: GridTensor, f: SpectralFilter) -> GridTensor:
    return idct_nd(apply_filter(f, dct_nd(y)))


def weighted_l2_spline(
    y: GridTensor,
    weights,
    params: WeightedSolveParams,
    spectral_filter: Optional[SpectralFilter] = None,
) -> Tuple[GridTensor, SolveReport]:
    """
    Weighted spline by the fixed-point iteration z <- idct(gamma * dct(W(y - z) + z)).

    Args:
        y: data; entries with zero weight are ignored
        weights: boolean mask or real weights in [0, 1], same shape as y
        params: s, stopping rule, relaxation and optional warm start; without
            a warm start, zero-weight entries start from their nearest
            weighted neighbour
        spectral_filter: precomputed gains for (y.shape, params.s)

    Returns:
        (estimate, report). Zero-weight locations are inpainted.
    """
    y = as_grid(y)
    w = _as_weights(weights, y.shape)
    f = spectral_filter or gamma_tensor(y.shape, params.s)
    report = SolveReport()

    # W = I: the update is exact in one step
    if np.all(w == 1.0):
        report.trace.append(0.0)
        report.iterations = 1
        report.converged = True
        report.stop_reason = StopReason.TOLERANCE
        return _smooth(y, f), report

    if params.initial is not None:
        z = as_grid(params.initial)
        if z.shape != y.shape:
            raise MaskError(f"Warm start shape {z.shape} does not match {y.shape}")
    else:
        z = nearest_fill(y, w > 0)

    r = params.relaxation
    for _ in range(params.max_iter):
        z_new = _smooth(w * (y - z) + z, f)
        if r != 1.0:
            z_new = r * z_new + (1.0 - r) * z
        change = relative_change(z_new, z)
        z = z_new
        LOG.debug("weighted iter %d: change %.3e", report.iterations + 1, change)
        if report.record(change, params.tol):
            break

    if not report.converged:
        LOG.info(
            "weighted spline stopped at iteration cap %d (change %.3e)",
            params.max_iter, report.final_change,
        )
    return z, report


def bisquare_weights(residuals: GridTensor, observed: Mask, tune: float = BISQUARE_TUNE) -> GridTensor:
    """
    Tukey bisquare weights of residuals studentized by 1.4826 * MAD.

    Unobserved entries get weight 0 and do not enter the scale estimate.
    """
    r_obs = residuals[observed]
    mad = float(np.median(np.abs(r_obs - np.median(r_obs))))
    scale = MAD_TO_SIGMA * mad
    if scale <= 0.0:
        scale = float(np.mean(np.abs(r_obs))) or 1.0
    u = residuals / (tune * scale)
    w = np.where(np.abs(u) < 1.0, (1.0 - u * u) ** 2, 0.0)
    return w * observed


def robust_l2_spline(
    y: GridTensor,
    s: float,
    irls_rounds: int = DEFAULT_IRLS_ROUNDS,
    mask: Optional[Mask] = None,
    tol: float = 1e-6,
    max_iter: int = 1000,
) -> Tuple[GridTensor, GridTensor]:
    """
    Bisquare-IRLS robust spline.

    Each round solves the weighted spline with the current weights, then
    recomputes the weights from the residuals.

    Returns:
        (estimate from the last round, weights computed from its residuals)
    """
    if irls_rounds < 1:
        raise ValueError(f"irls_rounds must be at least 1, got {irls_rounds}")
    y, observed = extract_mask(y, mask)
    weights = observed.astype(np.float64)
    f = gamma_tensor(y.shape, s)

    z = None
    for k in range(irls_rounds):
        params = WeightedSolveParams(s=s, tol=tol, max_iter=max_iter, initial=z)
        z, report = weighted_l2_spline(y, weights, params, spectral_filter=f)
        weights = bisquare_weights(y - z, observed)
        LOG.debug(
            "IRLS round %d: %d iterations, %d points below weight 0.1",
            k + 1, report.iterations, int(np.sum(weights[observed] < 0.1)),
        )
    return z, weights


def gcv_score(
    y: GridTensor,
    weights,
    s: float,
    tol: float = 1e-6,
    max_iter: int = 1000,
    initial: Optional[GridTensor] = None,
) -> Tuple[float, GridTensor]:
    """
    GCV(s) = (RSS_w / n_obs) / (1 - tr(H) / n)^2 with tr(H) = sum of gains.

    With every point observed this is n * RSS / (n - tr(H))^2.

    Returns:
        (score, fitted estimate)
    """
    y = as_grid(y)
    w = _as_weights(weights, y.shape)
    f = gamma_tensor(y.shape, s)
    params = WeightedSolveParams(s=s, tol=tol, max_iter=max_iter, initial=initial)
    z, _ = weighted_l2_spline(y, w, params, spectral_filter=f)

    n = y.size
    n_obs = int(np.count_nonzero(w))
    rss = float(np.sum(w * (y - z) ** 2))
    denom = (1.0 - f.trace / n) ** 2
    if denom == 0.0:
        return float("inf"), z
    return (rss / n_obs) / denom, z


def gcv_curve(
    y: GridTensor,
    mask: Optional[Mask] = None,
    log10_range: Sequence[float] = DEFAULT_LOG10_RANGE,
    grid_points: int = DEFAULT_GCV_POINTS,
    weights: Optional[GridTensor] = None,
    tol: float = 1e-6,
    max_iter: int = 1000,
) -> Tuple[np.ndarray, np.ndarray]:
    """GCV scores on a log-spaced grid of s. Returns (s_grid, scores)."""
    lo, hi = (float(v) for v in log10_range)
    if grid_points < 2:
        raise ValueError(f"grid_points must be at least 2, got {grid_points}")
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise ValueError(f"Degenerate log10 range [{lo}, {hi}]")

    y, observed = extract_mask(y, mask)
    w = observed.astype(np.float64) if weights is None else _as_weights(weights, y.shape) * observed

    s_grid = np.logspace(lo, hi, grid_points)
    scores = np.empty(grid_points)
    z = None
    for i, s in enumerate(s_grid):
        scores[i], z = gcv_score(y, w, s, tol=tol, max_iter=max_iter, initial=z)
    return s_grid, scores


def gcv_select_s(
    y: GridTensor,
    mask: Optional[Mask] = None,
    log10_range: Sequence[float] = DEFAULT_LOG10_RANGE,
    grid_points: int = DEFAULT_GCV_POINTS,
    weights: Optional[GridTensor] = None,
    tol: float = 1e-6,
    max_iter: int = 1000,
) -> float:
    """Grid argmin of GCV(s); ties go to the larger s."""
    s_grid, scores = gcv_curve(
        y, mask, log10_range, grid_points, weights=weights, tol=tol, max_iter=max_iter,
    )
    best = len(scores) - 1 - int(np.argmin(scores[::-1]))
    if best in (0, len(scores) - 1):
        LOG.warning("GCV minimum at the %s end of the s grid (s = %.3g)",
                    "lower" if best == 0 else "upper", s_grid[best])
    LOG.info("GCV selected s = %.6g", s_grid[best])
    return float(s_grid[best])


def robust_gcv_select_s(
    y: GridTensor,
    mask: Optional[Mask] = None,
    irls_rounds: int = DEFAULT_IRLS_ROUNDS,
    log10_range: Sequence[float] = DEFAULT_LOG10_RANGE,
    grid_points: int = DEFAULT_GCV_POINTS,
    tol: float = 1e-6,
    max_iter: int = 1000,
) -> Tuple[float, GridTensor]:
    """
    Select s on the robust L2 problem.

    Alternates GCV selection under the current robust weights with one
    bisquare reweighting, `irls_rounds` times.

    Returns:
        (selected s, final robust weights)
    """
    if irls_rounds < 1:
        raise ValueError(f"irls_rounds must be at least 1, got {irls_rounds}")
    y, observed = extract_mask(y, mask)
    weights = observed.astype(np.float64)
    s = 1.0
    for _ in range(irls_rounds):
        s = gcv_select_s(y, observed, log10_range, grid_points, weights=weights,
                         tol=tol, max_iter=max_iter)
        params = WeightedSolveParams(s=s, tol=tol, max_iter=max_iter)
        z, _ = weighted_l2_spline(y, weights, params)
        weights = bisquare_weights(y - z, observed)
    return s, weights


def _as_weights(weights, shape) -> GridTensor:
    w = np.asarray(weights)
    if w.shape != tuple(shape):
        raise MaskError(f"Weights shape {w.shape} does not match grid shape {tuple(shape)}")
    w = w.astype(np.float64)
    if not np.all(np.isfinite(w)) or np.any(w < 0) or np.any(w > 1):
        raise MaskError("Weights must lie in [0, 1]")
    if not np.any(w > 0):
        raise MaskError("All samples are missing")
    return w
