"""
Job Runner
==========
Orchestrates one smoothing job end to end:

load → select s → solve → write
  ↓        ↓         ↓       ↓
 file/   fixed or   l1/l2/  grid, trace,
 preset  GCV        robust  weights

Exit status: 0 converged, 2 stopped at the iteration cap (result still
written), 1 on any error.
"""

import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import JobConfig
from .formats import GridFile, read_grid, read_mask, write_grid, write_trace
from .grid import extract_mask, rmse
from .l1 import control_points, l1_spline, l1_spline_masked, shrink
from .l2 import l2_spline, robust_gcv_select_s, robust_l2_spline, weighted_l2_spline
from .spectral import apply_filter, gamma_tensor
from .synthetic import SyntheticSpec, generate_synthetic, preset
from .transform import dct_nd, idct_nd
from .types import GridTensor, Mask, Method, SolveParams, SolveReport, WeightedSolveParams

LOG = logging.getLogger(__name__)

EXIT_CONVERGED = 0
EXIT_ERROR = 1
EXIT_ITERATION_CAP = 2


@dataclass
class JobResult:
    """Outcome of one solve."""
    estimate: GridTensor
    s: float
    report: Optional[SolveReport] = None
    weights: Optional[GridTensor] = None

    @property
    def exit_code(self) -> int:
        if self.report is not None and not self.report.converged:
            return EXIT_ITERATION_CAP
        return EXIT_CONVERGED


@dataclass
class ComparisonRow:
    """One method's score on a synthetic instance."""
    method: str
    rmse: float
    iterations: Optional[int] = None
    control_points: Optional[int] = None


@dataclass
class Comparison:
    """Side-by-side scores of the three fitting terms with a shared s."""
    s: float
    rows: List[ComparisonRow] = field(default_factory=list)

    def best(self) -> ComparisonRow:
        return min(self.rows, key=lambda r: r.rmse)


def solve(
    y: GridTensor,
    mask: Mask,
    method: Method,
    s: float,
    config: JobConfig,
) -> JobResult:
    """Run one method on data with missing entries already zeroed."""
    if method is Method.L1:
        params = SolveParams(
            s=s, lam=config.lam, eps=config.eps,
            max_outer=config.max_outer, inner_iters=config.inner_iters,
        )
        z, report = l1_spline_masked(y, mask, params)
        return JobResult(estimate=z, s=s, report=report)

    if method is Method.ROBUST_L2:
        z, weights = robust_l2_spline(y, s, irls_rounds=config.irls_rounds, mask=mask)
        return JobResult(estimate=z, s=s, weights=weights)

    if mask.all():
        return JobResult(estimate=l2_spline(y, s), s=s)
    z, report = weighted_l2_spline(y, mask, WeightedSolveParams(s=s))
    return JobResult(estimate=z, s=s, report=report)


def smooth_frames(
    stack: GridTensor,
    mask: Mask,
    method: Method,
    s: float,
    config: JobConfig,
    window: int = 3,
) -> JobResult:
    """
    Sliding-window smoothing of a frame stack along axis 0.

    Frame i is taken from the spline fitted to the `window` frames
    centred on it (shifted inward at the ends).
    """
    frames = stack.shape[0]
    window = min(window, frames)
    half = window // 2
    out = np.empty_like(stack)
    weights = np.zeros_like(stack) if method is Method.ROBUST_L2 else None
    worst: Optional[SolveReport] = None

    for i in range(frames):
        lo = min(max(i - half, 0), frames - window)
        hi = lo + window
        if not mask[lo:hi].any():
            raise ValueError(f"frames {lo}..{hi - 1} hold no observed samples")
        result = solve(stack[lo:hi], mask[lo:hi], method, s, config)
        out[i] = result.estimate[i - lo]
        if weights is not None:
            weights[i] = result.weights[i - lo]
        if result.report is not None and (worst is None or not result.report.converged):
            worst = result.report
        LOG.debug("frame %d smoothed from frames %d..%d", i, lo, hi - 1)
    return JobResult(estimate=out, s=s, report=worst, weights=weights)


def select_s(y: GridTensor, mask: Mask, config: JobConfig) -> float:
    """Fixed s, or GCV on the robust L2 problem (reused for every method)."""
    if config.s is not None:
        return config.s
    s, _ = robust_gcv_select_s(
        y, mask,
        irls_rounds=config.irls_rounds,
        log10_range=config.gcv_log10_range,
        grid_points=config.gcv_points,
    )
    return s


def load_input(config: JobConfig) -> Tuple[GridFile, Optional[Mask]]:
    """Read the input file (or generate the preset) and the optional mask."""
    if config.synthetic is not None:
        overrides = {"seed": config.seed}
        if config.n is not None:
            overrides["shape"] = (config.n,) * len(preset(config.synthetic).shape)
        sample = generate_synthetic(preset(config.synthetic, **overrides))
        fmt = "csv" if sample.observation.ndim == 1 else "grid"
        grid = GridFile(data=sample.observation, fmt=fmt)
    else:
        grid = read_grid(config.input_path, config.shape)

    mask = None
    if config.mask_path is not None:
        mask = read_mask(config.mask_path, grid.data.shape)
    return grid, mask


def run(config: JobConfig) -> int:
    """Execute a job; returns the process exit status."""
    written: List[Path] = []
    try:
        grid, mask = load_input(config)
        y, observed = extract_mask(grid.data, mask)
        if config.window is not None and y.ndim != 3:
            raise ValueError(f"a sliding window needs a 3-D frame stack, got shape {y.shape}")
        s = select_s(y, observed, config)
        LOG.info("running %s with s = %.6g on shape %s", config.method.value, s, y.shape)

        if config.window is not None:
            result = smooth_frames(y, observed, config.method, s, config, window=config.window)
        else:
            result = solve(y, observed, config.method, s, config)

        write_grid(config.output_path, grid.with_data(result.estimate))
        written.append(Path(config.output_path))
        if config.trace_path is not None and result.report is not None:
            write_trace(config.trace_path, result.report)
            written.append(Path(config.trace_path))
        if config.weights_path is not None and result.weights is not None:
            write_grid(config.weights_path, grid.with_data(result.weights))
            written.append(Path(config.weights_path))
    except (ValueError, OSError) as e:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    _print_summary(config, result)
    return result.exit_code


def _print_summary(config: JobConfig, result: JobResult):
    print(f"\n=== {config.method.value} spline ===\n")
    print(f"s:          {result.s:.6g}")
    if result.report is not None:
        print(f"Iterations: {result.report.iterations}")
        print(f"Converged:  {'Yes' if result.report.converged else 'No (iteration cap)'}")
        if result.report.final_change is not None:
            print(f"Change:     {result.report.final_change:.3e}")
    if result.weights is not None:
        print(f"Outliers:   {int(np.sum(result.weights < 0.1))} points below weight 0.1")
    print(f"Output:     {config.output_path}")


def compare(
    spec: SyntheticSpec,
    config: JobConfig,
    s: Optional[float] = None,
) -> Comparison:
    """
    Score l2, bisquare-IRLS robust l2 and l1 on one synthetic instance.

    s is shared by all three; when not given it is selected by GCV on
    the robust L2 problem.
    """
    sample = generate_synthetic(spec)
    y, observed = extract_mask(sample.observation, sample.mask)
    if s is None:
        s, _ = robust_gcv_select_s(
            y, observed, irls_rounds=config.irls_rounds,
            log10_range=config.gcv_log10_range, grid_points=config.gcv_points,
        )

    table = Comparison(s=s)
    for method, label in ((Method.L2, "L2"), (Method.ROBUST_L2, "bisquare-IRLS"), (Method.L1, "L1")):
        result = solve(y, observed, method, s, config)
        row = ComparisonRow(method=label, rmse=rmse(result.estimate, sample.truth))
        if result.report is not None:
            row.iterations = result.report.iterations
        if method is Method.L1:
            row.control_points = int(control_points(y, result.estimate, observed).sum())
        table.rows.append(row)
    return table


def time_outer_iteration(n: int, repeats: int = 5, iterations: int = 5, seed: int = 0) -> float:
    """Best-of-`repeats` wall time of one split-Bregman outer iteration on a length-n signal."""
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n)
    # eps small enough that every run does exactly `iterations` outer loops
    params = SolveParams(s=10.0, eps=1e-300, max_outer=iterations)
    l1_spline(y, params)  # warm plans and filter cache
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        l1_spline(y, params)
        best = min(best, time.perf_counter() - start)
    return best / iterations


def bench(sizes: Sequence[int], repeats: int = 5) -> List[Tuple[int, float]]:
    """Seconds per outer iteration for each signal length."""
    return [(n, time_outer_iteration(n, repeats=repeats)) for n in sizes]


@dataclass
class OperationTimes:
    """Seconds per outer iteration spent in each step of the split-Bregman loop."""
    transform: float = 0.0  # forward and inverse DCT
    shrink: float = 0.0
    update: float = 0.0     # right-hand side, filter gains and Bregman update

    @property
    def total(self) -> float:
        return self.transform + self.shrink + self.update

    def shares(self) -> Dict[str, float]:
        """Fraction of the iteration time per step."""
        total = self.total or 1.0
        return {
            "transform": self.transform / total,
            "shrink": self.shrink / total,
            "update": self.update / total,
        }


def time_operations(n: int, iterations: int = 20, seed: int = 0) -> OperationTimes:
    """
    Per-step wall time of the split-Bregman outer iteration on a length-n signal.

    Runs the same steps as `l1_spline` with one inner iteration, timing
    each one separately.
    """
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n)
    params = SolveParams(s=10.0)
    f = gamma_tensor(y.shape, params.s_tilde)
    threshold = 1.0 / params.lam
    d = np.zeros_like(y)
    b = np.zeros_like(y)
    idct_nd(dct_nd(y))  # warm plans

    times = OperationTimes()
    clock = time.perf_counter
    for _ in range(iterations):
        t0 = clock()
        rhs = d + y - b
        t1 = clock()
        coeffs = dct_nd(rhs)
        t2 = clock()
        coeffs = apply_filter(f, coeffs)
        t3 = clock()
        z = idct_nd(coeffs)
        t4 = clock()
        d = shrink(z - y + b, threshold)
        t5 = clock()
        b = b + (z - y - d)
        t6 = clock()
        times.transform += (t2 - t1) + (t4 - t3)
        times.shrink += t5 - t4
        times.update += (t1 - t0) + (t3 - t2) + (t6 - t5)

    return OperationTimes(
        transform=times.transform / iterations,
        shrink=times.shrink / iterations,
        update=times.update / iterations,
    )


def bench_breakdown(sizes: Sequence[int], iterations: int = 20) -> List[Tuple[int, OperationTimes]]:
    """Per-step time split for each signal length."""
    return [(n, time_operations(n, iterations=iterations)) for n in sizes]
