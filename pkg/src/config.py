"""
Smoothing Configuration
=======================
Environment defaults for the solvers and the validated job description
used by the CLI.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .synthetic import PRESETS
from .types import Method

load_dotenv()


@dataclass
class SolverDefaults:
    """Solver defaults, overridable through the environment."""

    # Split-Bregman stopping rule
    eps: float
    max_outer: int
    inner_iters: int

    # GCV search grid, log10(s)
    gcv_log10_min: float
    gcv_log10_max: float
    gcv_points: int

    # Robust L2
    irls_rounds: int

    log_level: str

    @classmethod
    def from_env(cls) -> "SolverDefaults":
        """Load defaults from environment variables."""
        return cls(
            eps=float(os.getenv("L1SPLINE_EPS", "1e-3")),
            max_outer=int(os.getenv("L1SPLINE_MAX_OUTER", "100")),
            inner_iters=int(os.getenv("L1SPLINE_INNER_ITERS", "1")),
            gcv_log10_min=float(os.getenv("L1SPLINE_GCV_LOG10_MIN", "-6")),
            gcv_log10_max=float(os.getenv("L1SPLINE_GCV_LOG10_MAX", "6")),
            gcv_points=int(os.getenv("L1SPLINE_GCV_POINTS", "61")),
            irls_rounds=int(os.getenv("L1SPLINE_IRLS_ROUNDS", "3")),
            log_level=os.getenv("L1SPLINE_LOG_LEVEL", "WARNING").upper(),
        )


class JobConfig(BaseModel):
    """One smoothing job: input, method, smoothing parameters and outputs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    method: Method

    # Input: a file, or a bundled synthetic preset
    input_path: Optional[Path] = None
    synthetic: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    mask_path: Optional[Path] = None
    shape: Optional[Tuple[int, ...]] = None

    # Smoothing parameter: fixed s or GCV on the robust L2 problem
    s: Optional[float] = Field(default=None, ge=0)
    gcv: bool = False
    gcv_log10_range: Tuple[float, float] = (-6.0, 6.0)
    gcv_points: int = Field(default=61, ge=2)

    # L1 split-Bregman
    lam: Optional[float] = Field(default=None, gt=0)
    eps: float = Field(default=1e-3, gt=0)
    max_outer: int = Field(default=100, ge=1)
    inner_iters: int = Field(default=1, ge=1)

    # Robust L2
    irls_rounds: int = Field(default=3, ge=1)

    # 3-D frame stacks: sliding window along axis 0
    window: Optional[int] = Field(default=None, ge=1)

    output_path: Path
    trace_path: Optional[Path] = None
    weights_path: Optional[Path] = None

    @model_validator(mode="after")
    def _check_combination(self) -> "JobConfig":
        if (self.s is None) == (not self.gcv):
            raise ValueError("provide exactly one of s or gcv")
        if (self.input_path is None) == (self.synthetic is None):
            raise ValueError("provide exactly one of an input path or a synthetic preset")
        if self.synthetic is not None and self.synthetic not in PRESETS:
            raise ValueError(f"unknown synthetic preset '{self.synthetic}', expected one of {sorted(PRESETS)}")
        if self.shape is not None and any(n < 1 for n in self.shape):
            raise ValueError(f"invalid shape {self.shape}")
        lo, hi = self.gcv_log10_range
        if not lo < hi:
            raise ValueError(f"degenerate GCV range [{lo}, {hi}]")
        if self.method is Method.L1 and self.s is not None and self.s <= 0:
            raise ValueError("the L1 spline needs s > 0")
        if self.method is not Method.L1 and self.lam is not None:
            raise ValueError("lambda only applies to the l1 method")
        if self.weights_path is not None and self.method is not Method.ROBUST_L2:
            raise ValueError("robust weights are only produced by the robust-l2 method")
        if self.window is not None:
            ndim = len(self.shape) if self.shape is not None else None
            if self.synthetic is not None:
                ndim = len(PRESETS[self.synthetic].shape)
            if ndim is not None and ndim != 3:
                raise ValueError(f"window applies to 3-D frame stacks, not {ndim}-D input")
        return self

    @classmethod
    def with_defaults(cls, defaults: SolverDefaults, **fields) -> "JobConfig":
        """Build a job, filling unset solver fields from `defaults`."""
        base = {
            "eps": defaults.eps,
            "max_outer": defaults.max_outer,
            "inner_iters": defaults.inner_iters,
            "gcv_log10_range": (defaults.gcv_log10_min, defaults.gcv_log10_max),
            "gcv_points": defaults.gcv_points,
            "irls_rounds": defaults.irls_rounds,
        }
        base.update({k: v for k, v in fields.items() if v is not None})
        return cls(**base)
