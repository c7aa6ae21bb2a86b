"""
Solver Types
============
Data structures shared by the spline solvers, the runner and the CLI.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import numpy.typing as npt


# Dense row-major real grid (houses y, z, d, b) and its observation mask.
GridTensor = npt.NDArray[np.float64]
Mask = npt.NDArray[np.bool_]


class GridError(ValueError):
    """Shape, axis or finiteness violation on a grid tensor."""


class MaskError(GridError):
    """Mask does not match its tensor, or no sample is observed."""


class FormatError(ValueError):
    """Malformed interchange file."""


class Method(Enum):
    """Smoothing method selectable from the CLI."""
    L1 = "l1"
    L2 = "l2"
    ROBUST_L2 = "robust-l2"


class StopReason(Enum):
    """Why an iterative solve stopped."""
    TOLERANCE = "tolerance"
    ITERATION_CAP = "iteration_cap"


@dataclass
class SolveReport:
    """Convergence record of an iterative solve."""
    iterations: int = 0
    converged: bool = False
    trace: List[float] = field(default_factory=list)
    stop_reason: StopReason = StopReason.ITERATION_CAP
    # Sparse outlier component d of the last split-Bregman iteration (L1 only)
    outlier_part: Optional[GridTensor] = field(default=None, repr=False, compare=False)

    def record(self, change: float, tol: float) -> bool:
        """Append one relative change; returns True when the solve should stop."""
        self.trace.append(change)
        self.iterations = len(self.trace)
        if change < tol:
            self.converged = True
            self.stop_reason = StopReason.TOLERANCE
            return True
        return False

    @property
    def final_change(self) -> Optional[float]:
        return self.trace[-1] if self.trace else None

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "stop_reason": self.stop_reason.value,
            "final_change": self.final_change,
        }


@dataclass
class WeightedSolveParams:
    """Parameters of the weighted / missing-data fixed-point iteration."""
    s: float
    tol: float = 1e-6
    max_iter: int = 1000
    relaxation: float = 1.75     # 1.0 is the plain fixed-point update
    initial: Optional[GridTensor] = None  # warm start; None means nearest-neighbour fill

    def __post_init__(self):
        if self.s < 0:
            raise ValueError(f"s must be nonnegative, got {self.s}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0 < self.relaxation < 2:
            raise ValueError(f"relaxation must lie in (0, 2), got {self.relaxation}")


@dataclass
class SolveParams:
    """Parameters of the split-Bregman L1 spline."""
    s: float
    lam: Optional[float] = None  # None means min(s, 1)
    eps: float = 1e-3
    max_outer: int = 100
    inner_iters: int = 1

    # Nested weighted solve used by the masked z-update
    masked_inner_tol: float = 1e-6
    masked_inner_max_iter: int = 50

    def __post_init__(self):
        if self.lam is None:
            self.lam = min(self.s, 1.0)
        if self.s <= 0:
            raise ValueError(f"s must be positive, got {self.s}")
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_outer < 1:
            raise ValueError(f"max_outer must be at least 1, got {self.max_outer}")
        if self.inner_iters < 1:
            raise ValueError(f"inner_iters must be at least 1, got {self.inner_iters}")
        if self.masked_inner_tol <= 0 or self.masked_inner_max_iter < 1:
            raise ValueError("masked inner solve needs tol > 0 and max_iter >= 1")

    @property
    def s_tilde(self) -> float:
        """Smoothing weight of the z-subproblem, 2s / lambda."""
        return 2.0 * self.s / self.lam
