"""
Synthetic Data
==============
Seeded generators of corrupted grid signals with their clean ground truth.

Contamination follows the robust-smoothing protocol:
    1. Gaussian noise r1 with standard deviation sigma on every sample
    2. on a fraction of the samples inside an outlier segment, uniform
       noise r2 in [lo, hi], then clipping: y = min(max(truth + r1 + r2, a), b)
    3. optional salt-and-pepper samples and missing samples (NaN)
"""

from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .types import GridTensor, Mask

KINDS = ("smooth-1d", "step-1d", "square-1d", "peaks-2d", "ramp", "depth-2d")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic instance."""
    kind: str
    shape: Tuple[int, ...]
    sigma: float = 0.0
    outlier_fraction: float = 0.0
    outlier_range: Tuple[float, float] = (-5.0, 5.0)
    clip: Optional[Tuple[float, float]] = None
    outlier_segment: Tuple[float, float] = (0.0, 1.0)  # fraction of axis 0
    salt_fraction: float = 0.0
    missing_fraction: float = 0.0
    seed: int = 0

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown synthetic kind '{self.kind}', expected one of {KINDS}")
        if not self.shape or any(n < 1 for n in self.shape):
            raise ValueError(f"Invalid shape {self.shape}")
        if self.kind.endswith("-1d") and len(self.shape) != 1:
            raise ValueError(f"{self.kind} needs a 1-D shape, got {self.shape}")
        if self.kind.endswith("-2d") and len(self.shape) != 2:
            raise ValueError(f"{self.kind} needs a 2-D shape, got {self.shape}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        for name in ("outlier_fraction", "salt_fraction", "missing_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.missing_fraction >= 1.0:
            raise ValueError("missing_fraction must leave at least one sample")
        lo, hi = self.outlier_range
        if lo > hi:
            raise ValueError(f"Empty outlier range [{lo}, {hi}]")
        if self.clip is not None and self.clip[0] > self.clip[1]:
            raise ValueError(f"Empty clip range {self.clip}")
        start, stop = self.outlier_segment
        if not 0.0 <= start < stop <= 1.0:
            raise ValueError(f"Outlier segment must satisfy 0 <= start < stop <= 1, got {self.outlier_segment}")


@dataclass
class SyntheticSample:
    """Corrupted observation (NaN = missing) with its ground truth."""
    observation: GridTensor
    truth: GridTensor
    mask: Mask
    outliers: Mask


# Named setups used by the CLI and the acceptance tests
PRESETS: Dict[str, SyntheticSpec] = {
    "smooth-outliers": SyntheticSpec(
        kind="smooth-1d", shape=(4096,), sigma=0.1, outlier_fraction=0.3,
        outlier_range=(-5.0, 5.0), clip=(-5.0, 5.0), outlier_segment=(0.4, 0.6),
    ),
    "step-outliers": SyntheticSpec(
        kind="step-1d", shape=(4096,), sigma=0.1, outlier_fraction=0.3,
        outlier_range=(-5.0, 5.0), clip=(-5.0, 5.0), outlier_segment=(0.4, 0.6),
    ),
    "peaks-outliers": SyntheticSpec(
        kind="peaks-2d", shape=(256, 256), sigma=np.sqrt(2.0), outlier_fraction=0.05,
        outlier_range=(-40.0, 40.0),
    ),
    "square-wave": SyntheticSpec(kind="square-1d", shape=(1024,), sigma=0.1),
    "depth-map": SyntheticSpec(
        kind="depth-2d", shape=(64, 64), sigma=0.01, salt_fraction=0.02, missing_fraction=0.1,
    ),
}


def preset(name: str, **overrides) -> SyntheticSpec:
    """A named spec with fields overridden (e.g. shape, seed)."""
    if name not in PRESETS:
        raise ValueError(f"Unknown preset '{name}', expected one of {sorted(PRESETS)}")
    return replace(PRESETS[name], **overrides)


def clean_signal(kind: str, shape: Sequence[int]) -> GridTensor:
    """Noise-free ground truth of a synthetic kind."""
    shape = tuple(int(n) for n in shape)
    if kind == "smooth-1d":
        x = np.arange(shape[0]) / shape[0]
        return 2.0 * np.sin(2 * np.pi * 1.5 * x) + 0.8 * np.cos(2 * np.pi * 4 * x)
    if kind == "step-1d":
        x = np.arange(shape[0]) / shape[0]
        levels = np.array([0.0, 2.0, -1.0, 1.0])
        return levels[np.minimum((x * 4).astype(int), 3)]
    if kind == "square-1d":
        period = max(shape[0] // 8, 2)
        return np.where((np.arange(shape[0]) % period) < period // 2, 1.0, -1.0)
    if kind == "peaks-2d":
        x, y = np.meshgrid(
            np.linspace(-3, 3, shape[1]), np.linspace(-3, 3, shape[0]), indexing="xy",
        )
        return (
            3 * (1 - x) ** 2 * np.exp(-x ** 2 - (y + 1) ** 2)
            - 10 * (x / 5 - x ** 3 - y ** 5) * np.exp(-x ** 2 - y ** 2)
            - np.exp(-(x + 1) ** 2 - y ** 2) / 3
        )
    if kind == "ramp":
        ramp = np.arange(shape[0], dtype=np.float64) / max(shape[0] - 1, 1)
        return np.broadcast_to(ramp.reshape((-1,) + (1,) * (len(shape) - 1)), shape).copy()
    if kind == "depth-2d":
        rows, cols = np.indices(shape)
        depth = np.full(shape, 3.0)
        depth[(rows > shape[0] // 4) & (cols > shape[1] // 5) & (cols < shape[1] // 2)] = 1.5
        depth[(rows - shape[0] * 0.6) ** 2 + (cols - shape[1] * 0.7) ** 2 < (shape[0] / 6) ** 2] = 2.0
        return depth
    raise ValueError(f"Unknown synthetic kind '{kind}', expected one of {KINDS}")


def generate_synthetic(spec: SyntheticSpec) -> SyntheticSample:
    """Deterministic corrupted instance for a spec (same seed, same bits)."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    truth = clean_signal(spec.kind, spec.shape)
    y = truth + spec.sigma * rng.standard_normal(truth.shape)

    # Uniform outliers inside the segment along axis 0
    n0 = spec.shape[0]
    start = int(np.floor(spec.outlier_segment[0] * n0))
    stop = max(int(np.ceil(spec.outlier_segment[1] * n0)), start + 1)
    in_segment = np.zeros(truth.shape, dtype=bool)
    in_segment[start:stop] = True
    outliers = in_segment & (rng.random(truth.shape) < spec.outlier_fraction)
    r2 = rng.uniform(spec.outlier_range[0], spec.outlier_range[1], size=truth.shape)
    corrupted = y + r2
    if spec.clip is not None:
        corrupted = np.clip(corrupted, spec.clip[0], spec.clip[1])
    y = np.where(outliers, corrupted, y)

    if spec.salt_fraction > 0:
        salt = rng.random(truth.shape) < spec.salt_fraction
        pepper_or_salt = np.where(rng.random(truth.shape) < 0.5, truth.min(), truth.max())
        y = np.where(salt, pepper_or_salt, y)
        outliers |= salt

    mask = rng.random(truth.shape) >= spec.missing_fraction
    if spec.kind == "depth-2d":
        # shadow-like holes next to depth edges
        r0, c0 = spec.shape[0] // 4, spec.shape[1] // 5
        mask[r0:r0 + max(spec.shape[0] // 8, 1), c0:c0 + max(spec.shape[1] // 16, 1)] = False
    if not mask.any():
        mask.flat[0] = True

    observation = np.where(mask, y, np.nan)
    return SyntheticSample(observation=observation, truth=truth, mask=mask, outliers=outliers & mask)
