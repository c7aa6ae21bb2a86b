"""
Text Formats
============
1-D CSV (one value per line) and the m-D grid text format.

Values are written with `repr(float)`, the shortest string that parses
back to the same double, so finite data round-trips bit-exactly.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from ..types import FormatError

SHAPE_HEADER = "#shape"


def _parse_value(token: str, where: str) -> float:
    if token.lower() == "nan":
        return float("nan")
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"{where}: cannot parse '{token}' as a number") from None
    if not np.isfinite(value):
        raise FormatError(f"{where}: non-finite value '{token}' (use NaN for missing)")
    return value


def _render_value(value: float) -> str:
    return "NaN" if np.isnan(value) else repr(float(value))


def parse_csv(text: str, shape: Optional[Sequence[int]] = None) -> np.ndarray:
    """One value per line; blank lines are skipped. Reshaped row-major when `shape` is given."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        token = line.strip().rstrip(",")
        if not token:
            continue
        if "," in token:
            raise FormatError(f"line {lineno}: expected one value per line")
        values.append(_parse_value(token, f"line {lineno}"))
    if not values:
        raise FormatError("CSV file holds no values")
    data = np.array(values)
    if shape is not None:
        data = _reshape(data, shape)
    return data


def render_csv(data: np.ndarray) -> str:
    return "".join(_render_value(v) + "\n" for v in np.asarray(data, dtype=np.float64).ravel())


def parse_grid_text(text: str) -> np.ndarray:
    """`#shape n1 .. nm` header followed by whitespace-separated row-major values."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(SHAPE_HEADER):
        raise FormatError(f"Grid text must start with '{SHAPE_HEADER} n1 ... nm'")
    shape = _parse_shape(lines[0][len(SHAPE_HEADER):].split())
    tokens = " ".join(lines[1:]).split()
    values = np.array([_parse_value(t, f"value {i + 1}") for i, t in enumerate(tokens)])
    return _reshape(values, shape)


def render_grid_text(data: np.ndarray) -> str:
    """Header line, then one line per run along the last axis."""
    data = np.asarray(data, dtype=np.float64)
    header = " ".join([SHAPE_HEADER] + [str(n) for n in data.shape])
    rows = data.reshape(-1, data.shape[-1])
    body = "".join(" ".join(_render_value(v) for v in row) + "\n" for row in rows)
    return header + "\n" + body


def parse_shape(spec: str) -> Tuple[int, ...]:
    """Shape declaration such as '64x64', '64,64' or '64 64'."""
    return _parse_shape(spec.replace("x", " ").replace(",", " ").split())


def _parse_shape(tokens) -> Tuple[int, ...]:
    try:
        shape = tuple(int(t) for t in tokens)
    except ValueError:
        raise FormatError(f"Invalid shape declaration {' '.join(tokens)!r}") from None
    if not shape or any(n < 1 for n in shape):
        raise FormatError(f"Invalid shape {shape}")
    return shape


def _reshape(values: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    shape = tuple(shape)
    if values.size != int(np.prod(shape)):
        raise FormatError(f"{values.size} values do not fill declared shape {shape}")
    return values.reshape(shape)
