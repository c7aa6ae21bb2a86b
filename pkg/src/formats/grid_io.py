"""
Grid File I/O
=============
Format detection, reading and atomic writing of grids, masks and traces.
"""

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ..types import FormatError, SolveReport
from .pgm import read_pgm, write_pgm
from .text import SHAPE_HEADER, parse_csv, parse_grid_text, render_csv, render_grid_text

PathLike = Union[str, Path]


@dataclass
class GridFile:
    """A grid as read from disk, with what is needed to write it back alike."""
    data: np.ndarray
    fmt: str                 # "csv", "grid" or "pgm"
    maxval: int = 255
    binary: bool = True

    def with_data(self, data: np.ndarray) -> "GridFile":
        return GridFile(data=data, fmt=self.fmt, maxval=self.maxval, binary=self.binary)


def detect_format(raw: bytes) -> str:
    """Decide the format from the file's leading bytes."""
    head = raw.lstrip()[:8]
    if head[:2] in (b"P2", b"P5"):
        return "pgm"
    if head.startswith(SHAPE_HEADER.encode("ascii")):
        return "grid"
    return "csv"


def read_grid(path: PathLike, shape: Optional[Sequence[int]] = None) -> GridFile:
    """
    Read a grid file; NaN marks missing samples.

    Args:
        path: CSV, grid text or PGM file
        shape: row-major shape for CSV input holding more than one dimension
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e.strerror}") from e

    fmt = detect_format(raw)
    if fmt == "pgm":
        image, maxval, binary = read_pgm(raw)
        return GridFile(data=image, fmt=fmt, maxval=maxval, binary=binary)

    text = _decode(raw, path)
    if fmt == "grid":
        data = parse_grid_text(text)
        if shape is not None and tuple(shape) != data.shape:
            raise FormatError(f"{path}: header shape {data.shape} contradicts declared {tuple(shape)}")
        return GridFile(data=data, fmt=fmt)
    return GridFile(data=parse_csv(text, shape), fmt=fmt)


def read_mask(path: PathLike, shape: Sequence[int]) -> np.ndarray:
    """Read a 0/1 mask in any grid format (PGM: nonzero pixel = observed)."""
    grid = read_grid(path, shape if _is_csv(path) else None)
    data = grid.data
    if data.shape != tuple(shape):
        raise FormatError(f"{path}: mask shape {data.shape} does not match data shape {tuple(shape)}")
    if grid.fmt == "pgm":
        return data > 0
    if np.isnan(data).any() or not np.all((data == 0) | (data == 1)):
        raise FormatError(f"{path}: mask values must be 0 or 1")
    return data == 1


def write_grid(path: PathLike, grid: GridFile):
    """Write a grid in its format, atomically (no partial file is left on error)."""
    data = np.asarray(grid.data, dtype=np.float64)
    if grid.fmt == "pgm":
        payload = write_pgm(data, maxval=grid.maxval, binary=grid.binary)
    elif grid.fmt == "grid":
        payload = render_grid_text(data).encode("ascii")
    elif grid.fmt == "csv":
        payload = render_csv(data).encode("ascii")
    else:
        raise FormatError(f"Unknown grid format '{grid.fmt}'")
    _atomic_write(Path(path), payload)


def write_trace(path: PathLike, report: SolveReport):
    """One `iter,rel_change` line per iteration."""
    lines = "".join(f"{i},{change!r}\n" for i, change in enumerate(report.trace, start=1))
    _atomic_write(Path(path), lines.encode("ascii"))


def _atomic_write(path: Path, payload: bytes):
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _decode(raw: bytes, path: Path) -> str:
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError:
        raise FormatError(f"{path}: not a text grid file") from None


def _is_csv(path: PathLike) -> bool:
    try:
        with open(path, "rb") as fh:
            return detect_format(fh.read(16)) == "csv"
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e.strerror}") from e
