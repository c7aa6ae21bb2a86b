"""
Interchange Formats
===================
Grid files read and written by the CLI.

Formats:
1. 1-D CSV: one value per line, `NaN` marks a missing sample
2. Grid text: `#shape n1 n2 ... nm` header, then row-major values
3. PGM (P2/P5, maxval 255 or 65535), rescaled to [0, 1]

Masks use the same formats with 0/1 values. Traces are `iter,rel_change` lines.
"""

from .grid_io import GridFile, detect_format, read_grid, read_mask, write_grid, write_trace
from .pgm import read_pgm, write_pgm
from .text import parse_csv, parse_grid_text, render_csv, render_grid_text

__all__ = [
    "GridFile",
    "detect_format",
    "read_grid",
    "read_mask",
    "write_grid",
    "write_trace",
    "read_pgm",
    "write_pgm",
    "parse_csv",
    "parse_grid_text",
    "render_csv",
    "render_grid_text",
]
