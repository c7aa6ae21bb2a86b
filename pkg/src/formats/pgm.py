"""
PGM Images
==========
Grayscale netpbm images (P2 plain, P5 raw) with maxval 255 or 65535.
Pixel values are rescaled to [0, 1] on read and back on write.
"""

from typing import Tuple

import numpy as np

from ..types import FormatError

SUPPORTED_MAXVAL = (255, 65535)


def _tokens(data: bytes, count: int) -> Tuple[list, int]:
    """First `count` header tokens (comments skipped) and the offset after them."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError("Truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii", errors="replace"))
    return tokens, pos


def read_pgm(data: bytes) -> Tuple[np.ndarray, int, bool]:
    """
    Decode a PGM file.

    Returns:
        (image in [0, 1], maxval, binary) where binary is True for P5
    """
    tokens, pos = _tokens(data, 4)
    magic, width, height, maxval = tokens
    if magic not in ("P2", "P5"):
        raise FormatError(f"Unsupported PGM magic '{magic}'")
    try:
        width, height, maxval = int(width), int(height), int(maxval)
    except ValueError:
        raise FormatError("Non-numeric PGM header") from None
    if maxval not in SUPPORTED_MAXVAL:
        raise FormatError(f"PGM maxval must be one of {SUPPORTED_MAXVAL}, got {maxval}")
    if width < 1 or height < 1:
        raise FormatError(f"Invalid PGM size {width}x{height}")

    count = width * height
    if magic == "P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos + 1:pos + 1 + count * dtype.itemsize]
        if len(raw) != count * dtype.itemsize:
            raise FormatError("Truncated PGM pixel data")
        pixels = np.frombuffer(raw, dtype=dtype).astype(np.float64)
    else:
        try:
            pixels = np.array(data[pos:].split()[:count], dtype=np.float64)
        except ValueError:
            raise FormatError("Non-numeric PGM pixel data") from None
        if pixels.size != count:
            raise FormatError("Truncated PGM pixel data")
    if np.any(pixels > maxval):
        raise FormatError("PGM pixel exceeds maxval")
    return pixels.reshape(height, width) / maxval, maxval, magic == "P5"


def write_pgm(image: np.ndarray, maxval: int = 255, binary: bool = True) -> bytes:
    """Encode an image in [0, 1] (values outside are clipped)."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise FormatError(f"PGM needs a 2-D grid, got shape {image.shape}")
    if maxval not in SUPPORTED_MAXVAL:
        raise FormatError(f"PGM maxval must be one of {SUPPORTED_MAXVAL}, got {maxval}")
    height, width = image.shape
    pixels = np.rint(np.clip(np.nan_to_num(image), 0.0, 1.0) * maxval).astype(np.int64)
    if binary:
        header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        return header + pixels.astype(dtype).tobytes()
    header = f"P2\n{width} {height}\n{maxval}\n"
    rows = "".join(" ".join(str(p) for p in row) + "\n" for row in pixels)
    return (header + rows).encode("ascii")
