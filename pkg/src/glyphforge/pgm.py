"""PGM image I/O and ASCII distance-field export.

Images are (H, W) float64 arrays in [0, 1] (ink = 1, background = 0).
Files use maxval 255; pixel value v maps to the real v/255.  Writing
quantizes with round-half-away-from-zero so output bytes are identical
across runs.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, GlyphforgeError


class PgmFormatError(GlyphforgeError):
    """File is not a maxval-255 P2/P5 image."""


def quantize(pixels: np.ndarray) -> np.ndarray:
    """Map [0, 1] reals to uint8 via round-half-away-from-zero on 255*v."""
    v = np.asarray(pixels, dtype=np.float64)
    return np.clip(np.floor(255.0 * v + 0.5), 0, 255).astype(np.uint8)


def write_pgm(path, pixels: np.ndarray, binary: bool = True) -> None:
    """Write an (H, W) array in [0, 1] as P5 (binary) or P2 (ASCII) PGM."""
    v = quantize(pixels)
    if v.ndim != 2:
        raise DimensionMismatch(f"expected 2-d image, got shape {v.shape}")
    h, w = v.shape
    if binary:
        with open(path, "wb") as f:
            f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            f.write(v.tobytes())
    else:
        with open(path, "w", encoding="ascii", newline="\n") as f:
            f.write(f"P2\n{w} {h}\n255\n")
            for row in v:
                f.write(" ".join(str(int(p)) for p in row) + "\n")


def _read_tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    """Read whitespace-separated header tokens, skipping # comments."""
    tokens: list[bytes] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise PgmFormatError("truncated header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Read a P2 or P5 PGM (maxval 255) as an (H, W) float64 array in [0, 1]."""
    with open(path, "rb") as f:
        data = f.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmFormatError(f"unsupported magic {magic!r}")
    tokens, pos = _read_tokens(data, 3, 2)
    w, h, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise PgmFormatError(f"maxval {maxval} unsupported (need 255)")
    if w < 1 or h < 1:
        raise PgmFormatError(f"bad dimensions {w}x{h}")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        raster = data[pos : pos + w * h]
        if len(raster) != w * h:
            raise PgmFormatError("truncated raster")
        v = np.frombuffer(raster, dtype=np.uint8).reshape(h, w)
    else:
        try:
            vals = [int(t) for t in data[pos:].split()]
        except ValueError as e:
            raise PgmFormatError(f"bad sample value: {e}") from None
        if len(vals) != w * h:
            raise PgmFormatError(f"expected {w * h} samples, got {len(vals)}")
        v = np.array(vals, dtype=np.uint8).reshape(h, w)
    return v.astype(np.float64) / 255.0


def dump_field_ascii(field: np.ndarray) -> str:
    """Distance field as text, one grid row per line (inf allowed)."""
    field = np.asarray(field, dtype=np.float64)
    if field.ndim != 2:
        raise DimensionMismatch(f"expected 2-d field, got shape {field.shape}")
    return "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in field)


def write_field_ascii(path, field: np.ndarray) -> None:
    """Dump a distance field to a text file via :func:`dump_field_ascii`."""
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(dump_field_ascii(field))


def read_field_ascii(path) -> np.ndarray:
    """Read a field written by :func:`write_field_ascii`."""
    rows = []
    with open(path, "r", encoding="ascii") as f:
        for line in f:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split()])
    return np.array(rows, dtype=np.float64)
