"""Headered text formats for features, attention weights, and raw mixture outputs.

Three line-oriented UTF-8 formats, each starting with a version header:

``#glyphforge-feat v1``
    one ``rows cols`` line, then ``rows`` lines of ``cols`` values.

``#glyphforge-ifr v1``
    a sequence of named matrices: a ``name rows cols`` line followed by
    ``rows`` value lines.  The attention-weight bundle uses the names
    q_img, k_img, k_seq, v_seq (projections stored input-by-output) and
    optionally gain, bias (1 x d).

``#glyphforge-gmm v1``
    one step per line, 6M whitespace-separated raw values in the
    [pi | mu_x | mu_y | sigma_x | sigma_y | rho] block layout.

Values are written as shortest round-trippable decimals; lines starting
with ``#`` after the header are comments.
"""

from __future__ import annotations

import numpy as np

from .errors import GlyphforgeError
from .ifr import IfrWeights

FEAT_HEADER = "#glyphforge-feat v1"
IFR_HEADER = "#glyphforge-ifr v1"
GMM_HEADER = "#glyphforge-gmm v1"


class TextFormatError(GlyphforgeError):
    """Headered text file is malformed."""


def _data_lines(text: str, header: str) -> list[str]:
    lines = text.split("\n")
    if not lines or lines[0].strip() != header:
        raise TextFormatError(f"expected header {header!r}")
    return [ln.strip() for ln in lines[1:] if ln.strip() and not ln.strip().startswith("#")]


def _fmt_row(row) -> str:
    return " ".join(repr(float(v)) for v in row)


def _parse_floats(line: str, line_label: str) -> list[float]:
    try:
        return [float(tok) for tok in line.split()]
    except ValueError:
        raise TextFormatError(f"non-numeric value in {line_label}") from None


def dump_feature(matrix: np.ndarray) -> str:
    m = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    out = [FEAT_HEADER, f"{m.shape[0]} {m.shape[1]}"]
    out.extend(_fmt_row(row) for row in m)
    return "\n".join(out) + "\n"


def parse_feature(text: str) -> np.ndarray:
    lines = _data_lines(text, FEAT_HEADER)
    if not lines:
        raise TextFormatError("missing shape line")
    shape = lines[0].split()
    if len(shape) != 2 or not all(tok.isdigit() for tok in shape):
        raise TextFormatError(f"bad shape line {lines[0]!r}")
    rows, cols = int(shape[0]), int(shape[1])
    if len(lines) - 1 != rows:
        raise TextFormatError(f"expected {rows} rows, got {len(lines) - 1}")
    data = [_parse_floats(ln, f"row {i}") for i, ln in enumerate(lines[1:])]
    m = np.array(data, dtype=np.float64)
    if m.shape != (rows, cols):
        raise TextFormatError(f"data shape {m.shape} does not match header {(rows, cols)}")
    return m


def dump_matrix_bundle(matrices: dict[str, np.ndarray]) -> str:
    out = [IFR_HEADER]
    for name, m in matrices.items():
        m = np.atleast_2d(np.asarray(m, dtype=np.float64))
        out.append(f"{name} {m.shape[0]} {m.shape[1]}")
        out.extend(_fmt_row(row) for row in m)
    return "\n".join(out) + "\n"


def parse_matrix_bundle(text: str) -> dict[str, np.ndarray]:
    lines = _data_lines(text, IFR_HEADER)
    out: dict[str, np.ndarray] = {}
    i = 0
    while i < len(lines):
        head = lines[i].split()
        if len(head) != 3 or not head[1].isdigit() or not head[2].isdigit():
            raise TextFormatError(f"bad matrix header {lines[i]!r}")
        name, rows, cols = head[0], int(head[1]), int(head[2])
        if i + 1 + rows > len(lines):
            raise TextFormatError(f"matrix {name!r} truncated")
        data = [_parse_floats(lines[i + 1 + r], f"{name} row {r}") for r in range(rows)]
        m = np.array(data, dtype=np.float64)
        if m.shape != (rows, cols):
            raise TextFormatError(f"matrix {name!r} shape {m.shape} != {(rows, cols)}")
        if name in out:
            raise TextFormatError(f"duplicate matrix {name!r}")
        out[name] = m
        i += 1 + rows
    return out


def dump_ifr_weights(w: IfrWeights) -> str:
    return dump_matrix_bundle(
        {
            "q_img": w.w_q_img,
            "k_img": w.w_k_img,
            "k_seq": w.w_k_seq,
            "v_seq": w.w_v_seq,
            "gain": w.gain.reshape(1, -1),
            "bias": w.bias.reshape(1, -1),
        }
    )


def parse_ifr_weights(text: str) -> IfrWeights:
    mats = parse_matrix_bundle(text)
    required = ("q_img", "k_img", "k_seq", "v_seq")
    missing = [name for name in required if name not in mats]
    if missing:
        raise TextFormatError(f"missing matrices: {', '.join(missing)}")
    gain = mats["gain"].ravel() if "gain" in mats else None
    bias = mats["bias"].ravel() if "bias" in mats else None
    return IfrWeights(
        w_q_img=mats["q_img"],
        w_k_img=mats["k_img"],
        w_k_seq=mats["k_seq"],
        w_v_seq=mats["v_seq"],
        gain=gain,
        bias=bias,
    )


def dump_raw_gmm(raw_seq: np.ndarray) -> str:
    raw_seq = np.atleast_2d(np.asarray(raw_seq, dtype=np.float64))
    if raw_seq.shape[1] % 6 != 0:
        raise TextFormatError(f"row length {raw_seq.shape[1]} is not a multiple of 6")
    out = [GMM_HEADER]
    out.extend(_fmt_row(row) for row in raw_seq)
    return "\n".join(out) + "\n"


def parse_raw_gmm(text: str) -> np.ndarray:
    lines = _data_lines(text, GMM_HEADER)
    if not lines:
        raise TextFormatError("no parameter steps")
    data = [_parse_floats(ln, f"step {i}") for i, ln in enumerate(lines)]
    width = len(data[0])
    if width == 0 or width % 6 != 0:
        raise TextFormatError(f"step width {width} is not a positive multiple of 6")
    if any(len(row) != width for row in data):
        raise TextFormatError("steps have inconsistent widths")
    return np.array(data, dtype=np.float64)
