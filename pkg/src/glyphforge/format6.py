"""Six-field writing-trajectory representation.

A trajectory is an ordered sequence of key points; each point carries a
coordinate pair in [-1, 1]^2 and a one-hot control label over four states:

====================  ==========  =====================================
state                 one-hot      meaning
====================  ==========  =====================================
DRAW                  (1,0,0,0)   visible line segment to the next point
END_STROKE            (0,1,0,0)   stroke ends, no link to the next stroke
END_STROKE_CONNECTED  (0,0,1,0)   stroke ends with a visible link to the
                                  next stroke
END_WRITING           (0,0,0,1)   end of the whole writing process
====================  ==========  =====================================

The on-disk format is line-oriented UTF-8 text (LF endings):

    #glyphforge-traj v1
    x y p1 p2 p3 p4

one point per line, fields space-separated, ``p_i`` in {0, 1}; lines
starting with ``#`` after the first are comments.  Serialization is
canonical (shortest round-trippable decimals), so parse -> serialize is
the identity on canonical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadTermination,
    InvalidControl,
    LengthMismatch,
    MalformedLine,
    OutOfRange,
)

TRAJ_HEADER = "#glyphforge-traj v1"

# parse-time slack for float noise on the [-1, 1] bounds
_CLAMP_EPS = 1e-9


class Control(IntEnum):
    """One-hot control state of a key point (value = hot index)."""

    DRAW = 0
    END_STROKE = 1
    END_STROKE_CONNECTED = 2
    END_WRITING = 3

    def one_hot(self) -> tuple[int, int, int, int]:
        bits = [0, 0, 0, 0]
        bits[self.value] = 1
        return tuple(bits)

    @classmethod
    def from_one_hot(cls, bits: Sequence[int]) -> "Control":
        if len(bits) != 4 or sorted(bits) != [0, 0, 0, 1]:
            raise InvalidControl(f"control label {tuple(bits)} is not one-hot")
        return cls(list(bits).index(1))


@dataclass(frozen=True, slots=True)
class Point6:
    """A single key point: coordinates in [-1, 1] plus a control state."""

    x: float
    y: float
    control: Control

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        for name, v in (("x", self.x), ("y", self.y)):
            if not np.isfinite(v) or abs(v) > 1.0:
                raise OutOfRange(f"{name}={v!r} outside [-1, 1]")
        if not isinstance(self.control, Control):
            raise InvalidControl(f"not a control state: {self.control!r}")


@dataclass(frozen=True)
class Trajectory:
    """An ordered, validated sequence of key points.

    Invariants (enforced on construction): at least one point; the last
    point, and only the last point, is END_WRITING.
    """

    points: tuple[Point6, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        n = len(self.points)
        if n == 0:
            raise BadTermination("trajectory has no points")
        if self.points[-1].control is not Control.END_WRITING:
            raise BadTermination("last point must be END_WRITING")
        for i, p in enumerate(self.points[:-1]):
            if p.control is Control.END_WRITING:
                raise BadTermination(f"END_WRITING at point {i} before the end")

    def __len__(self) -> int:
        return len(self.points)

    def coords(self) -> np.ndarray:
        """(n, 2) float64 array of the point coordinates."""
        return np.array([(p.x, p.y) for p in self.points], dtype=np.float64)

    def controls(self) -> tuple[Control, ...]:
        return tuple(p.control for p in self.points)

    def with_coords(self, xy: np.ndarray) -> "Trajectory":
        """Same control labels with replaced coordinates (clamped to [-1, 1])."""
        xy = np.asarray(xy, dtype=np.float64)
        if xy.shape != (len(self.points), 2):
            raise LengthMismatch(f"expected {(len(self.points), 2)} coords, got {xy.shape}")
        xy = np.clip(xy, -1.0, 1.0)
        return Trajectory(
            tuple(Point6(float(x), float(y), p.control) for (x, y), p in zip(xy, self.points))
        )


@dataclass(frozen=True, slots=True)
class Segment:
    """Directed segment between two consecutive key points."""

    p_s: tuple[float, float]
    p_t: tuple[float, float]
    visible: bool


def _clamp_coord(v: float, line_no: int, field: str) -> float:
    if not np.isfinite(v):
        raise OutOfRange(f"line {line_no}: {field}={v!r} is not finite")
    if abs(v) <= 1.0:
        return v
    if abs(v) <= 1.0 + _CLAMP_EPS:
        return 1.0 if v > 0 else -1.0
    raise OutOfRange(f"line {line_no}: {field}={v!r} outside [-1, 1]")


def parse_trajectory(text: str) -> Trajectory:
    """Parse trajectory-file content into a validated :class:`Trajectory`.

    Raises MalformedLine, InvalidControl, OutOfRange or BadTermination;
    every error message carries the offending 1-based line number.
    """
    lines = text.split("\n")
    if not lines or lines[0].strip() != TRAJ_HEADER:
        raise MalformedLine(1, f"expected header {TRAJ_HEADER!r}")
    points: list[Point6] = []
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 6:
            raise MalformedLine(line_no, f"expected 6 fields, got {len(fields)}")
        try:
            x = float(fields[0])
            y = float(fields[1])
        except ValueError:
            raise MalformedLine(line_no, f"non-numeric coordinate in {line!r}") from None
        bits = []
        for f in fields[2:]:
            if f not in ("0", "1"):
                raise InvalidControl(f"line {line_no}: control field {f!r} not in {{0, 1}}")
            bits.append(int(f))
        if sum(bits) != 1:
            raise InvalidControl(f"line {line_no}: control label {tuple(bits)} is not one-hot")
        x = _clamp_coord(x, line_no, "x")
        y = _clamp_coord(y, line_no, "y")
        points.append(Point6(x, y, Control(bits.index(1))))
    if not points:
        raise BadTermination("no data lines")
    return Trajectory(tuple(points))


def serialize_trajectory(t: Trajectory) -> str:
    """Canonical text form: header plus one ``x y p1 p2 p3 p4`` line per point."""
    out = [TRAJ_HEADER]
    for p in t.points:
        bits = " ".join(str(b) for b in p.control.one_hot())
        out.append(f"{p.x!r} {p.y!r} {bits}")
    return "\n".join(out) + "\n"


def from_format5(
    points: Iterable[Sequence[float]], connected_flags: Sequence[bool]
) -> Trajectory:
    """Upgrade a five-field sequence by tagging each stroke end as connected or not.

    ``points`` holds ``(x, y, draw, end_stroke, end_writing)`` rows with a
    one-hot label over the last three fields; ``connected_flags`` has one
    entry per end-stroke row, in order.  Coordinates are unchanged.
    """
    rows = [tuple(p) for p in points]
    n_ends = sum(1 for r in rows if len(r) == 5 and (r[2], r[3], r[4]) == (0, 1, 0))
    if n_ends != len(connected_flags):
        raise LengthMismatch(
            f"{len(connected_flags)} connected flags for {n_ends} end-stroke points"
        )
    flags = iter(connected_flags)
    out: list[Point6] = []
    for i, r in enumerate(rows):
        if len(r) != 5:
            raise MalformedLine(i + 1, f"expected 5 fields, got {len(r)}")
        x, y, draw, end_stroke, end_writing = r
        label = (int(draw), int(end_stroke), int(end_writing))
        if sorted(label) != [0, 0, 1]:
            raise InvalidControl(f"point {i}: label {label} is not one-hot")
        if label[0]:
            control = Control.DRAW
        elif label[1]:
            control = Control.END_STROKE_CONNECTED if next(flags) else Control.END_STROKE
        else:
            control = Control.END_WRITING
        out.append(Point6(float(x), float(y), control))
    return Trajectory(tuple(out))


def visible_segments(t: Trajectory, include_connections: bool = False) -> list[Segment]:
    """One segment per consecutive point pair, flagged visible or not.

    A segment is visible iff its start point is DRAW; with
    ``include_connections`` the END_STROKE_CONNECTED links are rendered
    visible as well (the figure-style behavior; off by default).
    """
    segs: list[Segment] = []
    for a, b in zip(t.points[:-1], t.points[1:]):
        vis = a.control is Control.DRAW or (
            include_connections and a.control is Control.END_STROKE_CONNECTED
        )
        segs.append(Segment((a.x, a.y), (b.x, b.y), vis))
    return segs
