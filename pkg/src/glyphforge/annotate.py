"""Pseudo connected-stroke labeling.

Stroke ends in a five-label-style trajectory carry no information about
whether the pen visibly links into the next stroke.  The labeling rule
compares each stroke gap against an index-aligned reference trajectory
(a mean skeleton for the character): the gap is a connection when it is
tight in the styled trajectory but wide in the reference, i.e. the
closeness is a property of the style, not of the character.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import LengthMismatch, StrokeBoundaryMismatch
from .format6 import Control, Point6, Trajectory

DEFAULT_THRESHOLD = 0.1  # [-1, 1] units; about 6.4 px on a 128-wide raster

_STROKE_ENDS = (Control.END_STROKE, Control.END_STROKE_CONNECTED)


@dataclass(frozen=True)
class AnnotateConfig:
    """Distance threshold in normalized coordinate units."""

    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError(f"threshold={self.threshold!r} must be positive")


def _gap(points, k: int) -> float:
    a, b = points[k], points[k + 1]
    return math.hypot(b.x - a.x, b.y - a.y)


def pseudo_annotate(t: Trajectory, mean_ref: Trajectory,
                    cfg: AnnotateConfig = AnnotateConfig()) -> Trajectory:
    """Relabel every stroke end as connected or not per the gap rule.

    A stroke end at index k becomes END_STROKE_CONNECTED iff the gap to
    point k+1 is below the threshold in ``t`` AND above it at the same
    indices in ``mean_ref``; otherwise END_STROKE.  Coordinates and all
    other labels are preserved.
    """
    if len(t) != len(mean_ref):
        raise LengthMismatch(f"trajectory has {len(t)} points, reference {len(mean_ref)}")
    for k, (p, r) in enumerate(zip(t.points, mean_ref.points)):
        if (p.control in _STROKE_ENDS) != (r.control in _STROKE_ENDS):
            raise StrokeBoundaryMismatch(f"stroke-end disagreement at point {k}")
    out: list[Point6] = []
    for k, p in enumerate(t.points):
        if p.control in _STROKE_ENDS and k + 1 < len(t):
            connected = (
                _gap(t.points, k) < cfg.threshold
                and _gap(mean_ref.points, k) > cfg.threshold
            )
            control = Control.END_STROKE_CONNECTED if connected else Control.END_STROKE
            out.append(Point6(p.x, p.y, control))
        else:
            out.append(p)
    return Trajectory(tuple(out))
