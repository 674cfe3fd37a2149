"""Synthetic trajectories and targets for tests, demos, and fixtures."""

from __future__ import annotations

import numpy as np

from .format6 import Control, Point6, Trajectory
from .rasterizer import Grid, RenderParams


def random_trajectory(rng: np.random.Generator, n_points: int = 8,
                      step: float = 0.12, span: float = 0.9) -> Trajectory:
    """Random-walk trajectory with mixed control labels.

    Key points hop at most ``step`` units, stay inside [-span, span]
    (so finite-difference probes never hit the coordinate clamp), and
    carry mostly DRAW labels with occasional stroke ends.
    """
    if n_points < 1:
        raise ValueError("need at least one point")
    xy = np.empty((n_points, 2))
    xy[0] = rng.uniform(-span * 0.7, span * 0.7, size=2)
    for k in range(1, n_points):
        xy[k] = np.clip(xy[k - 1] + rng.uniform(-step, step, size=2), -span, span)
    points = []
    for k in range(n_points - 1):
        r = rng.random()
        if r < 0.75:
            control = Control.DRAW
        elif r < 0.9:
            control = Control.END_STROKE
        else:
            control = Control.END_STROKE_CONNECTED
        points.append(Point6(float(xy[k, 0]), float(xy[k, 1]), control))
    points.append(Point6(float(xy[-1, 0]), float(xy[-1, 1]), Control.END_WRITING))
    return Trajectory(tuple(points))


def bar_target(grid: Grid, y_lo: float = -1.0, y_hi: float = 0.5) -> np.ndarray:
    """Full-width horizontal ink bar covering y in [y_lo, y_hi]."""
    ys = grid.y_centers()
    row = ((ys >= y_lo) & (ys <= y_hi)).astype(np.float64)
    return np.repeat(row[:, None], grid.width, axis=1)


# step size tuned so the bar-offset descent is monotone after the first
# few steps; 1.8e-3 and below can stall in the transition region
SNAP_STEP_SIZE = 2.5e-3
SNAP_STEPS = 200


def bar_offset_fixture():
    """A horizontal segment parked 4 px above a thick bar on a 64x64 grid.

    Returns ``(trajectory, target, grid, params)``.  The softened
    sharpness (theta = 32) lets the out-of-glyph gradient reach across
    the 4 px gap, so descending with ``SNAP_STEP_SIZE`` pulls the
    segment into the bar and the loss to roughly nothing.
    """
    grid = Grid(64, 64)
    y = 0.5 + grid.px_to_units(4.0)
    traj = Trajectory(
        (
            Point6(-0.6, y, Control.DRAW),
            Point6(0.6, y, Control.END_WRITING),
        )
    )
    params = RenderParams(theta=32.0, w=grid.px_to_units(2.0))
    return traj, bar_target(grid), grid, params
