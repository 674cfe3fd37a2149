"""Independent brute-force oracles shared by unit and acceptance tests.

These deliberately avoid the library's own formulas: distances come
from dense point sampling, alignments from exhaustive path enumeration.
"""

import math

import numpy as np

from glyphforge.format6 import visible_segments


def sampled_udf(traj, grid, samples=10_000, include_connections=False):
    """Per-pixel minimum distance to ``samples`` points on each visible segment.

    Chunked so the (pixels x samples) distance blocks stay small; minima
    are taken over squared distances and rooted once at the end.
    """
    X, Y = grid.centers()
    px = X.ravel()
    py = Y.ravel()
    best_sq = np.full(px.size, np.inf)
    ts = np.linspace(0.0, 1.0, samples)
    for seg in visible_segments(traj, include_connections):
        if not seg.visible:
            continue
        sx = seg.p_s[0] + ts * (seg.p_t[0] - seg.p_s[0])
        sy = seg.p_s[1] + ts * (seg.p_t[1] - seg.p_s[1])
        for lo in range(0, samples, 2000):
            cx = sx[lo:lo + 2000]
            cy = sy[lo:lo + 2000]
            d2 = (px[:, None] - cx[None, :]) ** 2 + (py[:, None] - cy[None, :]) ** 2
            np.minimum(best_sq, d2.min(axis=1), out=best_sq)
    return np.sqrt(best_sq).reshape(grid.shape)


def brute_force_dtw(a, b):
    """Exhaustive minimum alignment cost over every monotone path."""

    def best_from(i, j):
        d = math.hypot(a[i][0] - b[j][0], a[i][1] - b[j][1])
        if i == len(a) - 1 and j == len(b) - 1:
            return d
        options = []
        if i + 1 < len(a):
            options.append(best_from(i + 1, j))
        if j + 1 < len(b):
            options.append(best_from(i, j + 1))
        if i + 1 < len(a) and j + 1 < len(b):
            options.append(best_from(i + 1, j + 1))
        return d + min(options)

    return best_from(0, 0)
