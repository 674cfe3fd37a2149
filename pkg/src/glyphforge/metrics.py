"""Evaluation metrics: image MAE and trajectory DTW."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptySequence
from .format6 import Trajectory


@dataclass(frozen=True)
class DtwResult:
    """Minimum alignment cost and one optimal monotone path.

    ``path`` holds 0-based index pairs: entry (i, j) aligns point i of
    the first sequence with point j of the second.  The path starts at
    (0, 0), ends at (n-1, m-1), and advances by (1,0), (0,1) or (1,1).
    ``normalized`` is cost / len(path); the raw cost is the headline
    number.
    """

    cost: float
    path: tuple[tuple[int, int], ...]

    @property
    def normalized(self) -> float:
        return self.cost / len(self.path)


def mae(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute pixel difference of two equal-size images."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b)))


def _coords(seq) -> np.ndarray:
    if isinstance(seq, Trajectory):
        return seq.coords()
    xy = np.asarray(seq, dtype=np.float64)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise DimensionMismatch(f"expected (n, 2) points, got shape {xy.shape}")
    return xy


def dtw(a, b) -> DtwResult:
    """Dynamic-time-warping alignment of two point sequences.

    Pointwise cost is the Euclidean distance on (x, y); control labels
    are ignored.  Classic O(n*m) dynamic program over the monotone
    steps, with backtracking preferring the diagonal.
    """
    xa, xb = _coords(a), _coords(b)
    n, m = len(xa), len(xb)
    if n == 0 or m == 0:
        raise EmptySequence("both sequences must be non-empty")

    local = np.hypot(
        xa[:, 0:1] - xb[None, :, 0], xa[:, 1:2] - xb[None, :, 1]
    )  # (n, m) pairwise distances

    cost = np.full((n, m), np.inf)
    move = np.zeros((n, m), dtype=np.int8)  # 0=diag, 1=up (i-1), 2=left (j-1)
    cost[0, 0] = local[0, 0]
    for j in range(1, m):
        cost[0, j] = cost[0, j - 1] + local[0, j]
        move[0, j] = 2
    for i in range(1, n):
        cost[i, 0] = cost[i - 1, 0] + local[i, 0]
        move[i, 0] = 1
        for j in range(1, m):
            best = cost[i - 1, j - 1]
            k = 0
            if cost[i - 1, j] < best:
                best = cost[i - 1, j]
                k = 1
            if cost[i, j - 1] < best:
                best = cost[i, j - 1]
                k = 2
            cost[i, j] = best + local[i, j]
            move[i, j] = k

    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        k = move[i, j]
        if k == 0:
            i, j = i - 1, j - 1
        elif k == 1:
            i -= 1
        else:
            j -= 1
        path.append((i, j))
    path.reverse()
    return DtwResult(cost=float(cost[n - 1, m - 1]), path=tuple(path))
