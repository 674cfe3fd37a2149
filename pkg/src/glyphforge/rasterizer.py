"""Unsigned distance fields of trajectories and differentiable rendering.

The raster shares the trajectory coordinate frame: pixel (i, j) of an
H x W grid has its center at

    x = -1 + (2j + 1) / W,       y = -1 + (2i + 1) / H,

so row 0 is the y = -1 edge and distances are Euclidean in [-1, 1]^2
units.  The distance of a point to a visible segment is the three-case
point-to-segment distance (nearest endpoint beyond either end,
perpendicular distance otherwise); invisible segments are infinitely
far.  Rendering squashes the per-pixel minimum distance through

    pixel = 1 - sigmoid(theta * (dist - w))

where ``w`` is the line half-width in the same coordinate units as the
field and ``theta`` controls edge sharpness.  The conventional half-width
is 2 pixels: convert with ``Grid.pixel_size`` (see ``px_to_units``).

``loss_diff`` penalizes rendered ink that falls outside a target glyph,
``sum(relu(rendered - target)^2)``, and returns the exact analytic
gradient with respect to every key-point coordinate.  At each pixel the
gradient flows only through the segment attaining the minimum distance
(ties broken by lowest segment index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .format6 import Segment, Trajectory, visible_segments

DEFAULT_THETA = 100.0
DEFAULT_WIDTH_PX = 2.0


@dataclass(frozen=True)
class Grid:
    """Raster geometry: pixel-index to [-1, 1]^2 affine mapping."""

    height: int = 128
    width: int = 128

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError(f"grid {self.height}x{self.width} must be at least 1x1")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def pixel_size(self) -> float:
        """Coordinate units per pixel (width-based; exact for square grids)."""
        return 2.0 / self.width

    def px_to_units(self, px: float) -> float:
        return px * self.pixel_size

    def x_centers(self) -> np.ndarray:
        return -1.0 + (2.0 * np.arange(self.width) + 1.0) / self.width

    def y_centers(self) -> np.ndarray:
        return -1.0 + (2.0 * np.arange(self.height) + 1.0) / self.height

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays of shape (H, W) holding pixel-center coordinates."""
        return np.meshgrid(self.x_centers(), self.y_centers())

    def xy_at(self, i: int, j: int) -> tuple[float, float]:
        return (-1.0 + (2.0 * j + 1.0) / self.width, -1.0 + (2.0 * i + 1.0) / self.height)

    def index_at(self, x: float, y: float) -> tuple[int, int]:
        """Inverse mapping: pixel index containing coordinate (x, y)."""
        j = int(np.floor((x + 1.0) * self.width / 2.0))
        i = int(np.floor((y + 1.0) * self.height / 2.0))
        return (min(max(i, 0), self.height - 1), min(max(j, 0), self.width - 1))


@dataclass(frozen=True)
class RenderParams:
    """Sigmoid sharpness and line half-width (field units)."""

    theta: float = DEFAULT_THETA
    w: float = 0.03125  # 2 px on a 128-wide grid

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta={self.theta!r} must be positive")
        if self.w < 0:
            raise ValueError(f"w={self.w!r} must be nonnegative")

    @classmethod
    def for_grid(cls, grid: Grid, theta: float = DEFAULT_THETA,
                 width_px: float = DEFAULT_WIDTH_PX) -> "RenderParams":
        return cls(theta=theta, w=grid.px_to_units(width_px))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    """Overflow-safe logistic; maps +inf to exactly 1."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _seg_distance(px, py, sx, sy, tx, ty):
    """Three-case distance from points (px, py) to segment (s -> t), vectorized."""
    ax, ay = px - sx, py - sy          # s -> x
    bx, by = px - tx, py - ty          # t -> x
    ex, ey = tx - sx, ty - sy          # s -> t
    norm_a = np.hypot(ax, ay)
    if ex == 0.0 and ey == 0.0:
        return norm_a
    dot_s = ex * ax + ey * ay
    dot_t = -ex * bx - ey * by
    cross = ax * by - ay * bx
    n = np.hypot(ex, ey)
    d = np.abs(cross) / n
    d = np.where(dot_t < 0, np.hypot(bx, by), d)
    d = np.where(dot_s < 0, norm_a, d)
    return d


def segment_distance(x: tuple[float, float], s: Segment) -> float:
    """Distance from a point to one segment; +inf when the segment is invisible."""
    if not s.visible:
        return float("inf")
    return float(
        _seg_distance(
            np.float64(x[0]), np.float64(x[1]),
            s.p_s[0], s.p_s[1], s.p_t[0], s.p_t[1],
        )
    )


def _min_field(t: Trajectory, grid: Grid, include_connections: bool):
    """Per-pixel minimum distance and argmin segment index (-1 where none)."""
    X, Y = grid.centers()
    best = np.full(grid.shape, np.inf)
    best_idx = np.full(grid.shape, -1, dtype=np.int64)
    for k, seg in enumerate(visible_segments(t, include_connections)):
        if not seg.visible:
            continue
        d = _seg_distance(X, Y, seg.p_s[0], seg.p_s[1], seg.p_t[0], seg.p_t[1])
        closer = d < best
        best[closer] = d[closer]
        best_idx[closer] = k
    return best, best_idx


def udf(t: Trajectory, grid: Grid, include_connections: bool = False) -> np.ndarray:
    """Unsigned distance field: (H, W) minimum distance to any visible segment."""
    best, _ = _min_field(t, grid, include_connections)
    return best


def render(field: np.ndarray, params: RenderParams) -> np.ndarray:
    """Map a distance field to pixel intensities in [0, 1] (inf -> 0)."""
    field = np.asarray(field, dtype=np.float64)
    return 1.0 - _sigmoid(params.theta * (field - params.w))


def _case_gradients(px, py, sx, sy, tx, ty):
    """d(dist)/d(p_s) and d(dist)/d(p_t) per point, at the active case.

    Nondifferentiable spots (point exactly on the segment or at an
    endpoint) get a zero subgradient.
    """
    ax, ay = px - sx, py - sy
    bx, by = px - tx, py - ty
    ex, ey = tx - sx, ty - sy
    norm_a = np.hypot(ax, ay)
    norm_b = np.hypot(bx, by)
    zeros = np.zeros_like(px)

    def safe_div(num, den):
        return np.divide(num, den, out=np.zeros_like(num), where=den != 0)

    if ex == 0.0 and ey == 0.0:
        return (safe_div(-ax, norm_a), safe_div(-ay, norm_a), zeros, zeros)

    dot_s = ex * ax + ey * ay
    dot_t = -ex * bx - ey * by
    case1 = dot_s < 0
    case2 = (dot_t < 0) & ~case1

    cross = ax * by - ay * bx
    n = np.hypot(ex, ey)
    sc = np.sign(cross)
    abs_c = np.abs(cross)
    # perpendicular case: d = |cross| / n
    g_sx = -sc * by / n + abs_c * ex / n**3
    g_sy = sc * bx / n + abs_c * ey / n**3
    g_tx = sc * ay / n - abs_c * ex / n**3
    g_ty = -sc * ax / n - abs_c * ey / n**3
    # beyond-endpoint cases: d = |x - endpoint|, gradient on that endpoint only
    g_sx = np.where(case1, safe_div(-ax, norm_a), np.where(case2, 0.0, g_sx))
    g_sy = np.where(case1, safe_div(-ay, norm_a), np.where(case2, 0.0, g_sy))
    g_tx = np.where(case2, safe_div(-bx, norm_b), np.where(case1, 0.0, g_tx))
    g_ty = np.where(case2, safe_div(-by, norm_b), np.where(case1, 0.0, g_ty))
    return g_sx, g_sy, g_tx, g_ty


def loss_diff(
    t: Trajectory,
    target: np.ndarray,
    grid: Grid,
    params: RenderParams,
    include_connections: bool = False,
) -> tuple[float, np.ndarray]:
    """Out-of-glyph ink penalty and its gradient w.r.t. all point coordinates.

    Returns ``(loss, grad)`` with ``grad`` of shape (n, 2): row k is
    d(loss)/d(x_k, y_k).  Points feeding no visible segment get zero rows.
    """
    target = np.asarray(target, dtype=np.float64)
    if target.shape != grid.shape:
        raise DimensionMismatch(f"target {target.shape} vs grid {grid.shape}")

    best, best_idx = _min_field(t, grid, include_connections)
    z = params.theta * (best - params.w)
    s = _sigmoid(z)
    rendered = 1.0 - s
    residual = rendered - target
    active = residual > 0
    loss = float(np.sum(np.square(np.maximum(residual, 0.0))))

    # d(loss)/d(dist) at each active pixel with a finite distance
    grad = np.zeros((len(t), 2))
    segs = visible_segments(t, include_connections)
    X, Y = grid.centers()
    dl_dd = -2.0 * residual * params.theta * s * (1.0 - s)
    for k, seg in enumerate(segs):
        mask = active & (best_idx == k)
        if not mask.any():
            continue
        px, py = X[mask], Y[mask]
        w_pix = dl_dd[mask]
        g_sx, g_sy, g_tx, g_ty = _case_gradients(
            px, py, seg.p_s[0], seg.p_s[1], seg.p_t[0], seg.p_t[1]
        )
        grad[k, 0] += np.sum(w_pix * g_sx)
        grad[k, 1] += np.sum(w_pix * g_sy)
        grad[k + 1, 0] += np.sum(w_pix * g_tx)
        grad[k + 1, 1] += np.sum(w_pix * g_ty)
    return loss, grad


def pixel_signature(
    t: Trajectory,
    target: np.ndarray,
    grid: Grid,
    params: RenderParams,
    include_connections: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """(argmin segment map, relu-active mask): the discrete state of loss_diff.

    Finite-difference checks compare signatures at probe offsets to flag
    configurations where the argmin or the relu activation flips.
    """
    target = np.asarray(target, dtype=np.float64)
    if target.shape != grid.shape:
        raise DimensionMismatch(f"target {target.shape} vs grid {grid.shape}")
    best, best_idx = _min_field(t, grid, include_connections)
    rendered = 1.0 - _sigmoid(params.theta * (best - params.w))
    return best_idx, rendered - target > 0


def snap_fit(
    t0: Trajectory,
    target: np.ndarray,
    grid: Grid,
    params: RenderParams,
    steps: int,
    step_size: float,
    include_connections: bool = False,
) -> tuple[Trajectory, np.ndarray]:
    """Plain gradient descent of loss_diff over point coordinates.

    Control labels are fixed; coordinates are clamped to [-1, 1] after
    each update.  Returns the final trajectory and the loss trace of
    length ``steps + 1`` (initial loss first, final loss last).
    """
    if steps < 1:
        raise ValueError(f"steps={steps} must be at least 1")
    if step_size < 0:
        raise ValueError(f"step_size={step_size!r} must be nonnegative")
    traj = t0
    trace = np.empty(steps + 1)
    for k in range(steps):
        loss, grad = loss_diff(traj, target, grid, params, include_connections)
        trace[k] = loss
        traj = traj.with_coords(traj.coords() - step_size * grad)
    trace[steps], _ = loss_diff(traj, target, grid, params, include_connections)
    return traj, trace
