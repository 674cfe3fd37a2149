"""Central-difference verification of every analytic gradient.

Each suite draws seeded random instances, compares the closed-form
gradient against central finite differences component-wise, and reports
the worst relative error.  The relative error uses a floored
denominator, ``|a - b| / max(|a|, |b|, 1e-4)``, so components near the
finite-difference noise floor are compared absolutely.

The rasterization loss is piecewise smooth: probes where the argmin
segment of any pixel or any relu activation flips between the two sides
of the central difference are flagged and excluded rather than compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gmm, reprlearn
from .rasterizer import Grid, RenderParams, loss_diff, pixel_signature
from .rng import make_rng
from .synth import random_trajectory

DENOM_FLOOR = 1e-4

SUITES = ("rasterizer", "gmm", "nce")


@dataclass
class SuiteReport:
    name: str
    instances: int
    checked: int
    skipped: int
    max_rel_err: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.checked > 0 and self.max_rel_err < self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"gradcheck {self.name}: instances={self.instances} "
            f"checked={self.checked} skipped={self.skipped} "
            f"max_rel_err={self.max_rel_err:.3e} tol={self.tolerance:.0e} {status}"
        )


def central_difference(f: Callable[[np.ndarray], float], x: np.ndarray,
                       h: float) -> np.ndarray:
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros(x.size)
    flat = x.ravel()
    for k in range(flat.size):
        xp = flat.copy()
        xm = flat.copy()
        xp[k] += h
        xm[k] -= h
        g[k] = (f(xp.reshape(x.shape)) - f(xm.reshape(x.shape))) / (2.0 * h)
    return g.reshape(x.shape)


def rel_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    a = np.asarray(analytic, dtype=np.float64).ravel()
    b = np.asarray(numeric, dtype=np.float64).ravel()
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), DENOM_FLOOR)


def _corrupt(grad: np.ndarray) -> np.ndarray:
    return grad * 1.001 + 1e-3


def check_rasterizer(seed: int, instances: int = 50, h: float = 1e-5,
                     tolerance: float = 1e-4, corrupt: bool = False) -> SuiteReport:
    """loss_diff gradient w.r.t. all point coordinates, 8 points on 16x16."""
    grid = Grid(16, 16)
    params = RenderParams.for_grid(grid)
    checked = skipped = 0
    worst = 0.0
    for inst in range(instances):
        rng = make_rng(seed, 0, inst)
        traj = random_trajectory(rng, n_points=8)
        target = rng.uniform(0.0, 1.0, size=grid.shape)
        _, grad = loss_diff(traj, target, grid, params)
        if corrupt:
            grad = _corrupt(grad)
        base_sig = pixel_signature(traj, target, grid, params)
        xy0 = traj.coords()
        for k in range(xy0.size):
            offsets = []
            smooth = True
            for sign in (+1.0, -1.0):
                xy = xy0.copy().ravel()
                xy[k] += sign * h
                probe = traj.with_coords(xy.reshape(-1, 2))
                sig = pixel_signature(probe, target, grid, params)
                if not (np.array_equal(sig[0], base_sig[0])
                        and np.array_equal(sig[1], base_sig[1])):
                    smooth = False
                    break
                offsets.append(loss_diff(probe, target, grid, params)[0])
            if not smooth:
                skipped += 1
                continue
            fd = (offsets[0] - offsets[1]) / (2.0 * h)
            err = rel_errors(grad.ravel()[k], fd)[0]
            worst = max(worst, float(err))
            checked += 1
    return SuiteReport("rasterizer", instances, checked, skipped, worst, tolerance)


def check_gmm(seed: int, instances: int = 50, h: float = 1e-6,
              tolerance: float = 1e-5, corrupt: bool = False) -> SuiteReport:
    """loss_point gradient w.r.t. all raw outputs, L=2 steps of M=20."""
    steps, m = 2, gmm.DEFAULT_COMPONENTS
    checked = skipped = 0
    worst = 0.0
    for inst in range(instances):
        rng = make_rng(seed, 1, inst)
        raw = rng.normal(0.0, 0.5, size=(steps, 6 * m))
        targets = rng.uniform(-0.5, 0.5, size=(steps, 2))
        grad = gmm.loss_point_grad(raw, targets)
        if corrupt:
            grad = _corrupt(grad)

        def f(r):
            return gmm.loss_point(gmm.activate_sequence(r), targets)

        fd = central_difference(f, raw, h)
        err = rel_errors(grad, fd)
        worst = max(worst, float(err.max()))
        checked += err.size
    return SuiteReport("gmm", instances, checked, skipped, worst, tolerance)


def check_nce(seed: int, instances: int = 50, h: float = 1e-6,
              tolerance: float = 1e-5, corrupt: bool = False) -> SuiteReport:
    """Contrastive-loss gradients w.r.t. both feature batches, B=4."""
    batch, dim = 4, 6
    cfg = reprlearn.NceConfig(tau=5.0, batch_size=batch)
    checked = skipped = 0
    worst = 0.0
    for inst in range(instances):
        rng = make_rng(seed, 2, inst)
        img = rng.normal(size=(batch, dim))
        seq = rng.normal(size=(batch, dim))
        img /= np.linalg.norm(img, axis=1, keepdims=True)
        seq /= np.linalg.norm(seq, axis=1, keepdims=True)
        _, g_img, g_seq = reprlearn.loss_nce(img, seq, cfg)
        if corrupt:
            g_img, g_seq = _corrupt(g_img), _corrupt(g_seq)

        fd_img = central_difference(lambda x: reprlearn.loss_nce(x, seq, cfg)[0], img, h)
        fd_seq = central_difference(lambda x: reprlearn.loss_nce(img, x, cfg)[0], seq, h)
        err = rel_errors(
            np.concatenate([g_img.ravel(), g_seq.ravel()]),
            np.concatenate([fd_img.ravel(), fd_seq.ravel()]),
        )
        worst = max(worst, float(err.max()))
        checked += err.size
    return SuiteReport("nce", instances, checked, skipped, worst, tolerance)


def run_suites(selector: str = "all", seed: int = 0, instances: int = 50,
               corrupt: bool = False) -> list[SuiteReport]:
    """Run the selected finite-difference suites (selector: all or a suite name)."""
    if selector == "all":
        names = SUITES
    elif selector in SUITES:
        names = (selector,)
    else:
        raise ValueError(f"unknown suite {selector!r}; pick from all, {', '.join(SUITES)}")
    checks = {"rasterizer": check_rasterizer, "gmm": check_gmm, "nce": check_nce}
    return [checks[n](seed=seed, instances=instances, corrupt=corrupt) for n in names]
