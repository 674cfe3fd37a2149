"""Bivariate Gaussian-mixture head over key-point coordinates.

Raw per-step network outputs are 6M unconstrained reals laid out as six
contiguous blocks of M:

    [pi | mu_x | mu_y | sigma_x | sigma_y | rho]

``activate`` maps them to valid mixture parameters (softmax weights,
exp scales, tanh correlations); the negative log-likelihood of target
coordinates and the control-label cross-entropy mirror the usual
handwriting-sequence training losses, with the NLL gradient available
in closed form with respect to the raw outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, NonFinite, ZeroDensity
from .format6 import Trajectory
from .rng import make_rng

DEFAULT_COMPONENTS = 20

# tanh output is kept this far from +-1 so covariances stay nonsingular
_RHO_CLAMP = 1.0 - 1e-6

# densities below this floor raise ZeroDensity instead of feeding log
_DENSITY_FLOOR = 1e-12


@dataclass(frozen=True)
class GmmParams:
    """Valid per-step mixture: M weights, means, scales, correlations."""

    pi: np.ndarray
    mu_x: np.ndarray
    mu_y: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        for name in ("pi", "mu_x", "mu_y", "sigma_x", "sigma_y", "rho"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        m = self.pi.shape
        if any(getattr(self, n).shape != m for n in ("mu_x", "mu_y", "sigma_x", "sigma_y", "rho")):
            raise ValueError("mixture parameter arrays must share one shape")
        if self.pi.ndim != 1 or self.pi.size < 1:
            raise ValueError("parameters must be non-empty vectors")
        if np.any(self.pi < 0) or abs(self.pi.sum() - 1.0) > 1e-9:
            raise ValueError("pi must be a probability vector")
        if np.any(self.sigma_x <= 0) or np.any(self.sigma_y <= 0):
            raise ValueError("sigma must be positive")
        if np.any(np.abs(self.rho) >= 1):
            raise ValueError("|rho| must be below 1")

    @property
    def n_components(self) -> int:
        return self.pi.size


def _split_raw(raw: np.ndarray) -> tuple[np.ndarray, ...]:
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 1 or raw.size == 0 or raw.size % 6 != 0:
        raise ValueError(f"raw output must be a 6M vector, got shape {raw.shape}")
    m = raw.size // 6
    return tuple(raw[k * m:(k + 1) * m] for k in range(6))


def activate(raw: np.ndarray) -> GmmParams:
    """Constrain one step of raw outputs to valid mixture parameters.

    softmax for weights, identity for means, exp for scales, tanh
    (clamped away from +-1) for correlations.  Total on finite inputs.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(raw)):
        raise NonFinite("raw mixture output contains non-finite values")
    r_pi, r_mx, r_my, r_sx, r_sy, r_rho = _split_raw(raw)
    e = np.exp(r_pi - r_pi.max())
    return GmmParams(
        pi=e / e.sum(),
        mu_x=r_mx.copy(),
        mu_y=r_my.copy(),
        sigma_x=np.exp(r_sx),
        sigma_y=np.exp(r_sy),
        rho=np.clip(np.tanh(r_rho), -_RHO_CLAMP, _RHO_CLAMP),
    )


def activate_sequence(raw_seq: np.ndarray) -> list[GmmParams]:
    """Apply :func:`activate` to each row of an (L, 6M) array."""
    raw_seq = np.asarray(raw_seq, dtype=np.float64)
    if raw_seq.ndim != 2:
        raise ValueError(f"expected (L, 6M) array, got shape {raw_seq.shape}")
    return [activate(row) for row in raw_seq]


def _component_pdfs(params: GmmParams, x: float, y: float) -> np.ndarray:
    u = (x - params.mu_x) / params.sigma_x
    v = (y - params.mu_y) / params.sigma_y
    q = 1.0 - params.rho**2
    z = u**2 + v**2 - 2.0 * params.rho * u * v
    norm = 2.0 * np.pi * params.sigma_x * params.sigma_y * np.sqrt(q)
    return np.exp(-z / (2.0 * q)) / norm


def density(params: GmmParams, x: float, y: float) -> float:
    """Mixture probability density at (x, y)."""
    return float(np.dot(params.pi, _component_pdfs(params, x, y)))


def _target_coords(targets) -> np.ndarray:
    if isinstance(targets, Trajectory):
        return targets.coords()
    xy = np.asarray(targets, dtype=np.float64)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValueError(f"targets must be (L, 2) coordinates, got shape {xy.shape}")
    return xy


def loss_point(params_seq: Sequence[GmmParams], targets) -> float:
    """Mean negative log density of the target coordinates, one step each.

    ``targets`` is a Trajectory or an (L, 2) array.  Raises ZeroDensity
    (with the step index) when a step's density falls below 1e-12.
    """
    xy = _target_coords(targets)
    if len(params_seq) != len(xy):
        raise LengthMismatch(f"{len(params_seq)} parameter steps for {len(xy)} targets")
    total = 0.0
    for step, (params, (x, y)) in enumerate(zip(params_seq, xy)):
        p = density(params, float(x), float(y))
        if p < _DENSITY_FLOOR:
            raise ZeroDensity(step, p)
        total += np.log(p)
    return float(-total / len(xy))


def loss_point_grad(raw_seq: np.ndarray, targets) -> np.ndarray:
    """Analytic gradient of ``loss_point(activate_sequence(raw_seq), targets)``.

    Returns an (L, 6M) array in the raw block layout.  The softmax,
    exp and tanh activations are differentiated through, so the weight
    block of each row sums to zero.
    """
    raw_seq = np.asarray(raw_seq, dtype=np.float64)
    xy = _target_coords(targets)
    if raw_seq.ndim != 2 or raw_seq.shape[0] != len(xy):
        raise LengthMismatch(f"raw shape {raw_seq.shape} for {len(xy)} targets")
    big_l = len(xy)
    grad = np.zeros_like(raw_seq)
    for step in range(big_l):
        params = activate(raw_seq[step])
        x, y = float(xy[step, 0]), float(xy[step, 1])
        pdfs = _component_pdfs(params, x, y)
        w = params.pi * pdfs
        p = w.sum()
        if p < _DENSITY_FLOOR:
            raise ZeroDensity(step, float(p))
        resp = w / p  # responsibilities

        u = (x - params.mu_x) / params.sigma_x
        v = (y - params.mu_y) / params.sigma_y
        rho, q = params.rho, 1.0 - params.rho**2

        # d(-log p)/d(component parameter) = -resp * d(log N)/d(parameter)
        d_mu_x = -resp * (u - rho * v) / (params.sigma_x * q)
        d_mu_y = -resp * (v - rho * u) / (params.sigma_y * q)
        d_raw_sx = -resp * (-1.0 + (u**2 - rho * u * v) / q)
        d_raw_sy = -resp * (-1.0 + (v**2 - rho * u * v) / q)
        z = u**2 + v**2 - 2.0 * rho * u * v
        d_rho = -resp * (rho / q + (u * v * q - rho * z) / q**2)
        tanh_r = np.tanh(raw_seq[step, 5 * params.n_components:])
        d_raw_rho = d_rho * np.where(np.abs(tanh_r) < _RHO_CLAMP, 1.0 - tanh_r**2, 0.0)
        d_raw_pi = params.pi - resp  # softmax-composed; sums to 0

        grad[step] = np.concatenate([d_raw_pi, d_mu_x, d_mu_y, d_raw_sx, d_raw_sy, d_raw_rho])
    return grad / big_l


def sample(params: GmmParams, rng_seed: int) -> tuple[float, float]:
    """Draw one (x, y): pick a component by weight, then a correlated normal.

    Deterministic for a given seed (counter-based generator, Cholesky
    transform of two standard normals).
    """
    rng = make_rng(rng_seed)
    pi = params.pi / params.pi.sum()
    i = int(rng.choice(params.n_components, p=pi))
    z0, z1 = rng.standard_normal(2)
    sx, sy, r = params.sigma_x[i], params.sigma_y[i], params.rho[i]
    x = params.mu_x[i] + sx * z0
    y = params.mu_y[i] + sy * (r * z0 + np.sqrt(1.0 - r**2) * z1)
    return (float(x), float(y))


def loss_label(q: np.ndarray, target: Sequence[int]) -> float:
    """Softmax cross-entropy of 4 control logits against a one-hot target."""
    q = np.asarray(q, dtype=np.float64)
    target = np.asarray(target)
    if q.shape != (4,) or target.shape != (4,):
        raise ValueError("expected 4 logits and a 4-class one-hot target")
    if sorted(target.tolist()) != [0, 0, 0, 1]:
        raise ValueError(f"target {target.tolist()} is not one-hot")
    k = int(np.argmax(target))
    shifted = q - q.max()
    return float(np.log(np.exp(shifted).sum()) - shifted[k])
