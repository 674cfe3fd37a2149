"""Image-branch losses and the weighted loss combinations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class LossWeights:
    """The five combination weights (all default 1.0)."""

    lambda1: float = 1.0  # point NLL
    lambda2: float = 1.0  # control-label CE
    lambda3: float = 1.0  # rasterization penalty
    lambda4: float = 1.0  # pixel MAE
    lambda5: float = 1.0  # Gram/perceptual

    def __post_init__(self):
        for k in range(1, 6):
            v = getattr(self, f"lambda{k}")
            if v < 0:
                raise ValueError(f"lambda{k}={v!r} must be nonnegative")


def loss_pixel(gt: np.ndarray, fake: np.ndarray) -> float:
    """Mean absolute pixel error."""
    gt = np.asarray(gt, dtype=np.float64)
    fake = np.asarray(fake, dtype=np.float64)
    if gt.shape != fake.shape:
        raise DimensionMismatch(f"image shapes {gt.shape} vs {fake.shape}")
    return float(np.mean(np.abs(gt - fake)))


def gram(features: np.ndarray) -> np.ndarray:
    """Channel covariance (F^T F) / N of an N x C feature matrix."""
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] < 1:
        raise DimensionMismatch(f"expected (N, C) features, got shape {f.shape}")
    return f.T @ f / f.shape[0]


def loss_gram(gt_stack, fake_stack) -> float:
    """Sum over layers of the mean absolute Gram-matrix difference."""
    if len(gt_stack) != len(fake_stack):
        raise DimensionMismatch(f"{len(gt_stack)} vs {len(fake_stack)} layers")
    total = 0.0
    for a, b in zip(gt_stack, fake_stack):
        ga, gb = gram(a), gram(b)
        if ga.shape != gb.shape:
            raise DimensionMismatch(f"layer Gram shapes {ga.shape} vs {gb.shape}")
        total += float(np.mean(np.abs(ga - gb)))
    return total


def combine_seq(loss_point: float, loss_label: float, loss_diff: float,
                w: LossWeights) -> float:
    """Weighted sequence-branch total."""
    return w.lambda1 * loss_point + w.lambda2 * loss_label + w.lambda3 * loss_diff


def combine_img(loss_pixel: float, loss_gram: float, w: LossWeights) -> float:
    """Weighted image-branch total."""
    return w.lambda4 * loss_pixel + w.lambda5 * loss_gram


def combine_total(loss_img: float, loss_seq: float, loss_nce: float,
                  loss_rec: float, loss_dml: float) -> float:
    """Unweighted sum of the five branch/alignment totals."""
    return loss_img + loss_seq + loss_nce + loss_rec + loss_dml
