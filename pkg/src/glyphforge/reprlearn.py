"""Distillation-restoration mapping and the dual-modality loss stack.

Style feature vectors (dimension D, with D even) from the two branches
are projected to a common unit-sphere domain of dimension D/2
("distilled"), compared contrastively across a batch, and linearly
restored to dimension D with a reconstruction penalty.  Auxiliary style
classifiers on the original and distilled features give the
metric-learning cross-entropy terms.

Linear maps use the (out_dim, in_dim) matrix-times-vector convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BatchMismatch,
    DimensionMismatch,
    LabelOutOfRange,
    ZeroVector,
)

DEFAULT_TAU = 10.0
_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class DistillWeights:
    """Down projection (D -> D/2) and up projection (D/2 -> D)."""

    w_down: np.ndarray
    w_up: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w_down", np.asarray(self.w_down, dtype=np.float64))
        object.__setattr__(self, "w_up", np.asarray(self.w_up, dtype=np.float64))
        if self.w_down.ndim != 2 or self.w_up.ndim != 2:
            raise DimensionMismatch("projection weights must be matrices")
        half, full = self.w_down.shape
        if full != 2 * half:
            raise DimensionMismatch(
                f"down projection {self.w_down.shape} must halve the dimension"
            )
        if self.w_up.shape != (full, half):
            raise DimensionMismatch(
                f"up projection {self.w_up.shape} must invert {self.w_down.shape}"
            )


@dataclass(frozen=True)
class NceConfig:
    """Contrastive temperature and expected batch size."""

    tau: float = DEFAULT_TAU
    batch_size: int = 1

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau={self.tau!r} must be positive")
        if self.batch_size < 1:
            raise ValueError(f"batch_size={self.batch_size} must be at least 1")


@dataclass(frozen=True)
class StyleClassifier:
    """Four affine style heads: on each original (D) and distilled (D/2) feature."""

    w_img: np.ndarray        # (K, D)
    w_img_dist: np.ndarray   # (K, D/2)
    w_seq: np.ndarray        # (K, D)
    w_seq_dist: np.ndarray   # (K, D/2)
    b_img: np.ndarray | None = None
    b_img_dist: np.ndarray | None = None
    b_seq: np.ndarray | None = None
    b_seq_dist: np.ndarray | None = None

    def __post_init__(self):
        mats = ("w_img", "w_img_dist", "w_seq", "w_seq_dist")
        for name in mats:
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        k = self.w_img.shape[0] if self.w_img.ndim == 2 else 0
        if k < 1 or any(getattr(self, n).ndim != 2 or getattr(self, n).shape[0] != k
                        for n in mats):
            raise DimensionMismatch("classifier heads must share the style count")
        if self.w_img.shape != self.w_seq.shape or self.w_img_dist.shape != self.w_seq_dist.shape:
            raise DimensionMismatch("paired heads must share input dimensions")
        if self.w_img.shape[1] != 2 * self.w_img_dist.shape[1]:
            raise DimensionMismatch("distilled heads must take half the input dimension")
        for wname, bname in zip(mats, ("b_img", "b_img_dist", "b_seq", "b_seq_dist")):
            b = getattr(self, bname)
            b = np.zeros(k) if b is None else np.asarray(b, dtype=np.float64)
            if b.shape != (k,):
                raise DimensionMismatch(f"{bname} must have shape ({k},)")
            object.__setattr__(self, bname, b)

    @property
    def n_styles(self) -> int:
        return self.w_img.shape[0]


def distill(f: np.ndarray, w: DistillWeights) -> np.ndarray:
    """Project to D/2 and normalize to the unit sphere."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (w.w_down.shape[1],):
        raise DimensionMismatch(f"feature {f.shape} vs down projection {w.w_down.shape}")
    y = w.w_down @ f
    n = np.linalg.norm(y)
    if n < _NORM_FLOOR:
        raise ZeroVector(f"projected norm {n!r} too small to normalize")
    return y / n


def restore(fd: np.ndarray, w: DistillWeights) -> np.ndarray:
    """Linear up projection of a distilled feature back to dimension D."""
    fd = np.asarray(fd, dtype=np.float64)
    if fd.shape != (w.w_up.shape[1],):
        raise DimensionMismatch(f"feature {fd.shape} vs up projection {w.w_up.shape}")
    return w.w_up @ fd


def mean_pool(seq_feature: np.ndarray) -> np.ndarray:
    """Mean over the step axis of an (L, D) sequence feature."""
    seq_feature = np.asarray(seq_feature, dtype=np.float64)
    if seq_feature.ndim != 2 or seq_feature.shape[0] < 1:
        raise DimensionMismatch(f"expected (L, D) feature, got shape {seq_feature.shape}")
    return seq_feature.mean(axis=0)


def loss_nce(img_batch: np.ndarray, seq_batch: np.ndarray,
             cfg: NceConfig) -> tuple[float, np.ndarray, np.ndarray]:
    """One-directional contrastive loss over aligned positive pairs.

    Anchors are image rows; row i of each batch is the positive pair.
    Similarity is the cosine, scaled by cfg.tau.  Returns
    ``(loss, grad_img, grad_seq)`` with analytic gradients for both
    batches (cosine gradients, tangent to the unit sphere at unit-norm
    inputs).
    """
    img = np.asarray(img_batch, dtype=np.float64)
    seq = np.asarray(seq_batch, dtype=np.float64)
    if img.shape != seq.shape or img.ndim != 2:
        raise BatchMismatch(f"batch shapes {img.shape} vs {seq.shape}")
    b = img.shape[0]
    if b != cfg.batch_size:
        raise BatchMismatch(f"batch size {b} vs configured {cfg.batch_size}")
    ni = np.linalg.norm(img, axis=1)
    mj = np.linalg.norm(seq, axis=1)
    if np.any(ni < _NORM_FLOOR) or np.any(mj < _NORM_FLOOR):
        raise ZeroVector("batch rows must have nonzero norm")
    img_n = img / ni[:, None]
    seq_n = seq / mj[:, None]
    sim = img_n @ seq_n.T  # cosine matrix

    logits = cfg.tau * sim
    shifted = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1)) + logits.max(axis=1)
    loss = float(np.mean(lse - np.diag(logits)))

    attn = np.exp(shifted)
    attn /= attn.sum(axis=1, keepdims=True)
    coef = (cfg.tau / b) * (attn - np.eye(b))  # d(loss)/d(sim)

    row = (coef * sim).sum(axis=1)
    col = (coef * sim).sum(axis=0)
    grad_img = (coef @ seq_n - row[:, None] * img_n) / ni[:, None]
    grad_seq = (coef.T @ img_n - col[:, None] * seq_n) / mj[:, None]
    return loss, grad_img, grad_seq


def loss_rec(f_img_s: np.ndarray, f_r_img: np.ndarray,
             f_seq_s: np.ndarray, f_r_seq: np.ndarray) -> float:
    """Sum of squared restoration errors for the two modalities."""
    pairs = [
        (np.asarray(f_img_s, dtype=np.float64), np.asarray(f_r_img, dtype=np.float64)),
        (np.asarray(f_seq_s, dtype=np.float64), np.asarray(f_r_seq, dtype=np.float64)),
    ]
    total = 0.0
    for orig, rest in pairs:
        if orig.shape != rest.shape:
            raise DimensionMismatch(f"feature shapes {orig.shape} vs {rest.shape}")
        total += float(np.sum((orig - rest) ** 2))
    return total


def _cross_entropy(logits: np.ndarray, label: int) -> float:
    shifted = logits - logits.max()
    return float(np.log(np.exp(shifted).sum()) - shifted[label])


def loss_dml(features, cls: StyleClassifier, label: int) -> float:
    """Sum of the four style-classification cross-entropies.

    ``features`` is the tuple (image style, distilled image, sequence
    style, distilled sequence).
    """
    if not 0 <= label < cls.n_styles:
        raise LabelOutOfRange(f"label {label} for {cls.n_styles} styles")
    f_img, f_d_img, f_seq, f_d_seq = (np.asarray(f, dtype=np.float64) for f in features)
    heads = [
        (cls.w_img, cls.b_img, f_img),
        (cls.w_img_dist, cls.b_img_dist, f_d_img),
        (cls.w_seq, cls.b_seq, f_seq),
        (cls.w_seq_dist, cls.b_seq_dist, f_d_seq),
    ]
    total = 0.0
    for w, bias, f in heads:
        if f.shape != (w.shape[1],):
            raise DimensionMismatch(f"feature {f.shape} vs head {w.shape}")
        total += _cross_entropy(w @ f + bias, label)
    return total
