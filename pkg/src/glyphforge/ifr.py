"""Double-attention recombination of image features under sequence guidance.

Image features are spatial-major: an (H*W) x C matrix, one row per
spatial site.  Sequence features are L x D_s.  The first attention
(image queries over sequence keys) produces a sequence-domain query per
site, layer-normalized; the second (those queries over image keys)
rebuilds each site as a convex combination of the original image rows,
so every output channel stays inside the per-channel range of the
input.  The sequence feature is a constant input here: no gradients are
defined through it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, ShapeMismatch

LAYER_NORM_EPS = 1e-5


@dataclass(frozen=True)
class ImageFeatureMap:
    """Spatial-major feature matrix with its grid dimensions."""

    values: np.ndarray  # (H*W, C)
    height: int
    width: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.height < 1 or self.width < 1:
            raise ShapeMismatch(f"feature grid {self.height}x{self.width} must be positive")
        if self.values.ndim != 2 or self.values.shape[0] != self.height * self.width:
            raise ShapeMismatch(
                f"values shape {self.values.shape} does not match "
                f"{self.height}x{self.width} sites"
            )
        if self.values.shape[1] < 1:
            raise ShapeMismatch("feature map needs at least one channel")
        if not np.all(np.isfinite(self.values)):
            raise NonFinite("feature map contains non-finite values")


@dataclass(frozen=True)
class IfrWeights:
    """Query/key/value projections plus layer-norm affine parameters."""

    w_q_img: np.ndarray  # (C, d)
    w_k_img: np.ndarray  # (C, d)
    w_k_seq: np.ndarray  # (D_s, d)
    w_v_seq: np.ndarray  # (D_s, d)
    gain: np.ndarray | None = None  # (d,), defaults to ones
    bias: np.ndarray | None = None  # (d,), defaults to zeros

    def __post_init__(self):
        for name in ("w_q_img", "w_k_img", "w_k_seq", "w_v_seq"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        d = self.w_q_img.shape[-1] if self.w_q_img.ndim == 2 else 0
        if d < 1:
            raise ShapeMismatch("projection width d must be at least 1")
        if self.w_k_img.shape != self.w_q_img.shape:
            raise ShapeMismatch("image query/key projections must share a shape")
        if self.w_k_seq.ndim != 2 or self.w_k_seq.shape[1] != d:
            raise ShapeMismatch("sequence key projection must map to width d")
        if self.w_v_seq.shape != self.w_k_seq.shape:
            raise ShapeMismatch("sequence key/value projections must share a shape")
        gain = np.ones(d) if self.gain is None else np.asarray(self.gain, dtype=np.float64)
        bias = np.zeros(d) if self.bias is None else np.asarray(self.bias, dtype=np.float64)
        if gain.shape != (d,) or bias.shape != (d,):
            raise ShapeMismatch("gain and bias must be d-vectors")
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "bias", bias)

    @property
    def d(self) -> int:
        return self.w_q_img.shape[1]


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def layer_norm(v: np.ndarray, gain: np.ndarray | None = None,
               bias: np.ndarray | None = None) -> np.ndarray:
    """Normalize the last axis to zero mean, unit population variance.

    ``(v - mean) / sqrt(var + 1e-5) * gain + bias``; gain defaults to
    ones and bias to zeros.
    """
    v = np.asarray(v, dtype=np.float64)
    mean = v.mean(axis=-1, keepdims=True)
    var = v.var(axis=-1, keepdims=True)  # population variance
    out = (v - mean) / np.sqrt(var + LAYER_NORM_EPS)
    if gain is not None:
        out = out * np.asarray(gain, dtype=np.float64)
    if bias is not None:
        out = out + np.asarray(bias, dtype=np.float64)
    return out


def _as_matrix(f_img) -> np.ndarray:
    if isinstance(f_img, ImageFeatureMap):
        return f_img.values
    return np.asarray(f_img, dtype=np.float64)


def ifr_forward(f_img, f_seq: np.ndarray, w: IfrWeights):
    """Recombine image features under sequence guidance.

    Returns ``(recombined, attn1, attn2)`` where ``recombined`` matches
    the input feature type and shape, ``attn1`` is (H*W) x L and
    ``attn2`` is (H*W) x (H*W); all attention rows are convex weights.
    """
    img = _as_matrix(f_img)
    seq = np.asarray(f_seq, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ShapeMismatch(f"image feature must be (H*W, C), got {img.shape}")
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise ShapeMismatch(f"sequence feature must be (L, D_s), got {seq.shape}")
    if img.shape[1] != w.w_q_img.shape[0]:
        raise ShapeMismatch(
            f"feature channels {img.shape[1]} vs projection input {w.w_q_img.shape[0]}"
        )
    if seq.shape[1] != w.w_k_seq.shape[0]:
        raise ShapeMismatch(
            f"sequence channels {seq.shape[1]} vs projection input {w.w_k_seq.shape[0]}"
        )
    if not (np.all(np.isfinite(img)) and np.all(np.isfinite(seq))):
        raise NonFinite("features contain non-finite values")

    scale = 1.0 / np.sqrt(w.d)
    q_img = img @ w.w_q_img
    k_img = img @ w.w_k_img
    k_seq = seq @ w.w_k_seq
    v_seq = seq @ w.w_v_seq

    attn1 = softmax_rows(q_img @ k_seq.T * scale)
    q_seq = layer_norm(attn1 @ v_seq, w.gain, w.bias)
    attn2 = softmax_rows(q_seq @ k_img.T * scale)
    if not (np.all(np.isfinite(attn1)) and np.all(np.isfinite(attn2))):
        raise NonFinite("attention weights overflowed")
    out = attn2 @ img

    if isinstance(f_img, ImageFeatureMap):
        out = ImageFeatureMap(out, f_img.height, f_img.width)
    return out, attn1, attn2
