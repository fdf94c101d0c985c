"""Channel attention fusion.

A three-channel image is collapsed to one enhanced plane in two steps.
First a fixed convolutional stack (depthwise 3x3, pointwise 2x2 with
channel mixing, ReLU, 2x2 max pooling) summarizes each channel; the
logistic of each pooled channel mean becomes that channel's attention
weight.  Second, the weights blend the original full-resolution
channels into a single plane, so the downstream gradient stage keeps
full detail.

Nothing here is trained.  The default kernels are a high-boost sharpen
per channel and a uniform 2x2 box with half-self / quarter-cross channel
mixing; both are overridable through the config file.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import correlate2d, logistic

DEFAULT_DEPTHWISE = np.array([[0.0, -1.0, 0.0],
                              [-1.0, 5.0, -1.0],
                              [0.0, -1.0, 0.0]])
DEFAULT_POINTWISE = np.full((2, 2), 0.25)


def default_mix(channels: int) -> np.ndarray:
    mix = np.full((channels, channels), 0.25)
    np.fill_diagonal(mix, 0.5)
    return mix


@dataclass(frozen=True)
class AttentionKernels:
    """Fixed weights for the attention feature stack.

    depthwise: (C, 3, 3), one kernel per channel.
    pointwise: (2, 2) spatial kernel shared by all channel pairs.
    mix: (C, C) channel-mixing weights, row = output channel.
    """

    depthwise: np.ndarray
    pointwise: np.ndarray
    mix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "depthwise", np.asarray(self.depthwise, dtype=np.float64))
        object.__setattr__(self, "pointwise", np.asarray(self.pointwise, dtype=np.float64))
        object.__setattr__(self, "mix", np.asarray(self.mix, dtype=np.float64))
        if self.depthwise.ndim != 3 or self.depthwise.shape[1:] != (3, 3):
            raise ValueError("depthwise kernels must have shape (C, 3, 3)")
        if self.pointwise.shape != (2, 2):
            raise ValueError("pointwise kernel must be 2x2")
        c = self.depthwise.shape[0]
        if self.mix.shape != (c, c):
            raise ValueError("mixing matrix does not match channel count")

    @property
    def channels(self) -> int:
        return self.depthwise.shape[0]

    @classmethod
    def defaults(cls, channels: int = 3) -> "AttentionKernels":
        depth = np.stack([DEFAULT_DEPTHWISE] * channels)
        return cls(depth, DEFAULT_POINTWISE.copy(), default_mix(channels))


def _as_channels(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError("expected a multi-channel image of shape (H, W, C)")
    return arr


def depthwise_conv(img: np.ndarray, kernels: AttentionKernels) -> np.ndarray:
    """Each channel correlated with its own 3x3 kernel, dims unchanged."""
    arr = _as_channels(img)
    c = arr.shape[2]
    if kernels.channels != c:
        raise ValueError(f"kernel/channel count mismatch: {kernels.channels} != {c}")
    return np.stack([correlate2d(arr[:, :, i], kernels.depthwise[i]) for i in range(c)],
                    axis=2)


def pointwise_conv(feat: np.ndarray, kernels: AttentionKernels) -> np.ndarray:
    """2x2 window correlation per channel, then CxC channel mixing."""
    arr = _as_channels(feat)
    c = arr.shape[2]
    if kernels.mix.shape != (c, c):
        raise ValueError("mixing matrix does not match channel count")
    windowed = [correlate2d(arr[:, :, i], kernels.pointwise) for i in range(c)]
    out = np.empty_like(arr)
    for i in range(c):
        acc = np.zeros(arr.shape[:2], dtype=np.float64)
        for j in range(c):
            acc += kernels.mix[i, j] * windowed[j]
        out[:, :, i] = acc
    return out


def relu(feat: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(feat, dtype=np.float64), 0.0)


def max_pool(feat: np.ndarray, n: int = 2) -> np.ndarray:
    """Block maxima over n x n tiles; ragged border tiles use what is there,
    so output dims are ceil(m / n)."""
    arr = np.asarray(feat, dtype=np.float64)
    if n < 1:
        raise ValueError("pool window must be at least 1")
    h, w = arr.shape[:2]
    oh, ow = -(-h // n), -(-w // n)
    out = np.empty((oh, ow) + arr.shape[2:], dtype=np.float64)
    for i in range(oh):
        for j in range(ow):
            block = arr[i * n:(i + 1) * n, j * n:(j + 1) * n]
            out[i, j] = block.max(axis=(0, 1))
    return out


def channel_weights(feat: np.ndarray) -> np.ndarray:
    """Logistic of the spatial mean of each feature channel, in (0, 1)."""
    arr = _as_channels(feat)
    return logistic(arr.mean(axis=(0, 1)))


def fuse(img: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted mean of the original channels: sum(a_c I_c) / sum(a_c)."""
    arr = _as_channels(img)
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != arr.shape[2]:
        raise ValueError("weight count does not match channel count")
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must have a positive sum")
    fused = np.tensordot(arr, w, axes=([2], [0])) / total
    return np.clip(fused, 0.0, 1.0)


def attention_fuse(img: np.ndarray,
                   kernels: AttentionKernels | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Full attention pass: feature stack, per-channel weights, fusion.

    Returns the fused full-resolution plane and the channel weights.
    """
    arr = _as_channels(img)
    if arr.shape[2] != 3:
        raise ValueError("attention fusion expects a 3-channel image")
    if kernels is None:
        kernels = AttentionKernels.defaults(3)
    feat = depthwise_conv(arr, kernels)
    feat = pointwise_conv(feat, kernels)
    feat = relu(feat)
    pooled = max_pool(feat, 2)
    weights = channel_weights(pooled)
    return fuse(arr, weights), weights
