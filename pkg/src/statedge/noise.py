"""Seeded noise injection for robustness experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import make_rng

NOISE_KINDS = ("gaussian", "salt-pepper")


@dataclass(frozen=True)
class NoiseSpec:
    """kind "gaussian" takes level as sigma in 0-255 units; kind
    "salt-pepper" takes level as the fraction of pixels hit."""

    kind: str
    level: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}")
        if self.level < 0:
            raise ValueError("noise level must be nonnegative")
        if self.kind == "salt-pepper" and self.level > 1:
            raise ValueError("salt-pepper fraction cannot exceed 1")


def add_noise(img: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Corrupt a plane or multi-channel image, deterministically per seed."""
    arr = np.asarray(img, dtype=np.float64)
    rng = make_rng(spec.seed)
    if spec.kind == "gaussian":
        if spec.level == 0:
            return arr.copy()
        return np.clip(arr + rng.normal(0.0, spec.level / 255.0, size=arr.shape),
                       0.0, 1.0)
    # salt-pepper: floor(level * H * W) distinct pixels, each forced to 0 or
    # 1 with equal probability; a multi-channel pixel flips as a whole.
    h, w = arr.shape[:2]
    count = int(spec.level * h * w)
    out = arr.copy()
    if count == 0:
        return out
    flat = rng.choice(h * w, size=count, replace=False)
    values = rng.integers(0, 2, size=count).astype(np.float64)
    ys, xs = np.unravel_index(flat, (h, w))
    if out.ndim == 2:
        out[ys, xs] = values
    else:
        out[ys, xs] = values[:, None]
    return out
