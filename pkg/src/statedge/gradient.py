"""Sobel gradients and the sigmoid membership mapping of magnitude."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import correlate2d, logistic

SOBEL_X = np.array([[-1.0, 0.0, 1.0],
                    [-2.0, 0.0, 2.0],
                    [-1.0, 0.0, 1.0]])
SOBEL_Y = np.array([[1.0, 2.0, 1.0],
                    [0.0, 0.0, 0.0],
                    [-1.0, -2.0, -1.0]])


@dataclass(frozen=True)
class GradientField:
    gx: np.ndarray
    gy: np.ndarray
    mag: np.ndarray
    theta: np.ndarray


@dataclass(frozen=True)
class MembershipConfig:
    """Sigmoid steepness k and inflection point x0.

    x0 is either the literal string "median" or "mean" (resolved against
    the magnitude plane) or a fixed number.
    """

    k: float = 5.0
    x0: float | str = "median"

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("steepness k must be positive")
        if isinstance(self.x0, str) and self.x0 not in ("median", "mean"):
            raise ValueError("x0 must be 'median', 'mean', or a number")


def sobel(plane: np.ndarray) -> GradientField:
    """Correlate with the fixed 3x3 pair, replicate padding at borders."""
    arr = np.asarray(plane, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("sobel expects a single plane")
    if min(arr.shape) < 3:
        raise ValueError("image smaller than the 3x3 kernels")
    gx = correlate2d(arr, SOBEL_X)
    gy = correlate2d(arr, SOBEL_Y)
    mag = np.sqrt(gx * gx + gy * gy)
    # Direction is a diagnostic plane only; nothing downstream reads it.
    theta = np.arctan2(gy, gx)
    return GradientField(gx=gx, gy=gy, mag=mag, theta=theta)


def median_of(plane: np.ndarray) -> float:
    """Exact median; even counts average the two middle order statistics."""
    vals = np.asarray(plane, dtype=np.float64).ravel()
    if vals.size == 0:
        raise ValueError("median of an empty plane")
    return float(np.median(vals))


def resolve_x0(mag: np.ndarray, cfg: MembershipConfig) -> float:
    if cfg.x0 == "median":
        return median_of(mag)
    if cfg.x0 == "mean":
        return float(np.asarray(mag, dtype=np.float64).mean())
    return float(cfg.x0)


def membership(mag: np.ndarray, cfg: MembershipConfig = MembershipConfig()) -> np.ndarray:
    """Map magnitude to (0, 1) edge-ness: 1 / (1 + exp(-k (x - x0)))."""
    arr = np.asarray(mag, dtype=np.float64)
    x0 = resolve_x0(arr, cfg)
    return logistic(cfg.k * (arr - x0))
