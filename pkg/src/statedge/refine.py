"""Median smoothing, binarization, and binary morphology.

The membership plane is coarse-grained with a square median filter,
thresholded into a binary map, and smoothed morphologically.  The
default morphology is a closing (dilate then erode) with the 3x3 square
element; out-of-bounds neighbors count as false.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

MORPH_ORDERS = ("close", "open", "none")


@dataclass(frozen=True)
class RefineConfig:
    median_kernel: int = 5
    binarize_threshold: float = 0.7
    morph_order: str = "close"
    morph_kernel: int = 3  # the only supported structuring element

    def __post_init__(self):
        if self.median_kernel < 1 or self.median_kernel % 2 == 0:
            raise ValueError("median kernel must be odd and >= 1")
        if not 0.0 < self.binarize_threshold < 1.0:
            raise ValueError("binarize threshold must lie strictly inside (0, 1)")
        if self.morph_order not in MORPH_ORDERS:
            raise ValueError(f"morph order must be one of {MORPH_ORDERS}")
        if self.morph_kernel != 3:
            raise ValueError("only the 3x3 structuring element is supported")


def median_filter(plane: np.ndarray, size: int) -> np.ndarray:
    """size x size median with replicate padding; size 1 is the identity."""
    if size < 1 or size % 2 == 0:
        raise ValueError("median kernel must be odd and >= 1")
    arr = np.asarray(plane, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("median filter expects a single plane")
    if size == 1:
        return arr.copy()
    pad = size // 2
    padded = np.pad(arr, pad, mode="edge")
    windows = sliding_window_view(padded, (size, size))
    return np.median(windows, axis=(-2, -1))


def binarize(plane: np.ndarray, threshold: float) -> np.ndarray:
    """Pixel true iff value >= threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie strictly inside (0, 1)")
    return np.asarray(plane, dtype=np.float64) >= threshold


def dilate(edge_map: np.ndarray) -> np.ndarray:
    """True if any pixel of the 3x3 neighborhood is true."""
    m = np.asarray(edge_map, dtype=bool)
    padded = np.pad(m, 1, mode="constant", constant_values=False)
    return sliding_window_view(padded, (3, 3)).any(axis=(-2, -1))


def erode(edge_map: np.ndarray) -> np.ndarray:
    """True only if the whole 3x3 neighborhood is true; borders never are,
    because out-of-bounds counts as false."""
    m = np.asarray(edge_map, dtype=bool)
    padded = np.pad(m, 1, mode="constant", constant_values=False)
    return sliding_window_view(padded, (3, 3)).all(axis=(-2, -1))


def refine(membership_plane: np.ndarray,
           cfg: RefineConfig = RefineConfig()) -> np.ndarray:
    """median filter -> binarize -> morphology in the configured order."""
    smoothed = median_filter(membership_plane, cfg.median_kernel)
    out = binarize(smoothed, cfg.binarize_threshold)
    if cfg.morph_order == "close":
        out = erode(dilate(out))
    elif cfg.morph_order == "open":
        out = dilate(erode(out))
    return out
