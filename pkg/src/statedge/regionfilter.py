"""Region-wise dependence filtering of candidate edge maps.

A square window sweeps the map in raster order with a fixed stride, the
last window of each row/column clamped to the border.  Within every
window the edge pixel coordinates are tested for statistical dependence
between their x and y displacements; windows holding fewer than
min_points pixels are skipped and grant no survival.  A pixel survives
iff at least one window containing it tested dependent (union rule), so
structured contours pass while incoherent specks drop out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .independence import TestResult, displacement_table, independence_test


@dataclass(frozen=True)
class RegionFilterConfig:
    window: int = 15
    stride: int = 5
    displacement_limit: int = 3
    alpha: float = 0.05
    min_points: int = 5
    fisher_mode: str = "point"

    def __post_init__(self):
        if not self.window >= self.stride >= 1:
            raise ValueError("need window >= stride >= 1")
        if self.displacement_limit < 0:
            raise ValueError("displacement limit must be nonnegative")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly inside (0, 1)")
        if self.min_points < 2:
            raise ValueError("min_points must be at least 2")


@dataclass(frozen=True)
class WindowDecision:
    origin: tuple[int, int]  # (x, y) of the top-left corner
    size: tuple[int, int]    # (w, h); smaller than window only when the map is
    npoints: int
    result: TestResult | None  # None when the window was skipped
    kept: bool


def _origins(dim: int, window: int, stride: int) -> list[int]:
    if window >= dim:
        return [0]
    last = dim - window
    out = list(range(0, last + 1, stride))
    if out[-1] != last:
        out.append(last)  # clamp the final window to the border
    return out


def sweep_windows(edge_map: np.ndarray,
                  cfg: RegionFilterConfig = RegionFilterConfig()) -> list[WindowDecision]:
    """Test every window position and record one decision per window."""
    m = np.asarray(edge_map, dtype=bool)
    if m.ndim != 2:
        raise ValueError("edge map must be a 2-D bool array")
    h, w = m.shape
    wh, ww = min(cfg.window, h), min(cfg.window, w)
    decisions = []
    for oy in _origins(h, cfg.window, cfg.stride):
        for ox in _origins(w, cfg.window, cfg.stride):
            tile = m[oy:oy + wh, ox:ox + ww]
            ys, xs = np.nonzero(tile)
            count = int(xs.size)
            if count < cfg.min_points:
                decisions.append(WindowDecision((ox, oy), (ww, wh), count, None, False))
                continue
            table = displacement_table(np.column_stack([xs, ys]),
                                       cfg.displacement_limit)
            result = independence_test(table, cfg.alpha, cfg.fisher_mode)
            decisions.append(WindowDecision((ox, oy), (ww, wh), count,
                                            result, result.dependent))
    return decisions


def apply_decisions(edge_map: np.ndarray,
                    decisions: list[WindowDecision]) -> np.ndarray:
    """Union of all dependent windows, intersected with the input map."""
    m = np.asarray(edge_map, dtype=bool)
    keep = np.zeros_like(m)
    for decision in decisions:
        if decision.kept:
            ox, oy = decision.origin
            tw, th = decision.size
            keep[oy:oy + th, ox:ox + tw] = True
    return m & keep


def filter_regions(edge_map: np.ndarray,
                   cfg: RegionFilterConfig = RegionFilterConfig()) -> np.ndarray:
    """Drop every pixel not covered by at least one dependent window."""
    m = np.asarray(edge_map, dtype=bool)
    return apply_decisions(m, sweep_windows(m, cfg))
