"""Quality metrics and the corpus benchmark harness.

MSE and PSNR follow the usual 0-255 convention: inputs on the [0, 1]
working scale (or bool maps) are rescaled by 255 inside the metric, and
MSE 0 maps to an infinite PSNR that serializes as the string "inf".
Boundary agreement uses greedy one-to-one matching of predicted pixels
to ground-truth pixels within a Euclidean tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import to_grayscale
from .gradient import sobel
from .noise import NoiseSpec, add_noise  # re-exported; lives in noise.py
from .pipeline import PipelineConfig, config_to_mapping, detect

PEAK = 255.0
DEFAULT_BASELINE_THRESHOLD = 0.7


@dataclass
class MetricsReport:
    mse: float
    psnr_db: float
    precision: float
    recall: float
    f_measure: float
    tp: int
    fp: int
    fn: int


def _to_255(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img)
    if arr.dtype == bool:
        return np.where(arr, PEAK, 0.0)
    return np.asarray(arr, dtype=np.float64) * PEAK


def mse(pred: np.ndarray, ref: np.ndarray) -> float:
    """Mean squared error on the 0-255 scale."""
    p, r = _to_255(pred), _to_255(ref)
    if p.shape != r.shape:
        raise ValueError("dimension mismatch")
    diff = p - r
    return float(np.mean(diff * diff))


def psnr(pred: np.ndarray, ref: np.ndarray) -> float:
    """10 log10(255^2 / MSE); identical images give +inf."""
    err = mse(pred, ref)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / err)


def _match_offsets(tol: float) -> list[tuple[int, int, int]]:
    # All integer offsets within tol, sorted by squared distance and then
    # raster order, so the first unmatched hit is the greedy choice.
    reach = int(math.floor(tol))
    out = []
    for dy in range(-reach, reach + 1):
        for dx in range(-reach, reach + 1):
            dsq = dx * dx + dy * dy
            if dsq <= tol * tol:
                out.append((dsq, dy, dx))
    out.sort()
    return out


def f_measure(pred: np.ndarray, gt: np.ndarray, tol: float = 2.0) -> MetricsReport:
    """Greedy one-to-one boundary matching plus the pixel metrics.

    Each predicted pixel, visited in raster order, claims the nearest
    still-unmatched ground-truth pixel within Euclidean distance tol,
    ties resolved in raster order.  TP = matches, FP = unmatched
    predictions, FN = unmatched ground truth.  Both maps empty counts as
    perfect agreement.
    """
    p = np.asarray(pred, dtype=bool)
    g = np.asarray(gt, dtype=bool)
    if p.shape != g.shape:
        raise ValueError("dimension mismatch")
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    unmatched = set(map(tuple, np.argwhere(g)))
    offsets = _match_offsets(tol)
    tp = 0
    for y, x in np.argwhere(p):
        for _, dy, dx in offsets:
            cand = (y + dy, x + dx)
            if cand in unmatched:
                unmatched.remove(cand)
                tp += 1
                break
    npred = int(p.sum())
    ngt = int(g.sum())
    fp = npred - tp
    fn = ngt - tp
    precision = tp / npred if npred else 1.0
    recall = tp / ngt if ngt else 1.0
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsReport(mse=mse(p, g), psnr_db=psnr(p, g),
                         precision=precision, recall=recall, f_measure=f,
                         tp=tp, fp=fp, fn=fn)


def baseline_detect(img: np.ndarray,
                    threshold: float = DEFAULT_BASELINE_THRESHOLD) -> np.ndarray:
    """Comparison baseline: plain Sobel magnitude over a fixed threshold,
    no attention, no refinement, no region filtering."""
    arr = np.asarray(img, dtype=np.float64)
    plane = to_grayscale(arr) if arr.ndim == 3 else arr
    return sobel(plane).mag >= threshold


def _row(name: str, pred: np.ndarray, gt, image, tol: float) -> dict:
    if gt is not None:
        rep = f_measure(pred, gt, tol)
        return {"name": name, "mse": rep.mse, "psnr_db": rep.psnr_db,
                "precision": rep.precision, "recall": rep.recall,
                "f": rep.f_measure}
    warnings.warn(f"{name}: no ground truth; comparing against the grayscale "
                  "input, precision/recall/f omitted")
    plane = to_grayscale(image) if np.asarray(image).ndim == 3 else image
    return {"name": name, "mse": mse(pred, plane), "psnr_db": psnr(pred, plane),
            "precision": None, "recall": None, "f": None}


def _mean(rows: list[dict], key: str):
    vals = [r[key] for r in rows if r[key] is not None]
    if not vals:
        return None
    if any(math.isinf(v) for v in vals):
        return math.inf
    return sum(vals) / len(vals)


def bench(corpus, cfg: PipelineConfig | None = None, detector: str = "pipeline",
          baseline_threshold: float = DEFAULT_BASELINE_THRESHOLD) -> dict:
    """Run a detector over (name, image, gt) triples and tabulate metrics.

    gt entries may be None (metrics then fall back to the grayscale
    input).  Returns config echo, one row per image in corpus order, and
    the means over rows.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    if detector not in ("pipeline", "baseline"):
        raise ValueError("detector must be 'pipeline' or 'baseline'")
    if cfg is None:
        cfg = PipelineConfig()
    rows = []
    for name, image, gt in corpus:
        arr = np.asarray(image, dtype=np.float64)
        if detector == "baseline":
            if cfg.noise is not None:
                arr = add_noise(arr, cfg.noise)
            pred = baseline_detect(arr, baseline_threshold)
        else:
            pred = detect(arr, cfg)  # applies cfg.noise itself
        rows.append(_row(str(name), pred, gt, arr, cfg.match_tolerance))
    means = {k: _mean(rows, k) for k in ("mse", "psnr_db", "precision", "recall", "f")}
    echo = config_to_mapping(cfg)
    echo["detector"] = detector
    if detector == "baseline":
        echo["baseline-threshold"] = baseline_threshold
    return {"config": echo, "images": rows, "mean": means}
