"""End-to-end detection pipeline and its configuration."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .attention import AttentionKernels, attention_fuse
from .core import to_grayscale
from .gradient import GradientField, MembershipConfig, membership, sobel
from .noise import NoiseSpec, add_noise
from .refine import RefineConfig, refine
from .regionfilter import (RegionFilterConfig, WindowDecision,
                           apply_decisions, sweep_windows)


class StageError(RuntimeError):
    """Failure inside one pipeline stage, labeled with the stage name."""


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(f"stage '{name}': {exc}") from exc


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the pipeline; defaults match the per-module ones."""

    use_attention: bool = True
    kernels: AttentionKernels | None = None  # None means defaults at run time
    membership: MembershipConfig = field(default_factory=MembershipConfig)
    refinement: RefineConfig = field(default_factory=RefineConfig)
    regions: RegionFilterConfig = field(default_factory=RegionFilterConfig)
    use_region_filter: bool = True
    match_tolerance: float = 2.0
    noise: NoiseSpec | None = None
    seed: int = 0

    def __post_init__(self):
        if self.match_tolerance < 0:
            raise ValueError("match tolerance must be nonnegative")


@dataclass
class PipelineResult:
    """Every intermediate the pipeline produced, for dumps and tests."""

    fused: np.ndarray
    weights: np.ndarray | None
    field: GradientField
    membership: np.ndarray
    candidates: np.ndarray  # refined map before region filtering
    edges: np.ndarray
    decisions: list[WindowDecision] | None = None


def run_pipeline(img: np.ndarray, cfg: PipelineConfig | None = None,
                 want_decisions: bool = False) -> PipelineResult:
    """Run every stage and keep the intermediates."""
    if cfg is None:
        cfg = PipelineConfig()
    arr = np.asarray(img, dtype=np.float64)

    with _stage("noise"):
        if cfg.noise is not None:
            arr = add_noise(arr, cfg.noise)

    with _stage("attention"):
        if arr.ndim == 2:
            fused, weights = arr, None  # single plane, nothing to fuse
        elif cfg.use_attention:
            kernels = cfg.kernels or AttentionKernels.defaults(arr.shape[2])
            fused, weights = attention_fuse(arr, kernels)
        else:
            fused, weights = to_grayscale(arr), None

    with _stage("gradient"):
        grad = sobel(fused)
        mu = membership(grad.mag, cfg.membership)

    with _stage("refine"):
        candidates = refine(mu, cfg.refinement)

    with _stage("regions"):
        decisions = None
        if cfg.use_region_filter:
            decisions = sweep_windows(candidates, cfg.regions)
            edges = apply_decisions(candidates, decisions)
            if not want_decisions:
                decisions = None
        else:
            edges = candidates.copy()

    return PipelineResult(fused=fused, weights=weights, field=grad,
                          membership=mu, candidates=candidates, edges=edges,
                          decisions=decisions)


def detect(img: np.ndarray, cfg: PipelineConfig | None = None) -> np.ndarray:
    """Binary edge map for an image, per the configured pipeline."""
    return run_pipeline(img, cfg).edges


# ---------------------------------------------------------------------------
# Flat mapping <-> PipelineConfig.  Keys mirror the CLI flag names; the same
# keys appear in config files and in report config echoes, so there is one
# ledger of tunables.

def config_to_mapping(cfg: PipelineConfig) -> dict:
    out = {
        "no-cam": not cfg.use_attention,
        "k-steepness": cfg.membership.k,
        "x0": cfg.membership.x0,
        "median-kernel": cfg.refinement.median_kernel,
        "binarize-threshold": cfg.refinement.binarize_threshold,
        "morph-order": cfg.refinement.morph_order,
        "no-edit": not cfg.use_region_filter,
        "window": cfg.regions.window,
        "stride": cfg.regions.stride,
        "k-displacement": cfg.regions.displacement_limit,
        "alpha": cfg.regions.alpha,
        "min-points": cfg.regions.min_points,
        "fisher-mode": cfg.regions.fisher_mode,
        "tolerance": cfg.match_tolerance,
        "seed": cfg.seed,
    }
    if cfg.kernels is not None:
        out["cam-depthwise"] = cfg.kernels.depthwise.tolist()
        out["cam-pointwise"] = cfg.kernels.pointwise.tolist()
        out["cam-mix"] = cfg.kernels.mix.tolist()
    if cfg.noise is not None:
        out["noise-kind"] = cfg.noise.kind
        out["noise-level"] = cfg.noise.level
        out["noise-seed"] = cfg.noise.seed
    return out


def _kernels_from_mapping(values: dict) -> AttentionKernels | None:
    keys = ("cam-depthwise", "cam-pointwise", "cam-mix")
    if not any(k in values for k in keys):
        return None
    base = AttentionKernels.defaults(3)
    depth = np.asarray(values.get("cam-depthwise", base.depthwise), dtype=np.float64)
    if depth.ndim == 2:  # one kernel shared by every channel
        depth = np.stack([depth] * 3)
    point = np.asarray(values.get("cam-pointwise", base.pointwise), dtype=np.float64)
    mix = np.asarray(values.get("cam-mix", base.mix), dtype=np.float64)
    return AttentionKernels(depth, point, mix)


_KNOWN_KEYS = frozenset({
    "no-cam", "cam-depthwise", "cam-pointwise", "cam-mix",
    "k-steepness", "x0",
    "median-kernel", "binarize-threshold", "morph-order", "no-median",
    "no-edit", "window", "stride", "k-displacement", "alpha", "min-points",
    "fisher-mode", "tolerance", "noise-kind", "noise-level", "noise-seed",
    "seed",
})


def config_from_mapping(values: dict) -> PipelineConfig:
    """Build a PipelineConfig from flat flag-named keys."""
    unknown = set(values) - _KNOWN_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    def pick(key, default):
        v = values.get(key)
        return default if v is None else v

    x0 = pick("x0", "median")
    if isinstance(x0, str) and x0 not in ("median", "mean"):
        x0 = float(x0)
    member = MembershipConfig(k=float(pick("k-steepness", 5.0)), x0=x0)
    median_kernel = int(pick("median-kernel", 5))
    if values.get("no-median"):
        median_kernel = 1  # size-1 kernel is the identity
    refinement = RefineConfig(median_kernel=median_kernel,
                              binarize_threshold=float(pick("binarize-threshold", 0.7)),
                              morph_order=str(pick("morph-order", "close")))
    regions = RegionFilterConfig(window=int(pick("window", 15)),
                                 stride=int(pick("stride", 5)),
                                 displacement_limit=int(pick("k-displacement", 3)),
                                 alpha=float(pick("alpha", 0.05)),
                                 min_points=int(pick("min-points", 5)),
                                 fisher_mode=str(pick("fisher-mode", "point")))
    seed = int(pick("seed", 0))
    noise = None
    if values.get("noise-kind") is not None:
        if values.get("noise-level") is None:
            raise ValueError("noise-kind given without noise-level")
        noise = NoiseSpec(kind=str(values["noise-kind"]),
                          level=float(values["noise-level"]),
                          seed=int(pick("noise-seed", seed)))
    return PipelineConfig(use_attention=not values.get("no-cam", False),
                          kernels=_kernels_from_mapping(values),
                          membership=member,
                          refinement=refinement,
                          regions=regions,
                          use_region_filter=not values.get("no-edit", False),
                          match_tolerance=float(pick("tolerance", 2.0)),
                          noise=noise,
                          seed=seed)
