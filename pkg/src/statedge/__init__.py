"""Statistical edge detection: attention-fused gradients filtered by
independence tests over pixel displacements.

The library works on float64 rasters in [0,1].  `detect` runs the whole
pipeline; the stage functions are exported for piecemeal use.  Report
writing and figures live in `statedge.report` (kept out of this
namespace so plain library use never imports matplotlib).
"""

from .core import (
    load_edge_map,
    load_raster,
    logistic,
    make_rng,
    quantize,
    save_raster,
    to_grayscale,
)
from .attention import AttentionKernels, attention_fuse, channel_weights, fuse, max_pool
from .gradient import GradientField, MembershipConfig, median_of, membership, sobel
from .refine import RefineConfig, binarize, dilate, erode, median_filter, refine
from .independence import (
    ContingencyTable,
    TestResult,
    chi_square_sf,
    chi_square_test,
    displacement_table,
    fisher_exact_test,
    independence_test,
)
from .regionfilter import (
    RegionFilterConfig,
    WindowDecision,
    apply_decisions,
    filter_regions,
    sweep_windows,
)
from .noise import NoiseSpec, add_noise
from .evaluate import MetricsReport, baseline_detect, bench, f_measure, mse, psnr
from .pipeline import (
    PipelineConfig,
    PipelineResult,
    StageError,
    config_from_mapping,
    config_to_mapping,
    detect,
    run_pipeline,
)
from .corpus import load_corpus, make_corpus, write_corpus

__version__ = "0.1.0"

__all__ = [
    "AttentionKernels",
    "ContingencyTable",
    "GradientField",
    "MembershipConfig",
    "MetricsReport",
    "NoiseSpec",
    "PipelineConfig",
    "PipelineResult",
    "RefineConfig",
    "RegionFilterConfig",
    "StageError",
    "TestResult",
    "WindowDecision",
    "add_noise",
    "apply_decisions",
    "attention_fuse",
    "baseline_detect",
    "bench",
    "binarize",
    "channel_weights",
    "chi_square_sf",
    "chi_square_test",
    "config_from_mapping",
    "config_to_mapping",
    "detect",
    "dilate",
    "displacement_table",
    "erode",
    "f_measure",
    "filter_regions",
    "fisher_exact_test",
    "fuse",
    "independence_test",
    "load_corpus",
    "load_edge_map",
    "load_raster",
    "logistic",
    "make_corpus",
    "make_rng",
    "max_pool",
    "median_filter",
    "median_of",
    "membership",
    "mse",
    "psnr",
    "quantize",
    "refine",
    "run_pipeline",
    "save_raster",
    "sobel",
    "sweep_windows",
    "to_grayscale",
    "write_corpus",
    "__version__",
]
