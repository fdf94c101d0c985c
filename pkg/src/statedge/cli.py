"""Command line driver.

Subcommands: detect, eval, noise, bench, sweep-median.  Exit codes: 0
success, 2 usage error (argparse), 1 processing error.

Configuration precedence is defaults < config file < explicit flags.
The config file is flat `key = value` lines named after the flags; a
default path can be set in the STATEDGE_CONFIG environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import report
from .core import load_edge_map, load_raster, save_raster
from .corpus import load_corpus, make_corpus
from .evaluate import DEFAULT_BASELINE_THRESHOLD, bench, f_measure
from .noise import NoiseSpec
from .pipeline import (PipelineConfig, config_from_mapping, config_to_mapping,
                       run_pipeline)

CONFIG_ENV = "STATEDGE_CONFIG"
SWEEP_KERNELS = (1, 3, 5, 7)

# mapping keys that have a matching CLI flag (see pipeline.config_from_mapping)
_FLAG_KEYS = (
    "no-cam", "k-steepness", "x0",
    "median-kernel", "no-median", "binarize-threshold", "morph-order",
    "no-edit", "window", "stride", "k-displacement", "alpha", "min-points",
    "fisher-mode", "tolerance",
    "noise-kind", "noise-level", "noise-seed", "seed",
)


def _parse_value(text: str):
    # JSON covers numbers, booleans and lists; bare words stay strings
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def read_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        values[key.strip()] = _parse_value(value.strip())
    return values


def build_config(args) -> PipelineConfig:
    values = {}
    config_path = args.config or os.environ.get(CONFIG_ENV)
    if config_path:
        values.update(read_config_file(config_path))
    for key in _FLAG_KEYS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            values[key] = flag
    return config_from_mapping(values)


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    grp = parser.add_argument_group("pipeline options")
    grp.add_argument("--config", metavar="FILE",
                     help=f"flat key = value config file (default ${CONFIG_ENV})")
    grp.add_argument("--no-cam", action="store_const", const=True,
                     help="skip attention fusion, use plain grayscale")
    grp.add_argument("--k-steepness", type=float, metavar="K",
                     help="membership steepness (default 5)")
    grp.add_argument("--x0", metavar="median|mean|NUM",
                     help="membership midpoint rule (default median)")
    grp.add_argument("--median-kernel", type=int, choices=SWEEP_KERNELS,
                     help="median window size (default 5)")
    grp.add_argument("--no-median", action="store_const", const=True,
                     help="shorthand for --median-kernel 1")
    grp.add_argument("--binarize-threshold", type=float, metavar="T",
                     help="membership cut after median (default 0.7)")
    grp.add_argument("--morph-order", choices=("close", "open", "none"),
                     help="morphological pass order (default close)")
    grp.add_argument("--no-edit", action="store_const", const=True,
                     help="skip the region independence filter")
    grp.add_argument("--window", type=int, help="sweep window size (default 15)")
    grp.add_argument("--stride", type=int, help="sweep stride (default 5)")
    grp.add_argument("--k-displacement", type=int, metavar="K",
                     help="displacement category limit (default 3)")
    grp.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    grp.add_argument("--min-points", type=int,
                     help="window point count below which it is skipped (default 5)")
    grp.add_argument("--fisher-mode", choices=("point", "two-sided"),
                     help="Fisher p-value flavor (default point)")
    grp.add_argument("--tolerance", type=float,
                     help="metric match tolerance in pixels (default 2)")
    grp.add_argument("--noise-kind", choices=("gaussian", "salt-pepper"),
                     help="corrupt the input before detection")
    grp.add_argument("--noise-level", type=float,
                     help="sigma in 0-255 units (gaussian) or pixel fraction")
    grp.add_argument("--noise-seed", type=int)
    grp.add_argument("--seed", type=int)


def _add_report_flags(parser: argparse.ArgumentParser) -> None:
    grp = parser.add_argument_group("report options")
    grp.add_argument("--json", metavar="FILE", help="write the report as JSON")
    grp.add_argument("--csv", metavar="FILE", help="write per-row CSV")
    grp.add_argument("--no-figures", action="store_true",
                     help="skip figure rendering next to the report files")


def _add_corpus_source(parser: argparse.ArgumentParser) -> None:
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", metavar="DIR",
                     help="directory of images plus <name>_gt.pgm maps")
    src.add_argument("--bundled", action="store_true",
                     help="use the built-in synthetic corpus")


def _load_triples(args):
    return make_corpus() if args.bundled else load_corpus(args.corpus)


def _fmt(value, spec: str) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return format(value, spec)


def _print_table(rows, mean=None, label="name") -> None:
    print(f"{label:<16} {'mse':>10} {'psnr_db':>9} {'precision':>9} "
          f"{'recall':>8} {'f':>8}")
    shown = list(rows) + ([{**mean, "name": "mean"}] if mean else [])
    for row in shown:
        print(f"{str(row['name']):<16} {_fmt(row['mse'], '10.3f')} "
              f"{_fmt(row['psnr_db'], '9.3f')} {_fmt(row['precision'], '9.4f')} "
              f"{_fmt(row['recall'], '8.4f')} {_fmt(row['f'], '8.4f')}")


def _figure_target(args) -> Path | None:
    if args.no_figures:
        return None
    anchor = args.json or args.csv
    return Path(anchor).with_suffix(".png") if anchor else None


def _emit(args, payload, figure) -> None:
    """Write JSON/CSV and, unless disabled, a figure next to them."""
    if args.json:
        report.write_json(args.json, payload)
    if args.csv:
        report.write_csv(args.csv, payload["images"] if "images" in payload
                         else payload["rows"])
    target = _figure_target(args)
    if target is not None:
        figure(target)


def _dump_intermediate(directory, result) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    planes = {"fused": result.fused, "magnitude": result.field.mag,
              "membership": result.membership}
    for name, plane in planes.items():
        np.save(directory / f"{name}.npy", plane)  # exact, for replays
        save_raster(directory / f"{name}.pgm", np.clip(plane, 0.0, 1.0))
    save_raster(directory / "candidates.pgm", result.candidates)
    save_raster(directory / "edges.pgm", result.edges)


def _dump_decisions(path, decisions) -> None:
    lines = ["# x y width height npoints method p dependent kept"]
    for d in decisions:
        head = f"{d.origin[0]} {d.origin[1]} {d.size[0]} {d.size[1]} {d.npoints}"
        if d.result is None:
            lines.append(f"{head} - - - {int(d.kept)}")
        else:
            lines.append(f"{head} {d.result.method} {d.result.p:.9g} "
                         f"{int(d.result.dependent)} {int(d.kept)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_detect(args) -> int:
    cfg = build_config(args)
    img = load_raster(args.input)
    result = run_pipeline(img, cfg, want_decisions=args.dump_decisions is not None)
    save_raster(args.output, result.edges)
    if args.dump_intermediate:
        _dump_intermediate(args.dump_intermediate, result)
    if args.dump_decisions:
        _dump_decisions(args.dump_decisions, result.decisions)
    return 0


def _metric_row(name: str, metrics) -> dict:
    return {"name": name, "mse": metrics.mse, "psnr_db": metrics.psnr_db,
            "precision": metrics.precision, "recall": metrics.recall,
            "f": metrics.f_measure}


def cmd_eval(args) -> int:
    cfg = build_config(args)
    pred = load_edge_map(args.pred)
    gt = load_edge_map(args.gt)
    row = _metric_row(Path(args.pred).stem, f_measure(pred, gt, cfg.match_tolerance))
    payload = {"config": {"tolerance": cfg.match_tolerance},
               "images": [row],
               "mean": {k: v for k, v in row.items() if k != "name"}}
    _print_table(payload["images"])
    _emit(args, payload,
          lambda target: report.metrics_figure(payload, target, title="eval"))
    return 0


def cmd_bench(args) -> int:
    cfg = build_config(args)
    payload = bench(_load_triples(args), cfg, detector=args.detector,
                    baseline_threshold=args.baseline_threshold)
    _print_table(payload["images"], payload["mean"])
    title = f"bench ({args.detector})"
    _emit(args, payload,
          lambda target: report.metrics_figure(payload, target, title=title))
    return 0


def cmd_noise(args) -> int:
    cfg = build_config(args)
    triples = _load_triples(args)
    seed = args.noise_seed if args.noise_seed is not None else cfg.seed
    rows = []
    for level in args.levels:
        run_cfg = replace(cfg, noise=NoiseSpec(args.kind, level, seed))
        run = bench(triples, run_cfg, detector=args.detector,
                    baseline_threshold=args.baseline_threshold)
        rows.append({"name": f"level={level:g}", "level": level, **run["mean"]})
    payload = {"config": {**config_to_mapping(cfg), "noise-kind": args.kind,
                          "noise-seed": seed, "detector": args.detector},
               "rows": rows}
    _print_table(rows, label="level")
    series = {key: [row[key] for row in rows]
              for key in ("precision", "recall", "f")}
    _emit(args, payload,
          lambda target: report.curve_figure(
              target, args.levels, series,
              xlabel=f"{args.kind} level", title="noise robustness"))
    return 0


def cmd_sweep_median(args) -> int:
    cfg = build_config(args)
    img = load_raster(args.input)
    gt = load_edge_map(args.gt)
    rows = []
    for kernel in SWEEP_KERNELS:
        run_cfg = replace(cfg, refinement=replace(cfg.refinement,
                                                  median_kernel=kernel))
        edges = run_pipeline(img, run_cfg).edges
        row = _metric_row(f"kernel={kernel}",
                          f_measure(edges, gt, cfg.match_tolerance))
        rows.append({**row, "kernel": kernel})
    payload = {"config": config_to_mapping(cfg), "rows": rows}
    _print_table(rows, label="kernel")
    series = {"f": [row["f"] for row in rows],
              "psnr_db": [row["psnr_db"] for row in rows]}
    _emit(args, payload,
          lambda target: report.curve_figure(
              target, list(SWEEP_KERNELS), series,
              xlabel="median kernel", title="median kernel sweep"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statedge",
        description="Edge detection via attention-fused gradients and "
                    "region-wise independence filtering.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect edges in one image")
    p.add_argument("--input", required=True, metavar="IMAGE")
    p.add_argument("--output", required=True, metavar="MAP",
                   help="edge map destination (.pgm or .png)")
    p.add_argument("--dump-intermediate", metavar="DIR",
                   help="write per-stage planes (.npy exact plus .pgm preview)")
    p.add_argument("--dump-decisions", metavar="FILE",
                   help="write one line per sweep window")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="score a detected map against ground truth")
    p.add_argument("--pred", required=True, metavar="MAP")
    p.add_argument("--gt", required=True, metavar="MAP")
    _add_pipeline_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("noise", help="measure degradation across noise levels")
    _add_corpus_source(p)
    p.add_argument("--kind", required=True, choices=("gaussian", "salt-pepper"))
    p.add_argument("--levels", required=True, type=float, nargs="+",
                   metavar="LEVEL")
    p.add_argument("--detector", choices=("pipeline", "baseline"),
                   default="pipeline")
    p.add_argument("--baseline-threshold", type=float,
                   default=DEFAULT_BASELINE_THRESHOLD)
    _add_pipeline_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("bench", help="run a detector over a corpus")
    _add_corpus_source(p)
    p.add_argument("--detector", choices=("pipeline", "baseline"),
                   default="pipeline")
    p.add_argument("--baseline-threshold", type=float,
                   default=DEFAULT_BASELINE_THRESHOLD)
    _add_pipeline_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep-median",
                       help="score the pipeline at median kernels 1, 3, 5, 7")
    p.add_argument("--input", required=True, metavar="IMAGE")
    p.add_argument("--gt", required=True, metavar="MAP")
    _add_pipeline_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_sweep_median)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # argparse already exited 2 on usage errors
        print(f"statedge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
