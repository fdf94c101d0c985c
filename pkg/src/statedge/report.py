"""Report serialization and headless figure rendering.

JSON is the canonical report document; CSV mirrors the per-image rows.
Figures are drawn with the Agg backend so runs work without a display,
and land next to the report files they illustrate.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend pinned first)

ROW_FIELDS = ("name", "mse", "psnr_db", "precision", "recall", "f")


def jsonable(value):
    """Recursively replace the infinity sentinel with the string "inf"."""
    if isinstance(value, dict):
        return {key: jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(jsonable(payload), indent=2) + "\n", encoding="utf-8")
    return path


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def write_csv(path, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=ROW_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _cell(row.get(key)) for key in ROW_FIELDS})
    return path


def metrics_figure(report: dict, path, title: str = "per-image metrics") -> Path:
    """Grouped precision/recall/F bars, one group per image row."""
    rows = report["images"]
    names = [row["name"] for row in rows]
    xs = range(len(rows))
    fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(rows), 3.6))
    for offset, key in zip((-0.25, 0.0, 0.25), ("precision", "recall", "f")):
        vals = [row[key] if row[key] is not None else 0.0 for row in rows]
        ax.bar([x + offset for x in xs], vals, width=0.25, label=key)
    mean_f = report.get("mean", {}).get("f")
    if mean_f is not None:
        ax.axhline(mean_f, color="black", linestyle="--", linewidth=1,
                   label=f"mean F = {mean_f:.3f}")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def curve_figure(path, xs, series: dict, xlabel: str, title: str) -> Path:
    """One line per named series over a shared x axis."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, values in series.items():
        cleaned = [v if (v is not None and math.isfinite(v)) else float("nan")
                   for v in values]
        ax.plot(xs, cleaned, marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
