"""Bundled synthetic mini-corpus with exact contour ground truth.

Five 128x128 scenes, each an analytic shape on a softly graded
background.  Ground truth is the one-pixel boundary of the shape mask,
known exactly by construction.  Scene contours are deliberately sloped
or curved: the displacement test downstream treats perfectly
axis-aligned runs as statistically uninformative, so flat segments
would measure the fixture, not the detector.

Every image carries deterministic corruption: mild Gaussian noise, a
sprinkle of salt-and-pepper, and eight small dense "static" dots placed
well away from the contours and from each other.  The dots are exactly
the clutter the region filter exists to remove: they survive median
filtering as compact blobs, but alone in a sweep window their
displacements carry no dependence, whereas anything nearer other
structure would read as dependent and be kept.  Images are quantized to
the 8-bit grid before use so the in-memory corpus equals the files
written by write_corpus byte for byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .core import correlate2d, make_rng, quantize, save_raster, load_raster, load_edge_map
from .noise import NoiseSpec, add_noise

SIZE = 128
DOT_SIZE = 6
DOT_DENSITY = 0.65
BASE_SEED = 20240


def _boundary(mask: np.ndarray) -> np.ndarray:
    """Mask pixels with at least one 4-neighbor outside the mask."""
    m = np.asarray(mask, dtype=bool)
    padded = np.pad(m, 1, mode="constant", constant_values=False)
    interior = (padded[:-2, 1:-1] & padded[2:, 1:-1]
                & padded[1:-1, :-2] & padded[1:-1, 2:] & m)
    return m & ~interior


def _grid():
    yy, xx = np.mgrid[0:SIZE, 0:SIZE].astype(np.float64)
    return xx, yy


def _mask_diamond():
    xx, yy = _grid()
    return np.abs(xx - 64) + np.abs(yy - 64) <= 36


def _mask_tilted_square():
    xx, yy = _grid()
    c, s = np.cos(np.pi / 6), np.sin(np.pi / 6)
    u = c * (xx - 62) + s * (yy - 66)
    v = -s * (xx - 62) + c * (yy - 66)
    return np.maximum(np.abs(u), np.abs(v)) <= 28


def _mask_cross():
    xx, yy = _grid()
    return (np.abs(xx - yy) <= 6) | (np.abs(xx + yy - 127) <= 6)


def _mask_wave():
    xx, yy = _grid()
    return np.abs(yy - (64 + 16 * np.sin(2 * np.pi * xx / 44.0))) <= 6


def _mask_ring():
    xx, yy = _grid()
    r = np.abs(xx - 64) + np.abs(yy - 64)
    return (r >= 20) & (r <= 34)


# name -> (mask builder, foreground color, clutter-dot origins (y, x));
# dots sit >= 18 px from every contour and >= 26 px apart so no sweep
# window ever sees a dot together with other structure
_SCENES = {
    "diamond": (_mask_diamond, (0.66, 0.62, 0.68),
                ((4, 25), (4, 50), (16, 89), (31, 18), (43, 114),
                 (103, 16), (115, 41), (115, 108))),
    "tilted_square": (_mask_tilted_square, (0.72, 0.16, 0.70),
                      ((4, 32), (8, 111), (9, 78), (28, 7), (66, 60),
                       (94, 7), (97, 112), (108, 27))),
    "cross": (_mask_cross, (0.68, 0.65, 0.62),
              ((4, 77), (12, 54), (45, 114), (53, 5), (71, 113),
               (77, 4), (108, 53), (115, 76))),
    "wave": (_mask_wave, (0.74, 0.16, 0.72),
             ((4, 32), (4, 87), (6, 62), (11, 110), (24, 7),
              (103, 61), (106, 107), (108, 24))),
    "ring": (_mask_ring, (0.69, 0.63, 0.65),
             ((5, 112), (6, 42), (12, 6), (35, 109), (38, 7),
              (92, 12), (101, 111), (115, 50))),
}

_BOX3 = np.full((3, 3), 1.0 / 9.0)


def _render(mask: np.ndarray, fg: tuple, seed: int, dots) -> np.ndarray:
    ramp = np.linspace(0.0, 0.12, SIZE)[:, None]
    img = np.empty((SIZE, SIZE, 3), dtype=np.float64)
    for ci, (bg_lo, fg_val) in enumerate(zip((0.18, 0.22, 0.16), fg)):
        plane = np.where(mask, fg_val, bg_lo + ramp)
        # two box passes soften the step into a ~4 px ramp, wide enough to
        # survive the default 5x5 median downstream
        plane = correlate2d(correlate2d(plane, _BOX3), _BOX3)
        img[:, :, ci] = plane
    img = add_noise(img, NoiseSpec("gaussian", 3.0, seed))
    img = add_noise(img, NoiseSpec("salt-pepper", 0.01, seed + 1))
    rng = make_rng(seed + 2)
    for py, px in dots:
        hits = rng.random((DOT_SIZE, DOT_SIZE)) < DOT_DENSITY
        vals = rng.integers(0, 2, size=(DOT_SIZE, DOT_SIZE)).astype(np.float64)
        block = img[py:py + DOT_SIZE, px:px + DOT_SIZE]
        block[hits] = vals[hits, None]
    # snap to the 8-bit grid so files and in-memory corpus agree exactly
    return quantize(img).astype(np.float64) / 255.0


def make_corpus() -> list[tuple[str, np.ndarray, np.ndarray]]:
    """The five (name, image, gt) triples, deterministic."""
    out = []
    for index, (name, (build, fg, dots)) in enumerate(_SCENES.items()):
        mask = build()
        img = _render(mask, fg, BASE_SEED + 10 * index, dots)
        out.append((name, img, _boundary(mask)))
    return out


def write_corpus(directory) -> list[Path]:
    """Write the corpus as PPM images plus *_gt.pgm edge maps."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, img, gt in make_corpus():
        img_path = directory / f"{name}.ppm"
        gt_path = directory / f"{name}_gt.pgm"
        save_raster(img_path, img)
        save_raster(gt_path, gt)
        written.extend([img_path, gt_path])
    return written


def load_corpus(directory) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Load (name, image, gt) triples from a directory.

    Images are every .ppm/.pgm/.png not ending in _gt; ground truth is
    looked up as <stem>_gt.pgm and may be absent (gt entry None).
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"no such corpus directory: {directory}")
    triples = []
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() not in (".ppm", ".pgm", ".png"):
            continue
        if path.stem.endswith("_gt"):
            continue
        gt_path = directory / f"{path.stem}_gt.pgm"
        gt = load_edge_map(gt_path) if gt_path.exists() else None
        triples.append((path.stem, load_raster(path), gt))
    if not triples:
        raise ValueError(f"no images found in {directory}")
    return triples


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "corpus"
    for p in write_corpus(target):
        print(p)
