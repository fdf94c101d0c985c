"""Image values, raster I/O, and the shared numeric plumbing.

Images are held as float64 arrays on a [0, 1] working scale: a single
plane has shape (H, W), a multi-channel image has shape (H, W, C), and a
binary edge map is a (H, W) bool array.  The PGM (P5) and PPM (P6)
codecs live here and are bit exact round trips; PNG is available only
when the optional Pillow dependency is installed.

Also here because every other module needs them: replicate-padded
correlation, the numerically safe logistic, and the seeded generator
used for all randomness in the package.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def make_rng(seed: int) -> np.random.Generator:
    """One seeded PCG64 generator per consumer; there is no global RNG."""
    return np.random.default_rng(seed)


def logistic(t: np.ndarray | float) -> np.ndarray:
    """1 / (1 + exp(-t)) evaluated on the non-overflowing branch.

    Splitting on the sign keeps exp() arguments nonpositive, so
    logistic(t) + logistic(-t) lands within one ulp of 1 even for huge t.
    """
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    et = np.exp(t[~pos])
    out[~pos] = et / (1.0 + et)
    return out


def correlate2d(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Correlation (no kernel flip) with replicate padding, dims preserved.

    The anchor is ((kh-1)//2, (kw-1)//2), so even kernels extend right and
    down.  Terms accumulate in kernel row-major order, which keeps the
    result bit-identical to a plain per-pixel loop over the same order.
    """
    plane = np.asarray(plane, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if plane.ndim != 2 or kernel.ndim != 2:
        raise ValueError("correlate2d expects a 2-D plane and a 2-D kernel")
    kh, kw = kernel.shape
    oy, ox = (kh - 1) // 2, (kw - 1) // 2
    padded = np.pad(plane, ((oy, kh - 1 - oy), (ox, kw - 1 - ox)), mode="edge")
    h, w = plane.shape
    out = np.zeros((h, w), dtype=np.float64)
    for u in range(kh):
        for v in range(kw):
            out += kernel[u, v] * padded[u:u + h, v:v + w]
    return out


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Collapse a 1- or 3-channel image to a single luminance plane."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr.copy()
    if arr.ndim == 3 and arr.shape[2] == 1:
        return arr[:, :, 0].copy()
    if arr.ndim == 3 and arr.shape[2] == 3:
        r, g, b = GRAY_WEIGHTS
        return r * arr[:, :, 0] + g * arr[:, :, 1] + b * arr[:, :, 2]
    raise ValueError(f"unsupported channel count: shape {arr.shape}")


def quantize(plane: np.ndarray) -> np.ndarray:
    """[0, 1] floats to uint8 with round-half-up (np.round would round
    half-to-even and break the save/load identity)."""
    arr = np.clip(np.asarray(plane, dtype=np.float64), 0.0, 1.0)
    return np.floor(arr * 255.0 + 0.5).astype(np.uint8)


# ---------------------------------------------------------------------------
# PNM codecs.  Header grammar: magic, then whitespace/comment separated
# decimal tokens for width, height, maxval, then exactly one whitespace
# byte before the raster data.

def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(buf):
        c = buf[pos]
        if c in b" \t\r\n":
            pos += 1
        elif c in b"#":
            nl = buf.find(b"\n", pos)
            if nl < 0:
                raise ValueError("malformed header: unterminated comment")
            pos = nl + 1
        else:
            break
    if pos >= len(buf):
        raise ValueError("malformed header: truncated")
    end = pos
    while end < len(buf) and buf[end] not in b" \t\r\n":
        end += 1
    return buf[pos:end], end


def _next_int(buf: bytes, pos: int) -> tuple[int, int]:
    token, pos = _next_token(buf, pos)
    try:
        return int(token), pos
    except ValueError as exc:
        raise ValueError(f"malformed header: expected integer, got {token!r}") from exc


def load_raster(path) -> np.ndarray:
    """Load an image as float64 in [0, 1].

    PGM (P5) gives shape (H, W); PPM (P6) gives (H, W, 3).  8-bit samples
    map to value/255.  PNG goes through Pillow when that extra is
    installed.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such image: {p}")
    if p.suffix.lower() == ".png":
        return _load_png(p)
    buf = p.read_bytes()
    magic, pos = _next_token(buf, 0)
    if magic not in (b"P5", b"P6"):
        raise ValueError(f"malformed header: unknown magic {magic!r}")
    width, pos = _next_int(buf, pos)
    height, pos = _next_int(buf, pos)
    maxval, pos = _next_int(buf, pos)
    if width < 1 or height < 1:
        raise ValueError("malformed header: nonpositive dimensions")
    if maxval != 255:
        raise ValueError(f"unsupported bit depth: maxval {maxval}")
    if pos >= len(buf) or buf[pos] not in b" \t\r\n":
        raise ValueError("malformed header: missing sample separator")
    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    data = buf[pos + 1:pos + 1 + expected]
    if len(data) < expected:
        raise ValueError("truncated raster data")
    arr = np.frombuffer(data, dtype=np.uint8).astype(np.float64) / 255.0
    if channels == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, 3)


def save_raster(path, img: np.ndarray) -> None:
    """Save a plane, an RGB image, or a bool edge map.

    Floats are quantized with round-half-up so save(load(x)) == x byte
    for byte; bool maps become 0/255 PGM.
    """
    p = Path(path)
    arr = np.asarray(img)
    if arr.dtype == bool:
        samples = np.where(arr, np.uint8(255), np.uint8(0))
    else:
        samples = quantize(arr)
    if samples.ndim == 3 and samples.shape[2] == 1:
        samples = samples[:, :, 0]
    if p.suffix.lower() == ".png":
        _save_png(p, samples)
        return
    if samples.ndim == 2:
        magic = b"P5"
    elif samples.ndim == 3 and samples.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"unsupported image shape: {samples.shape}")
    h, w = samples.shape[:2]
    header = magic + f"\n{w} {h}\n255\n".encode("ascii")
    p.write_bytes(header + samples.tobytes())


def load_edge_map(path) -> np.ndarray:
    """Load a saved 0/255 edge map back into a bool array."""
    plane = load_raster(path)
    if plane.ndim != 2:
        raise ValueError("edge maps must be single channel")
    return plane >= 0.5


def _require_pillow():
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on extras
        raise RuntimeError(
            "PNG support needs the optional Pillow dependency "
            "(install the 'png' extra)") from exc
    return Image


def _load_png(p: Path) -> np.ndarray:
    Image = _require_pillow()
    with Image.open(p) as im:
        if im.mode == "L":
            return np.asarray(im, dtype=np.float64) / 255.0
        return np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0


def _save_png(p: Path, samples: np.ndarray) -> None:
    Image = _require_pillow()
    mode = "L" if samples.ndim == 2 else "RGB"
    Image.fromarray(samples, mode=mode).save(p)
