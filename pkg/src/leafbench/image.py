"""Deterministic numeric kernels shared by every corruption.

Images are numpy ``float32`` arrays of shape ``(H, W, 3)`` with values in
``[0, 1]``, row-major and channel-interleaved.  Single-channel ``(H, W)``
fields are accepted wherever it makes sense (convolution, resizing).

All operations are pure: inputs are never mutated, and identical inputs
(plus the RNG seed, where one is consumed) produce identical outputs on
every platform regardless of worker count.  Heavy arithmetic runs in
float64 internally; image payloads are returned as float32.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

CHANNELS = 3

_SEED_MASK = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Build the toolkit's fixed, portable generator (Philox, keyed).

    Philox is counter-based: a given 64-bit key yields the same stream on
    every platform and under any degree of parallelism.
    """
    return np.random.Generator(np.random.Philox(key=int(seed) & _SEED_MASK))


def validate_image(img: np.ndarray, *, name: str = "image") -> np.ndarray:
    """Check the (H, W, 3) float-in-[0,1] contract, returning the array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != CHANNELS:
        raise ValueError(f"{name} must have shape (H, W, {CHANNELS}), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1, got {arr.shape}")
    if not np.issubdtype(arr.dtype, np.floating):
        raise ValueError(f"{name} must be floating point, got dtype {arr.dtype}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or Inf")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} has values outside [0, 1]")
    return arr


def _finish(arr: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and hand back float32."""
    return np.clip(arr, 0.0, 1.0).astype(np.float32)


# ---------------------------------------------------------------------------
# Convolution kernels
# ---------------------------------------------------------------------------


def make_gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled 2-D Gaussian, truncated at 3 sigma, normalized to sum 1."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    half = max(1, int(math.ceil(3.0 * sigma)))
    ax = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(ax**2) / (2.0 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()


def make_disc_kernel(radius: float) -> np.ndarray:
    """Uniform disc (defocus) kernel.

    Hard indicator for radius < 8; above that an anti-aliased rim keeps
    large discs rotationally smooth.
    """
    if radius < 1:
        raise ValueError(f"disc radius must be >= 1, got {radius}")
    half = int(math.ceil(radius))
    ax = np.arange(-half, half + 1, dtype=np.float64)
    dist = np.hypot(ax[:, None], ax[None, :])
    if radius < 8:
        k = (dist <= radius).astype(np.float64)
    else:
        k = np.clip(radius + 0.5 - dist, 0.0, 1.0)
    return k / k.sum()


def make_motion_kernel(length: int, angle: float) -> np.ndarray:
    """1-pixel-wide line of `length` taps through the center at `angle`.

    Angle is in radians, measured counter-clockwise from the +x axis;
    duplicate rasterized taps collapse, weights are uniform over the taps.
    """
    if length < 1:
        raise ValueError(f"motion length must be >= 1, got {length}")
    if not 0.0 <= angle < 2.0 * math.pi:
        raise ValueError(f"angle must be in [0, 2*pi), got {angle}")
    half = (length - 1) / 2.0
    ts = np.linspace(-half, half, int(length))
    cols = np.round(ts * math.cos(angle)).astype(int)
    rows = np.round(-ts * math.sin(angle)).astype(int)  # +y is down in rasters
    size = 2 * int(max(1, np.abs(rows).max(), np.abs(cols).max())) + 1
    c = size // 2
    k = np.zeros((size, size), dtype=np.float64)
    k[rows + c, cols + c] = 1.0  # duplicates collapse to a single tap
    return k / k.sum()


def make_kernel(kind: str, *, sigma: float | None = None, radius: float | None = None,
                length: int | None = None, angle: float = 0.0) -> np.ndarray:
    """Dispatch to the gaussian / disc / motion-line kernel builders."""
    if kind == "gaussian":
        if sigma is None:
            raise ValueError("gaussian kernel needs sigma")
        return make_gaussian_kernel(sigma)
    if kind == "disc":
        if radius is None:
            raise ValueError("disc kernel needs radius")
        return make_disc_kernel(radius)
    if kind == "motion_line":
        if length is None:
            raise ValueError("motion_line kernel needs length")
        return make_motion_kernel(length, angle)
    raise ValueError(f"unknown kernel kind {kind!r}")


def _correlate(field: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Unclamped 2-D correlation with edge replication, float64 accumulation."""
    return ndimage.correlate(field.astype(np.float64), kernel, mode="nearest")


def convolve2d(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Apply an odd, square 2-D kernel with edge replication.

    Works on (H, W, 3) images and (H, W) fields; output is clamped to
    [0, 1] and returned as float32.
    """
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError(f"kernel must be square 2-D, got shape {k.shape}")
    if k.shape[0] % 2 == 0:
        raise ValueError(f"kernel size must be odd, got {k.shape[0]}")
    arr = np.asarray(img)
    if arr.ndim == 2:
        return _finish(_correlate(arr, k))
    if arr.ndim == 3:
        out = np.empty(arr.shape, dtype=np.float64)
        for c in range(arr.shape[2]):
            out[:, :, c] = _correlate(arr[:, :, c], k)
        return _finish(out)
    raise ValueError(f"expected 2-D or 3-D array, got {arr.ndim}-D")


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------

RESIZE_FILTERS = ("nearest", "bilinear", "box")


def _nearest_axis(arr: np.ndarray, out_n: int) -> np.ndarray:
    in_n = arr.shape[0]
    idx = np.minimum(((np.arange(out_n) + 0.5) * (in_n / out_n)).astype(int), in_n - 1)
    return arr[idx]


def _bilinear_axis(arr: np.ndarray, out_n: int) -> np.ndarray:
    in_n = arr.shape[0]
    pos = np.clip((np.arange(out_n) + 0.5) * (in_n / out_n) - 0.5, 0.0, in_n - 1.0)
    i0 = np.floor(pos).astype(int)
    i1 = np.minimum(i0 + 1, in_n - 1)
    t = (pos - i0).reshape((-1,) + (1,) * (arr.ndim - 1))
    return arr[i0] * (1.0 - t) + arr[i1] * t


def _box_axis(arr: np.ndarray, out_n: int) -> np.ndarray:
    in_n = arr.shape[0]
    scale = in_n / out_n
    out = np.empty((out_n,) + arr.shape[1:], dtype=np.float64)
    for i in range(out_n):
        lo = i * scale
        hi = min((i + 1) * scale, float(in_n))
        c0 = int(math.floor(lo))
        c1 = max(c0 + 1, int(math.ceil(hi)))
        w = np.ones(c1 - c0, dtype=np.float64)
        w[0] -= lo - c0
        w[-1] -= c1 - hi
        out[i] = np.tensordot(w, arr[c0:c1], axes=(0, 0)) / w.sum()
    return out


_AXIS_RESAMPLERS = {"nearest": _nearest_axis, "bilinear": _bilinear_axis, "box": _box_axis}


def resize(img: np.ndarray, new_w: int, new_h: int, filter: str = "bilinear") -> np.ndarray:
    """Resample to exactly (new_h, new_w) with the named filter.

    `box` is area averaging (exact block means on integer downscales),
    `bilinear` uses half-pixel-center mapping and is an identity at the
    original size, `nearest` picks the covering source pixel.
    """
    if new_w < 1 or new_h < 1:
        raise ValueError(f"target dimensions must be >= 1, got {new_w}x{new_h}")
    if filter not in _AXIS_RESAMPLERS:
        raise ValueError(f"unknown filter {filter!r}; pick one of {RESIZE_FILTERS}")
    resample = _AXIS_RESAMPLERS[filter]
    arr = np.asarray(img, dtype=np.float64)
    if arr.shape[0] != new_h:
        arr = resample(arr, new_h)
    if arr.shape[1] != new_w:
        arr = np.swapaxes(resample(np.swapaxes(arr, 0, 1), new_w), 0, 1)
    return _finish(arr)


# ---------------------------------------------------------------------------
# Color space
# ---------------------------------------------------------------------------


def rgb_to_hls(img: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HLS (hue, lightness, saturation), all in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    maxc = np.max(arr, axis=-1)
    minc = np.min(arr, axis=-1)
    l = (minc + maxc) / 2.0
    delta = maxc - minc
    gray = delta == 0.0
    sat_den = np.where(l <= 0.5, maxc + minc, 2.0 - maxc - minc)
    s = np.where(gray, 0.0, delta / np.where(sat_den == 0.0, 1.0, sat_den))
    safe_delta = np.where(gray, 1.0, delta)
    rc = (maxc - r) / safe_delta
    gc = (maxc - g) / safe_delta
    bc = (maxc - b) / safe_delta
    h = np.select(
        [gray, maxc == r, maxc == g],
        [0.0, bc - gc, 2.0 + rc - bc],
        default=4.0 + gc - rc,
    )
    h = (h / 6.0) % 1.0
    return np.stack([h, l, s], axis=-1).astype(np.float32)


def _hue_ramp(m1: np.ndarray, m2: np.ndarray, h: np.ndarray) -> np.ndarray:
    h = h % 1.0
    return np.select(
        [h < 1.0 / 6.0, h < 0.5, h < 2.0 / 3.0],
        [m1 + (m2 - m1) * h * 6.0, m2, m1 + (m2 - m1) * (2.0 / 3.0 - h) * 6.0],
        default=m1,
    )


def hls_to_rgb(img: np.ndarray) -> np.ndarray:
    """Inverse of :func:`rgb_to_hls`; round-trips within 1e-6 per channel."""
    arr = np.asarray(img, dtype=np.float64)
    h, l, s = arr[..., 0], arr[..., 1], arr[..., 2]
    m2 = np.where(l <= 0.5, l * (1.0 + s), l + s - l * s)
    m1 = 2.0 * l - m2
    r = _hue_ramp(m1, m2, h + 1.0 / 3.0)
    g = _hue_ramp(m1, m2, h)
    b = _hue_ramp(m1, m2, h - 1.0 / 3.0)
    return _finish(np.stack([r, g, b], axis=-1))


# ---------------------------------------------------------------------------
# Plasma fractal (diamond-square)
# ---------------------------------------------------------------------------


def plasma_fractal(size: int, wibble_decay: float, rng: np.random.Generator) -> np.ndarray:
    """Diamond-square noise field, min-max normalized to [0, 1].

    Generated on the next power-of-two-plus-one grid covering `size` and
    center-cropped.  The perturbation amplitude shrinks by `wibble_decay`
    at each subdivision level, so larger decays give smoother fields.
    """
    if size < 2:
        raise ValueError(f"plasma size must be >= 2, got {size}")
    if wibble_decay <= 1.0:
        raise ValueError(f"wibble_decay must be > 1, got {wibble_decay}")
    n = 1
    while n + 1 < size:
        n *= 2
    side = n + 1
    grid = np.zeros((side, side), dtype=np.float64)
    wibble = 1.0
    corners = rng.uniform(-1.0, 1.0, 4) * wibble
    grid[0, 0], grid[0, -1], grid[-1, 0], grid[-1, -1] = corners

    step = n
    while step >= 2:
        half = step // 2
        wibble /= wibble_decay
        # diamond step: square centers from their four corners
        tl = grid[0:-1:step, 0:-1:step]
        tr = grid[0:-1:step, step::step]
        bl = grid[step::step, 0:-1:step]
        br = grid[step::step, step::step]
        grid[half::step, half::step] = (
            (tl + tr + bl + br) / 4.0 + rng.uniform(-1.0, 1.0, tl.shape) * wibble
        )
        # square step: edge midpoints from the diamond neighbors they touch
        padded = np.full((side + 2 * half, side + 2 * half), np.nan)
        padded[half:-half, half:-half] = grid
        for rows, cols in (
            (np.arange(0, side, step), np.arange(half, side, step)),
            (np.arange(half, side, step), np.arange(0, side, step)),
        ):
            pr = rows[:, None] + half
            pc = cols[None, :] + half
            neighbors = np.stack([
                padded[pr - half, pc],
                padded[pr + half, pc],
                padded[pr, pc - half],
                padded[pr, pc + half],
            ])
            mean = np.nanmean(neighbors, axis=0)
            grid[rows[:, None], cols[None, :]] = (
                mean + rng.uniform(-1.0, 1.0, mean.shape) * wibble
            )
        step = half

    lo, hi = grid.min(), grid.max()
    if hi > lo:
        grid = (grid - lo) / (hi - lo)
    else:
        grid = np.zeros_like(grid)
    off = (side - size) // 2
    return grid[off:off + size, off:off + size].astype(np.float32)


# ---------------------------------------------------------------------------
# Quantization
# ---------------------------------------------------------------------------


def quantize(img: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] then round half-up to the 256 8-bit levels."""
    arr = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    return np.floor(arr * 255.0 + 0.5).astype(np.uint8)


def dequantize(raster: np.ndarray) -> np.ndarray:
    """8-bit raster back to float32 intensities in [0, 1]."""
    arr = np.asarray(raster)
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 raster, got dtype {arr.dtype}")
    return (arr.astype(np.float64) / 255.0).astype(np.float32)
