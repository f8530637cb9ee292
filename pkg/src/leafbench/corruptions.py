"""The 19 corruption transforms, severity-parameterized and seed-deterministic.

Every transform maps an (H, W, 3) float32 image in [0, 1] to another one of
the same shape.  Stochastic transforms consume draws from the caller's RNG
in a fixed, documented order, so (image, spec, seed) fully determines the
output; the kinds in :data:`DETERMINISTIC_KINDS` never touch the RNG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np

from . import codecs
from .image import (
    convolve2d,
    _correlate,
    make_gaussian_kernel,
    make_disc_kernel,
    make_motion_kernel,
    plasma_fractal,
    resize,
    rgb_to_hls,
    hls_to_rgb,
    validate_image,
)
from .severity import CORRUPTION_KINDS, SEVERITIES, SeverityTable

NOISE_KINDS = ("gaussian_noise", "shot_noise", "impulse_noise", "speckle_noise")
BLUR_KINDS = ("defocus_blur", "glass_blur", "motion_blur", "zoom_blur", "gaussian_blur")
WEATHER_KINDS = ("snow", "frost", "fog", "spatter")
PHOTOMETRIC_KINDS = ("brightness", "contrast", "saturate")
DIGITAL_KINDS = ("elastic", "pixelate", "jpeg")

# Kinds whose output is a pure function of (image, params): changing the
# seed must change nothing.
DETERMINISTIC_KINDS = frozenset({
    "gaussian_blur", "defocus_blur", "zoom_blur",
    "brightness", "contrast", "saturate", "pixelate", "jpeg",
})

_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class CorruptionSpec:
    """A fully resolved (kind, severity, parameters) triple."""

    kind: str
    severity: int
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in CORRUPTION_KINDS:
            raise ValueError(f"unknown corruption kind {self.kind!r}")
        if self.severity not in SEVERITIES:
            raise ValueError(f"severity must be in {SEVERITIES}, got {self.severity}")

    @classmethod
    def from_table(cls, table: SeverityTable, kind: str, severity: int) -> "CorruptionSpec":
        return cls(kind=kind, severity=severity, params=table.params(kind, severity))


def _finish(arr: np.ndarray) -> np.ndarray:
    return np.clip(arr, 0.0, 1.0).astype(np.float32)


# ---------------------------------------------------------------------------
# Noise family
# ---------------------------------------------------------------------------


def _gaussian_noise(img, params, rng):
    sigma = float(params["sigma"])
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return img.astype(np.float32)
    return _finish(img + rng.normal(0.0, sigma, img.shape))


def _shot_noise(img, params, rng):
    lam = float(params["photon_scale"])
    if lam <= 0:
        raise ValueError(f"photon_scale must be > 0, got {lam}")
    return _finish(rng.poisson(img.astype(np.float64) * lam) / lam)


def _impulse_noise(img, params, rng):
    p = float(params["flip_fraction"])
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip_fraction must be in [0, 1], got {p}")
    h, w = img.shape[:2]
    flip = rng.random((h, w)) < p
    salt = rng.random((h, w)) < 0.5
    out = img.astype(np.float32).copy()
    out[flip] = salt[flip].astype(np.float32)[:, None]
    return out


def _speckle_noise(img, params, rng):
    sigma = float(params["sigma"])
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return img.astype(np.float32)
    return _finish(img + img * rng.normal(0.0, sigma, img.shape))


# ---------------------------------------------------------------------------
# Blur family
# ---------------------------------------------------------------------------


def _gaussian_blur(img, params, rng):
    return convolve2d(img, make_gaussian_kernel(float(params["sigma"])))


def _defocus_blur(img, params, rng):
    return convolve2d(img, make_disc_kernel(float(params["radius"])))


def _motion_blur(img, params, rng):
    length = int(params["length"])
    if length < 1:
        raise ValueError(f"motion length must be >= 1, got {length}")
    lo = math.radians(float(params.get("angle_min_deg", -45.0)))
    hi = math.radians(float(params.get("angle_max_deg", 45.0)))
    angle = float(rng.uniform(lo, hi)) % (2.0 * math.pi)
    return convolve2d(img, make_motion_kernel(length, angle))


def zoom_ladder(zoom_max: float, zoom_step: float) -> np.ndarray:
    """Zoom factors 1, 1+step, ... strictly below zoom_max (end-exclusive)."""
    if zoom_step <= 0 or zoom_max <= 1.0:
        raise ValueError("zoom ladder needs zoom_max > 1 and zoom_step > 0")
    count = int(math.ceil((zoom_max - 1.0) / zoom_step - 1e-9))
    return 1.0 + zoom_step * np.arange(count)


def _center_zoom(img: np.ndarray, factor: float) -> np.ndarray:
    """Center-crop by 1/factor and scale back to the original size."""
    h, w = img.shape[:2]
    ch = max(1, int(math.ceil(h / factor)))
    cw = max(1, int(math.ceil(w / factor)))
    top = (h - ch) // 2
    left = (w - cw) // 2
    return resize(img[top:top + ch, left:left + cw], w, h, "bilinear")


def _zoom_blur(img, params, rng):
    factors = params.get("factors")
    if factors is None:
        factors = zoom_ladder(float(params["zoom_max"]), float(params["zoom_step"]))
    factors = np.asarray(factors, dtype=np.float64)
    if factors.size == 0:
        raise ValueError("zoom ladder must not be empty")
    acc = img.astype(np.float64).copy()
    for z in factors:
        acc += _center_zoom(img, float(z)).astype(np.float64)
    return _finish(acc / (factors.size + 1))


def _glass_blur(img, params, rng):
    sigma = float(params["sigma"])
    shift = int(params["max_shift"])
    iterations = int(params["iterations"])
    if shift < 1 or iterations < 1:
        raise ValueError("glass blur needs max_shift >= 1 and iterations >= 1")
    kernel = make_gaussian_kernel(sigma)
    x = convolve2d(img, kernel)
    h, w = x.shape[:2]
    if 2 * shift < min(h, w):
        # local pixel shuffle: swap each interior pixel with a uniformly
        # chosen neighbor, row-major from the bottom-right (fixed order)
        offs = rng.integers(-shift, shift + 1, size=(iterations, h - 2 * shift, w - 2 * shift, 2))
        for it in range(iterations):
            for i in range(h - shift - 1, shift - 1, -1):
                for j in range(w - shift - 1, shift - 1, -1):
                    dy, dx = offs[it, i - shift, j - shift]
                    y2, x2 = i + dy, j + dx
                    tmp = x[i, j].copy()
                    x[i, j] = x[y2, x2]
                    x[y2, x2] = tmp
    return convolve2d(x, kernel)


# ---------------------------------------------------------------------------
# Weather family
# ---------------------------------------------------------------------------


def _fog(img, params, rng):
    strength = float(params["haze_strength"])
    if strength < 0:
        raise ValueError(f"haze_strength must be >= 0, got {strength}")
    if strength == 0:
        return img.astype(np.float32)
    h, w = img.shape[:2]
    side = max(h, w)
    field = plasma_fractal(side, float(params["wibble_decay"]), rng)
    top = (side - h) // 2
    left = (side - w) // 2
    haze = 0.5 + 0.5 * field[top:top + h, left:left + w]
    weight = strength / (1.0 + strength)
    return _finish(img * (1.0 - weight) + weight * haze[..., None])


_frost_cache: list[np.ndarray] | None = None


def _frost_textures() -> list[np.ndarray]:
    """Bundled frost textures, decoded once and shared read-only."""
    global _frost_cache
    if _frost_cache is None:
        root = resources.files("leafbench").joinpath("assets/frost")
        paths = sorted(
            p for p in root.iterdir() if p.name.lower().endswith((".png", ".jpg", ".jpeg"))
        )
        if not paths:
            raise FileNotFoundError("no frost textures found under assets/frost")
        _frost_cache = [codecs.decode_image(p.read_bytes()) for p in paths]
    return _frost_cache


def _frost(img, params, rng):
    keep = float(params["keep"])
    strength = float(params["strength"])
    if not 0.0 <= keep <= 1.0 or strength < 0.0:
        raise ValueError("frost needs keep in [0, 1] and strength >= 0")
    textures = _frost_textures()
    h, w = img.shape[:2]
    tex = textures[int(rng.integers(0, len(textures)))]
    th, tw = tex.shape[:2]
    if th < h or tw < w:
        scale = max(h / th, w / tw)
        tex = resize(tex, int(math.ceil(tw * scale)), int(math.ceil(th * scale)), "bilinear")
        th, tw = tex.shape[:2]
    top = int(rng.integers(0, th - h + 1))
    left = int(rng.integers(0, tw - w + 1))
    crop = tex[top:top + h, left:left + w]
    if rng.random() < 0.5:
        crop = crop[:, ::-1]
    return _finish(keep * img + strength * crop)


def _snow(img, params, rng):
    h, w = img.shape[:2]
    layer = rng.normal(float(params["layer_mean"]), float(params["layer_std"]), (h, w))
    layer = _center_zoom(layer, float(params["layer_zoom"])).astype(np.float64)
    layer[layer < float(params["threshold"])] = 0.0
    layer = np.clip(layer, 0.0, 1.0)
    lo = math.radians(float(params["angle_min_deg"]))
    hi = math.radians(float(params["angle_max_deg"]))
    angle = float(rng.uniform(lo, hi)) % (2.0 * math.pi)
    layer = convolve2d(layer, make_motion_kernel(int(params["trail_length"]), angle))
    keep = float(params["blend_keep"])
    if not 0.0 <= keep <= 1.0:
        raise ValueError(f"blend_keep must be in [0, 1], got {keep}")
    luma = img @ _LUMA
    whitened = keep * img + (1.0 - keep) * np.maximum(img, (luma * 1.5 + 0.5)[..., None])
    flakes = layer[..., None]
    return _finish(whitened + flakes + np.rot90(flakes, 2))


def _spatter(img, params, rng):
    h, w = img.shape[:2]
    mode = params.get("mode", "water")
    strength = float(params["strength"])
    if strength < 0:
        raise ValueError(f"spatter strength must be >= 0, got {strength}")
    fld = rng.normal(float(params["loc"]), float(params["scale"]), (h, w))
    fld = _correlate(fld, make_gaussian_kernel(float(params["blur_sigma"])))
    threshold = float(params["threshold"])
    if mode == "water":
        m = np.where(fld > threshold, fld, 0.0)
        peak = m.max()
        if peak > 0:
            m = m / peak
        m = (m * strength)[..., None]
        color = np.array([175, 238, 238]) / 255.0  # pale turquoise droplets
        return _finish(img + m * color)
    if mode == "mud":
        mask = (fld > threshold).astype(np.float64)
        m = _correlate(mask, make_gaussian_kernel(strength))
        m[m < 0.8] = 0.0
        m = m[..., None]
        color = np.array([63, 42, 20]) / 255.0  # opaque mud
        return _finish(img * (1.0 - m) + m * color)
    raise ValueError(f"unknown spatter mode {mode!r}")


# ---------------------------------------------------------------------------
# Photometric family
# ---------------------------------------------------------------------------


def _brightness(img, params, rng):
    hls = rgb_to_hls(img).astype(np.float64)
    hls[..., 1] = np.clip(hls[..., 1] + float(params["offset"]), 0.0, 1.0)
    return hls_to_rgb(hls)


def _contrast(img, params, rng):
    c = float(params["factor"])
    if c <= 0:
        raise ValueError(f"contrast factor must be > 0, got {c}")
    mu = img.mean(axis=(0, 1), keepdims=True)
    return _finish((img - mu) * c + mu)


def _saturate(img, params, rng):
    factor = float(params["factor"])
    offset = float(params.get("offset", 0.0))
    if factor < 0:
        raise ValueError(f"saturation factor must be >= 0, got {factor}")
    hls = rgb_to_hls(img).astype(np.float64)
    hls[..., 2] = np.clip(hls[..., 2] * factor + offset, 0.0, 1.0)
    return hls_to_rgb(hls)


# ---------------------------------------------------------------------------
# Digital family
# ---------------------------------------------------------------------------


def _pixelate(img, params, rng):
    frac = float(params["shrink_fraction"])
    if not 0.0 < frac <= 1.0:
        raise ValueError(f"shrink_fraction must be in (0, 1], got {frac}")
    h, w = img.shape[:2]
    small = resize(img, max(1, round(w * frac)), max(1, round(h * frac)), "box")
    return resize(small, w, h, "nearest")


def _jpeg(img, params, rng):
    return codecs.jpeg_roundtrip(img, int(params["quality"]))


def _solve_affine(src_pts: np.ndarray, dst_pts: np.ndarray) -> np.ndarray:
    """2x3 matrix A with A @ [x, y, 1] mapping src points onto dst points."""
    p = np.hstack([src_pts, np.ones((3, 1))])
    return np.linalg.solve(p, dst_pts).T


def _bilinear_sample(img: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample (H, W, C) at float coords with edge replication."""
    h, w = img.shape[:2]
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    ty = (ys - y0)[..., None]
    tx = (xs - x0)[..., None]
    top = img[y0, x0] * (1.0 - tx) + img[y0, x1] * tx
    bot = img[y1, x0] * (1.0 - tx) + img[y1, x1] * tx
    return top * (1.0 - ty) + bot * ty


def _elastic(img, params, rng):
    h, w = img.shape[:2]
    m = min(h, w)
    amplitude = float(params["amplitude_frac"]) * m
    smooth_sigma = float(params["smooth_frac"]) * m
    jitter = float(params["affine_frac"]) * m
    if amplitude < 0 or jitter < 0:
        raise ValueError("elastic needs non-negative amplitude and jitter")
    x = img.astype(np.float64)

    # small random affine first (corner jitter of a centered triangle)
    cy, cx = h / 2.0, w / 2.0
    q = m / 3.0
    pts1 = np.array([[cx + q, cy + q], [cx + q, cy - q], [cx - q, cy - q]])
    pts2 = pts1 + rng.uniform(-jitter, jitter, pts1.shape)
    grid_y, grid_x = np.meshgrid(np.arange(h, dtype=np.float64),
                                 np.arange(w, dtype=np.float64), indexing="ij")
    if jitter > 0:
        affine = _solve_affine(pts2, pts1)  # output coords -> source coords
        src_x = affine[0, 0] * grid_x + affine[0, 1] * grid_y + affine[0, 2]
        src_y = affine[1, 0] * grid_x + affine[1, 1] * grid_y + affine[1, 2]
        x = _bilinear_sample(x, src_y, src_x)

    # gaussian-smoothed random displacement field
    dx = rng.uniform(-1.0, 1.0, (h, w))
    dy = rng.uniform(-1.0, 1.0, (h, w))
    if amplitude > 0:
        if smooth_sigma > 0:
            kernel = make_gaussian_kernel(smooth_sigma)
            dx = _correlate(dx, kernel)
            dy = _correlate(dy, kernel)
        x = _bilinear_sample(x, grid_y + dy * amplitude, grid_x + dx * amplitude)
    return _finish(x)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

_APPLIERS = {
    "gaussian_noise": _gaussian_noise,
    "shot_noise": _shot_noise,
    "impulse_noise": _impulse_noise,
    "speckle_noise": _speckle_noise,
    "defocus_blur": _defocus_blur,
    "glass_blur": _glass_blur,
    "motion_blur": _motion_blur,
    "zoom_blur": _zoom_blur,
    "gaussian_blur": _gaussian_blur,
    "snow": _snow,
    "frost": _frost,
    "fog": _fog,
    "brightness": _brightness,
    "spatter": _spatter,
    "contrast": _contrast,
    "elastic": _elastic,
    "jpeg": _jpeg,
    "pixelate": _pixelate,
    "saturate": _saturate,
}

assert set(_APPLIERS) == set(CORRUPTION_KINDS)


def apply_corruption(img: np.ndarray, spec: CorruptionSpec,
                     rng: np.random.Generator | None = None) -> np.ndarray:
    """Apply one corruption; shape is preserved and output stays in [0, 1]."""
    validate_image(img)
    if spec.kind not in DETERMINISTIC_KINDS and rng is None:
        raise ValueError(f"{spec.kind} is stochastic and needs an RNG")
    return _APPLIERS[spec.kind](np.asarray(img, dtype=np.float32), spec.params, rng)


def _family_apply(kinds: tuple[str, ...], label: str, img, kind, params, rng=None):
    if kind not in kinds:
        raise ValueError(f"{kind!r} is not a {label} corruption (expected one of {kinds})")
    validate_image(img)
    return _APPLIERS[kind](np.asarray(img, dtype=np.float32), params, rng)


def apply_noise(img, kind, params, rng):
    return _family_apply(NOISE_KINDS, "noise", img, kind, params, rng)


def apply_blur(img, kind, params, rng=None):
    return _family_apply(BLUR_KINDS, "blur", img, kind, params, rng)


def apply_weather(img, kind, params, rng):
    return _family_apply(WEATHER_KINDS, "weather", img, kind, params, rng)


def apply_photometric(img, kind, params):
    return _family_apply(PHOTOMETRIC_KINDS, "photometric", img, kind, params, None)


def apply_digital(img, kind, params, rng=None):
    return _family_apply(DIGITAL_KINDS, "digital", img, kind, params, rng)
