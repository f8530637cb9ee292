"""Synthetic leaf-style images for demos, probes, and toy datasets.

Real benchmark runs corrupt a user-supplied photo dataset; these
generators exist so the pipeline can be exercised end-to-end (and
golden-tested) without shipping photographs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import codecs
from .image import make_rng


def probe_image(seed: int, size: int = 64) -> np.ndarray:
    """One deterministic leaf-like image: gradient backdrop, elliptic
    leaf blob, vein texture, and a few dark lesion spots."""
    rng = make_rng(seed)
    h = w = int(size)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    u, v = xx / (w - 1), yy / (h - 1)

    bg_a = rng.uniform(0.25, 0.75, 3)
    bg_b = rng.uniform(0.25, 0.75, 3)
    t = (u * rng.uniform(0.3, 1.0) + v * rng.uniform(0.3, 1.0))[..., None]
    img = bg_a + (bg_b - bg_a) * t / max(t.max(), 1e-9)

    # rotated ellipse, soft edged
    cy, cx = rng.uniform(0.35, 0.65, 2)
    ay, ax = rng.uniform(0.18, 0.38, 2)
    theta = rng.uniform(0.0, np.pi)
    dy, dx = v - cy, u - cx
    ry = dy * np.cos(theta) - dx * np.sin(theta)
    rx = dy * np.sin(theta) + dx * np.cos(theta)
    q = (ry / ay) ** 2 + (rx / ax) ** 2
    mask = np.clip(1.5 * (1.0 - q), 0.0, 1.0)[..., None]

    leaf = np.array([rng.uniform(0.05, 0.3), rng.uniform(0.4, 0.8), rng.uniform(0.05, 0.3)])
    veins = 0.06 * np.sin(rng.uniform(15, 40) * (u + v) + rng.uniform(0, 6.28))[..., None]
    img = img * (1.0 - mask) + (leaf + veins) * mask

    for _ in range(int(rng.integers(0, 5))):
        sy, sx = rng.uniform(0.2, 0.8, 2)
        r = rng.uniform(0.02, 0.08)
        spot = np.clip(1.0 - ((v - sy) ** 2 + (u - sx) ** 2) / r**2, 0.0, 1.0)[..., None]
        img = img * (1.0 - 0.7 * spot) + 0.7 * spot * np.array([0.25, 0.15, 0.08])

    return np.clip(img, 0.0, 1.0).astype(np.float32)


def probe_set(count: int = 20, size: int = 64, seed: int = 0) -> list[np.ndarray]:
    return [probe_image(seed + i, size) for i in range(count)]


def make_toy_dataset(root: Path | str, classes: tuple[str, ...] = ("healthy", "spotted"),
                     per_class: int = 3, size: int = 64, seed: int = 0) -> Path:
    """Write a class-per-folder PNG dataset; class index biases the look."""
    root = Path(root)
    for ci, cls in enumerate(classes):
        cls_dir = root / cls
        cls_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            img = probe_image(seed + 1000 * ci + i, size)
            if ci % 2 == 1:  # extra lesions on odd classes
                rng = make_rng(seed + 5000 + 1000 * ci + i)
                h, w = img.shape[:2]
                yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
                for _ in range(6):
                    sy, sx = rng.uniform(0.15, 0.85, 2) * [h - 1, w - 1]
                    r = rng.uniform(0.04, 0.09) * size
                    spot = np.clip(1.0 - ((yy - sy) ** 2 + (xx - sx) ** 2) / r**2, 0, 1)[..., None]
                    img = img * (1.0 - 0.8 * spot) + 0.8 * spot * np.array([0.3, 0.1, 0.05])
                img = np.clip(img, 0.0, 1.0).astype(np.float32)
            codecs.save_png(img, cls_dir / f"{cls}_{i:03d}.png")
    return root
