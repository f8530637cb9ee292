"""Regenerate the bundled frost textures under src/leafbench/assets/frost/.

The textures are synthesized (crystalline fractal base + directional ice
streaks, pale blue-white palette) so the repository stays self-contained;
see assets/frost/PROVENANCE.md.  Rerunning reproduces identical files.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from leafbench import codecs  # noqa: E402
from leafbench.image import (  # noqa: E402
    convolve2d,
    make_gaussian_kernel,
    make_motion_kernel,
    make_rng,
    plasma_fractal,
)

SIZE = 384
OUT = Path(__file__).resolve().parents[1] / "src" / "leafbench" / "assets" / "frost"


def frost_texture(seed: int) -> np.ndarray:
    # keep the field spatially stationary (high wibble decay, dense
    # streaks) so random crops of it have similar statistics
    rng = make_rng(0xF805F + seed)
    base = plasma_fractal(SIZE, 2.4, rng).astype(np.float64)

    # directional ice streaks: thresholded noise smeared along two angles
    streaks = np.zeros((SIZE, SIZE))
    for angle in rng.uniform(0.0, np.pi, 2):
        grains = (rng.random((SIZE, SIZE)) < 0.08).astype(np.float64)
        smear = convolve2d(grains, make_motion_kernel(25, float(angle)))
        streaks += smear / max(smear.max(), 1e-9)
    streaks = np.clip(streaks, 0.0, 1.0)

    crystals = np.clip(0.45 * base + 0.65 * streaks, 0.0, 1.0)
    crystals = convolve2d(crystals, make_gaussian_kernel(1.0)).astype(np.float64)

    # pale, slightly blue palette
    lum = 0.3 + 0.62 * crystals
    img = np.stack([lum * 0.92, lum * 0.97, np.clip(lum * 1.05, 0, 1)], axis=-1)
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for i in range(1, 6):
        path = OUT / f"frost{i}.png"
        codecs.save_png(frost_texture(i), path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
