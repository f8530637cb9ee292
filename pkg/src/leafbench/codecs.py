"""PNG/JPEG file boundary.

The only module that touches image files.  Everything decodes to the
(H, W, 3) float32 [0, 1] convention; alpha channels are dropped and
grayscale sources are expanded to three channels.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .image import dequantize, quantize

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def decode_image(source: Path | str | bytes) -> np.ndarray:
    """Load a PNG/JPEG file (or raw bytes) as a float32 image."""
    if isinstance(source, bytes):
        pil = Image.open(io.BytesIO(source))
    else:
        pil = Image.open(source)
    rgb = pil.convert("RGB")
    return dequantize(np.asarray(rgb, dtype=np.uint8))


def encode_png(img: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(quantize(img), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def encode_jpeg(img: np.ndarray, quality: int) -> bytes:
    if not 1 <= quality <= 100:
        raise ValueError(f"jpeg quality must be in [1, 100], got {quality}")
    buf = io.BytesIO()
    Image.fromarray(quantize(img), mode="RGB").save(buf, format="JPEG", quality=quality)
    return buf.getvalue()


def save_png(img: np.ndarray, path: Path | str) -> None:
    Path(path).write_bytes(encode_png(img))


def save_jpeg(img: np.ndarray, path: Path | str, quality: int) -> None:
    Path(path).write_bytes(encode_jpeg(img, quality))


def jpeg_roundtrip(img: np.ndarray, quality: int) -> np.ndarray:
    """Encode at the given quality and decode again (the JPEG corruption)."""
    return decode_image(encode_jpeg(img, quality))
