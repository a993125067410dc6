"""PNG round-tripping for rasters (in memory: ink=1 on background=0)."""

from __future__ import annotations

import io

import numpy as np
from PIL import Image


def raster_to_png_bytes(raster: np.ndarray) -> bytes:
    """Encode as grayscale PNG, black ink on white."""
    arr = np.clip(np.asarray(raster, dtype=np.float64), 0.0, 1.0)
    img = Image.fromarray(np.round((1.0 - arr) * 255.0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def save_raster_png(raster: np.ndarray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(raster_to_png_bytes(raster))


def png_bytes_to_raster(data: bytes) -> np.ndarray:
    img = Image.open(io.BytesIO(data)).convert("L")
    return 1.0 - np.asarray(img, dtype=np.float32) / 255.0


def load_raster_png(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return png_bytes_to_raster(fh.read())
