"""PNG encode/decode and base64 helpers around raster arrays."""

from __future__ import annotations

import base64
import io
from pathlib import Path

import numpy as np
from PIL import Image


def to_png_bytes(image: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as PNG."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(buf, "PNG")
    return buf.getvalue()


def from_png_bytes(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def to_png_base64(image: np.ndarray) -> str:
    return base64.b64encode(to_png_bytes(image)).decode("ascii")


def from_png_base64(text: str) -> np.ndarray:
    return from_png_bytes(base64.b64decode(text))


def save_png(image: np.ndarray, path) -> None:
    Path(path).write_bytes(to_png_bytes(image))


def load_image(path) -> np.ndarray:
    """Read any PIL-supported image file as an (H, W, 3) uint8 array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)
