"""Wire-format helpers: base64 PNG codecs and coordinate shapes.

The protocol moves 8-bit RGB images as base64-encoded PNG; alpha is
flattened against white on decode, matching what clients send.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image


def decode_image(data: str) -> np.ndarray:
    """base64 PNG -> (H, W, 3) uint8 array."""
    with Image.open(io.BytesIO(base64.b64decode(data))) as im:
        if im.mode in ("RGBA", "LA", "PA"):
            background = Image.new("RGBA", im.size, (255, 255, 255, 255))
            background.alpha_composite(im.convert("RGBA"))
            im = background.convert("RGB")
        elif im.mode != "RGB":
            im = im.convert("RGB")
        return np.asarray(im)


def encode_image(array: np.ndarray) -> str:
    """(H, W, 3) uint8 array -> base64 PNG."""
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(array, dtype=np.uint8), mode="RGB").save(
        buf, format="PNG"
    )
    return base64.b64encode(buf.getvalue()).decode("ascii")


def polygon_bbox(polygon: list[list[float]], width: int, height: int) -> tuple[int, int, int, int]:
    """Clamped integer (left, top, right, bottom) of a polygon."""
    xs = [min(max(float(x), 0.0), float(width)) for x, _ in polygon]
    ys = [min(max(float(y), 0.0), float(height)) for _, y in polygon]
    import math

    left = max(0, math.floor(min(xs)))
    top = max(0, math.floor(min(ys)))
    right = min(width, math.ceil(max(xs)))
    bottom = min(height, math.ceil(max(ys)))
    if right <= left:
        right = min(width, left + 1)
    if bottom <= top:
        bottom = min(height, top + 1)
    return left, top, right, bottom
