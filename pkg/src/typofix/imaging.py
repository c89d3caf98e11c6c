"""Raster images, text regions, boxes, masks, and the pixel-exact operations on them.

Everything here is a pure function of its inputs: images are immutable once
constructed, and every operation returns a new value. That keeps the pipeline
stages freely composable and safe to run concurrently.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from typofix.errors import DimensionError


def _iround(x: float) -> int:
    """Round half away from zero; ``round()`` banker's rounding would make
    pad sizes depend on parity."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


class RasterImage:
    """An RGB8 pixel grid, the substrate every stage reads and writes.

    Backed by a read-only ``(height, width, 3)`` uint8 array. Equality is
    exact byte equality.
    """

    __slots__ = ("array",)

    def __init__(self, array: np.ndarray) -> None:
        arr = np.asarray(array, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionError(f"expected (H, W, 3) RGB8 array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError("image must be at least 1x1")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("RasterImage is immutable")

    @property
    def width(self) -> int:
        return int(self.array.shape[1])

    @property
    def height(self) -> int:
        return int(self.array.shape[0])

    @property
    def pixels(self) -> bytes:
        """Row-major RGB8 samples, length ``width * height * 3``."""
        return self.array.tobytes()

    @classmethod
    def new(cls, width: int, height: int, color: tuple[int, int, int] = (255, 255, 255)) -> "RasterImage":
        arr = np.empty((height, width, 3), dtype=np.uint8)
        arr[:, :] = color
        return cls(arr)

    @classmethod
    def from_png(cls, path: str | Path) -> "RasterImage":
        with Image.open(path) as im:
            return cls._from_pil(im)

    @classmethod
    def from_png_bytes(cls, data: bytes) -> "RasterImage":
        with Image.open(io.BytesIO(data)) as im:
            return cls._from_pil(im)

    @classmethod
    def _from_pil(cls, im: Image.Image) -> "RasterImage":
        # Alpha is flattened against white on ingest.
        if im.mode in ("RGBA", "LA", "PA"):
            background = Image.new("RGBA", im.size, (255, 255, 255, 255))
            background.alpha_composite(im.convert("RGBA"))
            im = background.convert("RGB")
        elif im.mode != "RGB":
            im = im.convert("RGB")
        return cls(np.asarray(im))

    def to_png(self, path: str | Path) -> None:
        Image.fromarray(self.array, mode="RGB").save(path, format="PNG")

    def to_png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.array, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()

    def with_array(self, array: np.ndarray) -> "RasterImage":
        return RasterImage(array)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.array.shape == other.array.shape and bool(np.array_equal(self.array, other.array))

    def __hash__(self) -> int:
        return hash((self.width, self.height, self.array.tobytes()))

    def __repr__(self) -> str:
        return f"RasterImage({self.width}x{self.height})"


@dataclass(frozen=True)
class Polygon:
    """An ordered ring of real-valued pixel coordinates, at least 3 vertices."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(self.vertices)}")
        object.__setattr__(
            self, "vertices", tuple((float(x), float(y)) for x, y in self.vertices)
        )

    @classmethod
    def from_rect(cls, left: float, top: float, width: float, height: float) -> "Polygon":
        return cls(
            ((left, top), (left + width, top), (left + width, top + height), (left, top + height))
        )

    def clamped(self, width: int, height: int) -> "Polygon":
        """Clamp every vertex into ``[0, width] x [0, height]`` (ingest rule)."""
        return Polygon(
            tuple(
                (min(max(x, 0.0), float(width)), min(max(y, 0.0), float(height)))
                for x, y in self.vertices
            )
        )


@dataclass(frozen=True)
class BBox:
    """Axis-aligned integer pixel box: offsets are >= 0, extent is positive."""

    left: int
    top: int
    width: int
    height: int
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.left < 0 or self.top < 0:
            raise ValueError(f"box offsets must be non-negative: {self}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"box extent must be positive: {self}")

    @property
    def right(self) -> int:
        return self.left + self.width

    @property
    def bottom(self) -> int:
        return self.top + self.height

    def contains_box(self, other: "BBox") -> bool:
        return (
            self.left <= other.left
            and self.top <= other.top
            and other.right <= self.right
            and other.bottom <= self.bottom
        )

    def intersection(self, other: "BBox") -> "BBox | None":
        left = max(self.left, other.left)
        top = max(self.top, other.top)
        right = min(self.right, other.right)
        bottom = min(self.bottom, other.bottom)
        if right <= left or bottom <= top:
            return None
        return BBox(left, top, right - left, bottom - top)

    def iou(self, other: "BBox") -> float:
        inter = self.intersection(other)
        if inter is None:
            return 0.0
        ia = inter.width * inter.height
        ua = self.width * self.height + other.width * other.height - ia
        return ia / ua

    def clamp(self, width: int, height: int) -> "BBox | None":
        """Clip to image bounds; ``None`` when nothing remains."""
        left = max(self.left, 0)
        top = max(self.top, 0)
        right = min(self.right, width)
        bottom = min(self.bottom, height)
        if right <= left or bottom <= top:
            return None
        return BBox(left, top, right - left, bottom - top, degenerate=self.degenerate)


@dataclass(frozen=True)
class Mask:
    """Binary raster, 1 = region of interest. Dimensions match the target image."""

    width: int
    height: int
    bits: np.ndarray

    @classmethod
    def from_boxes(cls, width: int, height: int, boxes: list[BBox] | tuple[BBox, ...]) -> "Mask":
        bits = np.zeros((height, width), dtype=bool)
        for box in boxes:
            clipped = box.clamp(width, height)
            if clipped is not None:
                bits[clipped.top : clipped.bottom, clipped.left : clipped.right] = True
        bits.setflags(write=False)
        return cls(width, height, bits)

    def count(self) -> int:
        return int(self.bits.sum())


def polygon_to_bbox(poly: Polygon) -> BBox:
    """Smallest axis-aligned integer box containing every vertex.

    Sub-pixel vertices are never clipped: mins are floored and maxes are
    ceiled. A polygon with zero area after rounding collapses to a 1x1 box
    at its rounded centroid, flagged ``degenerate``.
    """
    xs = [x for x, _ in poly.vertices]
    ys = [y for _, y in poly.vertices]
    left = math.floor(min(xs))
    top = math.floor(min(ys))
    right = math.ceil(max(xs))
    bottom = math.ceil(max(ys))
    if right > left and bottom > top:
        return BBox(left, top, right - left, bottom - top)
    cx = max(0, _iround(sum(xs) / len(xs)))
    cy = max(0, _iround(sum(ys) / len(ys)))
    return BBox(cx, cy, 1, 1, degenerate=True)


def enlarge_bbox(box: BBox, factor: float, bounds: tuple[int, int]) -> BBox:
    """Grow a box by ``round(factor * height)`` pixels on every side, clamped
    to ``bounds`` (width, height). The result always contains the input."""
    if factor < 0:
        raise ValueError(f"enlarge factor must be >= 0, got {factor}")
    pad = _iround(factor * box.height)
    width, height = bounds
    left = max(0, box.left - pad)
    top = max(0, box.top - pad)
    right = min(width, box.right + pad)
    bottom = min(height, box.bottom + pad)
    return BBox(left, top, right - left, bottom - top, degenerate=box.degenerate)


def filter_small_regions(
    regions: list[Polygon], theta: float, image_height: int
) -> tuple[list[Polygon], list[Polygon]]:
    """Partition regions by box height: strictly below ``theta * image_height``
    goes to ``removed``, the rest to ``kept``. Order is preserved."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0, 1], got {theta}")
    threshold = theta * image_height
    kept: list[Polygon] = []
    removed: list[Polygon] = []
    for region in regions:
        if polygon_to_bbox(region).height < threshold:
            removed.append(region)
        else:
            kept.append(region)
    return kept, removed


def composite(base: RasterImage, edit: RasterImage, regions: list[BBox] | tuple[BBox, ...]) -> RasterImage:
    """Copy ``edit`` pixels inside the union of ``regions`` onto ``base``.

    Pixels outside the union are byte-for-byte those of ``base``.
    """
    if (base.width, base.height) != (edit.width, edit.height):
        raise DimensionError(
            f"composite dimension mismatch: base {base.width}x{base.height}, "
            f"edit {edit.width}x{edit.height}"
        )
    if not regions:
        return base
    mask = Mask.from_boxes(base.width, base.height, list(regions))
    out = np.where(mask.bits[:, :, None], edit.array, base.array)
    return RasterImage(out)
