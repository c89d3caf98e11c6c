"""Synthetic test scenes: deterministic word renderings standing in for
generated images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from typofix.backends import font
from typofix.errors import TypofixError
from typofix.imaging import BBox, RasterImage


@dataclass(frozen=True)
class Placement:
    """One word rendered at an integer scale; the box is its exact pixel extent."""

    word: str
    box: BBox
    scale: int


@dataclass(frozen=True)
class SyntheticScene:
    width: int
    height: int
    placements: tuple[Placement, ...]
    background: tuple[int, int, int] = (255, 255, 255)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))
        object.__setattr__(self, "background", tuple(int(c) for c in self.background))

    def validate(self) -> None:
        if self.background == font.INK:
            raise TypofixError("scene background must differ from the ink color")
        grown: list[BBox] = []
        for placement in self.placements:
            word, box, scale = placement.word, placement.box, placement.scale
            if not word or " " in word:
                raise TypofixError(f"placement words must be non-empty and space-free: {word!r}")
            if not 1 <= scale <= font.MAX_SCAN_SCALE:
                raise TypofixError(f"scale must be in 1..{font.MAX_SCAN_SCALE}, got {scale}")
            expected_w, expected_h = font.word_extent(word, scale)
            if (box.width, box.height) != (expected_w, expected_h):
                raise TypofixError(
                    f"box {box} does not match the {expected_w}x{expected_h} extent of "
                    f"{word!r} at scale {scale}"
                )
            if box.right > self.width or box.bottom > self.height:
                raise TypofixError(f"placement {word!r} exceeds the {self.width}x{self.height} canvas")
            grown.append(
                BBox(
                    max(0, box.left - 1),
                    max(0, box.top - 1),
                    box.width + 2,
                    box.height + 2,
                )
            )
        for i, a in enumerate(grown):
            for b in grown[i + 1 :]:
                if a.intersection(b) is not None:
                    raise TypofixError("placements overlap after enlargement by 1 px")


def place_word(word: str, left: int, top: int, scale: int) -> Placement:
    """Build a placement whose box is the word's exact rendered extent."""
    width, height = font.word_extent(word, scale)
    return Placement(word=word, box=BBox(left, top, width, height), scale=scale)


def render_scene(scene: SyntheticScene) -> RasterImage:
    """Rasterize a scene: background fill, then each word in black ink with the
    built-in 5x7 font at its integer scale. Byte-deterministic."""
    scene.validate()
    arr = np.empty((scene.height, scene.width, 3), dtype=np.uint8)
    arr[:, :] = scene.background
    for placement in scene.placements:
        mask = font.word_mask(placement.word, placement.scale)
        box = placement.box
        region = arr[box.top : box.bottom, box.left : box.right]
        region[mask] = font.INK
    return RasterImage(arr)
