"""Deterministic mock implementations of the five model ports.

These make the entire pipeline verifiable without any ML model: a template
OCR that reads rendered pixels, a flat-fill eraser, a band-placement layout
planner, and a seeded flaky text editor whose failure mode (one substituted
character) exercises the correction loop without making convergence
impossible.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from typofix.backends import font, ocr
from typofix.imaging import BBox, Polygon, RasterImage, polygon_to_bbox
from typofix.layoutgen import band_placement


def mock_detect(image: RasterImage) -> list[Polygon]:
    """One rectangle polygon per rendered word, recovered by template scan."""
    hits = ocr.scan_words(ocr.ink_mask(image))
    return [
        Polygon.from_rect(hit.box.left, hit.box.top, hit.box.width, hit.box.height)
        for hit in hits
    ]


def mock_recognize(image: RasterImage, regions: list[Polygon]) -> list[str]:
    """Read each region glyph-by-glyph; corrupted glyphs decode as ``?``.

    A region containing several words yields them joined by single spaces in
    top-to-bottom, left-to-right order; a blank region yields ``""``.
    """
    mask = ocr.ink_mask(image)
    words: list[str] = []
    for region in regions:
        box = polygon_to_bbox(region).clamp(image.width, image.height)
        if box is None:
            words.append("")
            continue
        crop = mask[box.top : box.bottom, box.left : box.right]
        hits = ocr.scan_words(crop, read_corrupted=True)
        words.append(" ".join(hit.word for hit in hits))
    return words


def _border_fill(image: RasterImage, box: BBox) -> tuple[int, int, int]:
    """Most frequent color on the 1-px ring just outside the box."""
    arr = image.array
    left = max(0, box.left - 1)
    top = max(0, box.top - 1)
    right = min(image.width, box.right + 1)
    bottom = min(image.height, box.bottom + 1)
    strips = []
    if top < box.top:
        strips.append(arr[top, left:right])
    if box.bottom < bottom:
        strips.append(arr[bottom - 1, left:right])
    if left < box.left:
        strips.append(arr[box.top : box.bottom, left])
    if box.right < right:
        strips.append(arr[box.top : box.bottom, right - 1])
    if not strips:
        return (255, 255, 255)
    ring = np.concatenate([s.reshape(-1, 3) for s in strips], axis=0)
    counts = Counter(map(tuple, ring.tolist()))
    # max count, ties broken toward the smallest RGB triple
    color = min(counts, key=lambda c: (-counts[c], c))
    return (int(color[0]), int(color[1]), int(color[2]))


def mock_erase(image: RasterImage, masks: list[BBox]) -> RasterImage:
    """Replace each masked box with its most frequent border color.

    Fill colors are all sampled from the input image before any box is
    painted, so overlapping masks behave like a single union erase.
    """
    if not masks:
        return image
    boxes = [box.clamp(image.width, image.height) for box in masks]
    fills = [(box, _border_fill(image, box)) for box in boxes if box is not None]
    arr = image.array.copy()
    for box, fill in fills:
        arr[box.top : box.bottom, box.left : box.right] = fill
    return RasterImage(arr)


def mock_plan(existing: list[dict], missing: list[str]) -> list[dict]:
    """Deterministic band placement on the 128x128 canvas (see layoutgen)."""
    return band_placement(existing, missing)


def flaky_edit(
    image: RasterImage,
    targets: list[tuple[BBox, str]],
    p: float,
    seed: int,
    ordinal: int = 0,
) -> tuple[RasterImage, list[tuple[BBox, str, str]]]:
    """Render each target word into its box, succeeding with probability ``p``.

    A failed render substitutes one uniformly chosen character, the minimal
    spelling error. The box is first flat-filled from its border color, then
    the word is centered at the largest integer scale that fits. Identical
    (inputs, seed, ordinal) give byte-identical output. Returns the edited
    image and the targets that were skipped (with a reason): words that fit
    at no integer scale, or contain characters outside the glyph set.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"success probability must be in [0, 1], got {p}")
    rng = np.random.default_rng([seed & (2**63 - 1), ordinal & (2**63 - 1)])
    arr = image.array.copy()
    skipped: list[tuple[BBox, str, str]] = []
    for box, word in targets:
        clipped = box.clamp(image.width, image.height)
        if clipped is None:
            skipped.append((box, word, "box outside image"))
            continue
        if any(ch not in font.GLYPH_INFO for ch in word):
            bad = next(ch for ch in word if ch not in font.GLYPH_INFO)
            skipped.append((box, word, f"no glyph for {bad!r}"))
            continue
        scale = font.max_scale_for_box(word, clipped.width, clipped.height)
        if scale is None:
            skipped.append((box, word, "word does not fit box at any scale"))
            continue
        rendered = word
        if not rng.random() < p:
            position = int(rng.integers(0, len(word)))
            choices = [c for c in font.SUBSTITUTION_CHARS if c != word[position]]
            substitute = choices[int(rng.integers(0, len(choices)))]
            rendered = word[:position] + substitute + word[position + 1 :]
        fill = _border_fill(image, clipped)
        arr[clipped.top : clipped.bottom, clipped.left : clipped.right] = fill
        mask = font.word_mask(rendered, scale)
        ww, wh = font.word_extent(rendered, scale)
        x = clipped.left + (clipped.width - ww) // 2
        y = clipped.top + (clipped.height - wh) // 2
        region = arr[y : y + wh, x : x + ww]
        region[mask] = font.INK
    return RasterImage(arr), skipped


class MockDetector:
    def detect(self, image: RasterImage) -> list[Polygon]:
        return mock_detect(image)


class MockRecognizer:
    def recognize(self, image: RasterImage, regions: list[Polygon]) -> list[str]:
        return mock_recognize(image, regions)


class MockEraser:
    def erase(self, image: RasterImage, masks: list[BBox], erase_all: bool = False) -> RasterImage:
        # erase_all only changes which masks callers pass; the fill is the same.
        return mock_erase(image, masks)


class MockPlanner:
    def plan(self, image: RasterImage, existing: list[dict], missing: list[str]) -> list[dict]:
        return mock_plan(existing, missing)


class FlakyEditor:
    """Stateful editor port: each call advances a per-instance stream ordinal,
    so batch runs stay reproducible when every pipeline run owns an instance."""

    def __init__(self, p: float = 1.0, seed: int = 0) -> None:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"success probability must be in [0, 1], got {p}")
        self.p = p
        self.seed = seed
        self.ordinal = 0
        self.last_skipped: list[tuple[BBox, str, str]] = []

    def edit(self, image: RasterImage, targets: list[tuple[BBox, str]]) -> RasterImage:
        edited, skipped = flaky_edit(image, targets, self.p, self.seed, self.ordinal)
        self.ordinal += 1
        self.last_skipped = skipped
        return edited


class MockAugmenter:
    """Identity augmenter: the prompt already quotes its targets, so the
    result always validates."""

    def augment(self, prompt: str) -> str:
        return prompt
