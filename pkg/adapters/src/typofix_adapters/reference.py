"""Reference models: classical CV and rule-based implementations.

These load in any environment and exist so the service can run, be
integration-tested, and pass protocol conformance without ML weights. They
are honest baselines, not accuracy contenders: the detector finds dark ink
blobs, the recognizer only estimates glyph counts, the eraser is diffusion-
free inpainting, and the editor rasterizes text with a plain vector font.
"""

from __future__ import annotations

import numpy as np

try:
    import cv2
except ImportError:  # pragma: no cover - cv2 is a hard dependency
    cv2 = None

from PIL import Image, ImageDraw, ImageFont


def _ink_mask(image: np.ndarray) -> np.ndarray:
    """Dark-on-light text mask via Otsu threshold on luminance."""
    gray = cv2.cvtColor(image, cv2.COLOR_RGB2GRAY)
    _, mask = cv2.threshold(gray, 0, 255, cv2.THRESH_BINARY_INV + cv2.THRESH_OTSU)
    # An almost-uniform image thresholds into noise; require real contrast.
    if gray.std() < 8:
        return np.zeros_like(mask)
    return mask


class ReferenceDetector:
    """Connected dark-ink blobs, merged horizontally into word-level boxes."""

    min_area = 12

    def detect(self, image: np.ndarray) -> list[list[list[float]]]:
        mask = _ink_mask(image)
        if not mask.any():
            return []
        kernel = cv2.getStructuringElement(cv2.MORPH_RECT, (9, 3))
        merged = cv2.morphologyEx(mask, cv2.MORPH_CLOSE, kernel)
        count, _, stats, _ = cv2.connectedComponentsWithStats(merged, connectivity=8)
        polygons = []
        for i in range(1, count):
            left, top, width, height, area = stats[i]
            if area < self.min_area:
                continue
            polygons.append(
                [
                    [float(left), float(top)],
                    [float(left + width), float(top)],
                    [float(left + width), float(top + height)],
                    [float(left), float(top + height)],
                ]
            )
        polygons.sort(key=lambda p: (p[0][1], p[0][0]))
        return polygons


class ReferenceRecognizer:
    """Glyph-count estimate only: one ``?`` per ink column run in the region.

    A stand-in that derives its output from pixels without any trained
    model; swap in a real recognizer for useful text.
    """

    def recognize(self, image: np.ndarray, polygons: list[list[list[float]]]) -> list[str]:
        from typofix_adapters.wire import polygon_bbox

        height, width = image.shape[:2]
        mask = _ink_mask(image) > 0
        words = []
        for polygon in polygons:
            left, top, right, bottom = polygon_bbox(polygon, width, height)
            columns = mask[top:bottom, left:right].any(axis=0).astype(np.int8)
            glyphs = int(np.count_nonzero(np.diff(np.r_[np.int8(0), columns]) == 1))
            words.append("?" * glyphs if glyphs else "")
        return words


class ReferenceEraser:
    """Telea inpainting over the mask boxes; classical, deterministic."""

    def erase(self, image: np.ndarray, masks: list[dict], erase_all: bool) -> np.ndarray:
        if not masks:
            return image
        height, width = image.shape[:2]
        paint = np.zeros((height, width), dtype=np.uint8)
        for box in masks:
            left = max(0, int(box["left"]))
            top = max(0, int(box["top"]))
            right = min(width, left + int(box["width"]))
            bottom = min(height, top + int(box["height"]))
            if right > left and bottom > top:
                paint[top:bottom, left:right] = 255
        bgr = cv2.cvtColor(image, cv2.COLOR_RGB2BGR)
        inpainted = cv2.inpaint(bgr, paint, inpaintRadius=3, flags=cv2.INPAINT_TELEA)
        return cv2.cvtColor(inpainted, cv2.COLOR_BGR2RGB)


class ReferenceEditor:
    """Rasterize each target word into its box with a plain vector font.

    The box is filled with its median border color first, then the text is
    drawn centered in a contrasting color at the largest size that fits.
    """

    def edit(self, image: np.ndarray, targets: list[dict]) -> np.ndarray:
        height, width = image.shape[:2]
        canvas = Image.fromarray(image.copy(), mode="RGB")
        draw = ImageDraw.Draw(canvas)
        for target in targets:
            box, word = target["box"], target["word"]
            left = max(0, int(box["left"]))
            top = max(0, int(box["top"]))
            right = min(width, left + int(box["width"]))
            bottom = min(height, top + int(box["height"]))
            if right <= left or bottom <= top or not word:
                continue
            fill = self._border_color(image, left, top, right, bottom)
            draw.rectangle((left, top, right - 1, bottom - 1), fill=fill)
            ink = (0, 0, 0) if sum(fill) > 382 else (255, 255, 255)
            font = self._fit_font(draw, word, right - left, bottom - top)
            x0, y0, x1, y1 = draw.textbbox((0, 0), word, font=font)
            x = left + ((right - left) - (x1 - x0)) // 2 - x0
            y = top + ((bottom - top) - (y1 - y0)) // 2 - y0
            draw.text((x, y), word, fill=ink, font=font)
        return np.asarray(canvas)

    @staticmethod
    def _border_color(image: np.ndarray, left: int, top: int, right: int, bottom: int):
        height, width = image.shape[:2]
        strips = []
        if top > 0:
            strips.append(image[top - 1, max(0, left - 1) : min(width, right + 1)])
        if bottom < height:
            strips.append(image[bottom, max(0, left - 1) : min(width, right + 1)])
        if left > 0:
            strips.append(image[top:bottom, left - 1])
        if right < width:
            strips.append(image[top:bottom, right])
        if not strips:
            return (255, 255, 255)
        ring = np.concatenate([s.reshape(-1, 3) for s in strips], axis=0)
        return tuple(int(c) for c in np.median(ring, axis=0))

    @staticmethod
    def _fit_font(draw, word: str, box_width: int, box_height: int):
        size = max(6, box_height)
        while size > 6:
            font = ImageFont.load_default(size=size)
            x0, y0, x1, y1 = draw.textbbox((0, 0), word, font=font)
            if x1 - x0 <= box_width and y1 - y0 <= box_height:
                return font
            size -= 2
        return ImageFont.load_default(size=6)


class ReferencePlanner:
    """Rule-based band placement on the 128x128 canvas."""

    def plan(self, image: np.ndarray, existing: list[dict], missing: list[str]) -> list[dict]:
        occupied = [
            (e["left"], e["top"], e["left"] + e["width"], e["top"] + e["height"])
            for e in existing
        ]
        elements = []
        for word in missing:
            width = min(120, max(8, 6 * len(word)))
            height = 14
            placed = None
            for top in range(4, 128 - height):
                candidate = (4, top, 4 + width, top + height)
                if all(
                    candidate[2] <= l or candidate[0] >= r or candidate[3] <= t or candidate[1] >= b
                    for l, t, r, b in occupied
                ):
                    placed = candidate
                    break
            if placed is None:
                placed = (4, 128 - height - 1, 4 + width, 127)
            occupied.append(placed)
            elements.append(
                {
                    "word": word,
                    "width": placed[2] - placed[0],
                    "height": placed[3] - placed[1],
                    "left": placed[0],
                    "top": placed[1],
                }
            )
        return elements


class ReferenceAugmenter:
    """Template augmentation that preserves the prompt's quoted spans."""

    def augment(self, prompt: str) -> str:
        return f"A clean, well-composed poster design. {prompt}. Legible typography, simple layout."
