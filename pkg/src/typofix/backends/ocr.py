"""Template-matching OCR over images rendered with the built-in font.

Ink is exact black. Each 8-connected ink component is matched against the
glyph table at scales 1..8; a component's ink-box dimensions determine the
only (glyph, scale) it could be, so decoding is a single exact comparison.
Decoded glyphs are then chained into words along the 6-cell advance grid.
The two-part glyphs (``!``, ``?``) are recovered first by pairing vertically
stacked components and matching the combined pattern.

This reads pixels, not any hidden scene registry: erasures and edits are
observed through the same channel the pipeline uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from typofix.backends import font
from typofix.imaging import BBox, RasterImage

_LABEL_STRUCTURE = np.ones((3, 3), dtype=int)


@dataclass
class _Component:
    y0: int
    x0: int
    pattern: np.ndarray  # cropped boolean ink pattern

    @property
    def height(self) -> int:
        return self.pattern.shape[0]

    @property
    def width(self) -> int:
        return self.pattern.shape[1]

    @property
    def y1(self) -> int:
        return self.y0 + self.height

    @property
    def x1(self) -> int:
        return self.x0 + self.width


@dataclass(frozen=True)
class Letter:
    char: str
    scale: int
    cell_x: int  # top-left of the 5x7 cell, in scan coordinates
    cell_y: int


@dataclass(frozen=True)
class WordHit:
    """A maximal run of glyphs on a common grid."""

    word: str
    box: BBox
    scale: int


def ink_mask(image: RasterImage) -> np.ndarray:
    return np.all(image.array == font.INK, axis=2)


def _components(mask: np.ndarray) -> list[_Component]:
    labels, count = ndimage.label(mask, structure=_LABEL_STRUCTURE)
    comps: list[_Component] = []
    for index, sl in enumerate(ndimage.find_objects(labels, count), start=1):
        if sl is None:
            continue
        pattern = labels[sl] == index
        comps.append(_Component(y0=sl[0].start, x0=sl[1].start, pattern=pattern))
    comps.sort(key=lambda c: (c.y0, c.x0))
    return comps


def _decode_single(comp: _Component) -> Letter | None:
    for glyph in font.SINGLE_PART_GLYPHS:
        ink_h, ink_w = glyph.ink.shape
        if comp.height % ink_h:
            continue
        scale = comp.height // ink_h
        if not 1 <= scale <= font.MAX_SCAN_SCALE:
            continue
        if comp.width != ink_w * scale:
            continue
        if np.array_equal(comp.pattern, font.scaled_ink(glyph.char, scale)):
            return Letter(
                char=glyph.char,
                scale=scale,
                cell_x=comp.x0 - glyph.col_off * scale,
                cell_y=comp.y0 - glyph.row_off * scale,
            )
    return None


def _decode_pair(upper: _Component, lower: _Component) -> Letter | None:
    y0 = min(upper.y0, lower.y0)
    x0 = min(upper.x0, lower.x0)
    height = max(upper.y1, lower.y1) - y0
    width = max(upper.x1, lower.x1) - x0
    for glyph in font.MULTI_PART_GLYPHS:
        ink_h, ink_w = glyph.ink.shape
        if height % ink_h or width != (height // ink_h) * ink_w:
            continue
        scale = height // ink_h
        if not 1 <= scale <= font.MAX_SCAN_SCALE:
            continue
        combined = np.zeros((height, width), dtype=bool)
        for part in (upper, lower):
            combined[part.y0 - y0 : part.y1 - y0, part.x0 - x0 : part.x1 - x0] |= part.pattern
        if np.array_equal(combined, font.scaled_ink(glyph.char, scale)):
            return Letter(
                char=glyph.char,
                scale=scale,
                cell_x=x0 - glyph.col_off * scale,
                cell_y=y0 - glyph.row_off * scale,
            )
    return None


def _decode(comps: list[_Component]) -> tuple[list[Letter], list[_Component]]:
    """Decode components into letters; returns (letters, undecoded leftovers)."""
    consumed = [False] * len(comps)
    letters: list[Letter] = []

    # Two-part glyphs first, so an isolated dot cannot be misread as '.'.
    for i, upper in enumerate(comps):
        if consumed[i]:
            continue
        for j, lower in enumerate(comps):
            if i == j or consumed[j] or consumed[i]:
                continue
            gap = lower.y0 - upper.y1
            if not 1 <= gap <= font.MAX_SCAN_SCALE:
                continue
            if lower.x0 >= upper.x1 or lower.x1 <= upper.x0:
                continue
            letter = _decode_pair(upper, lower)
            if letter is not None:
                letters.append(letter)
                consumed[i] = consumed[j] = True

    leftovers: list[_Component] = []
    for i, comp in enumerate(comps):
        if consumed[i]:
            continue
        letter = _decode_single(comp)
        if letter is not None:
            letters.append(letter)
        else:
            leftovers.append(comp)
    return letters, leftovers


def _fits_cell(comp: _Component, cell_x: int, cell_y: int, scale: int) -> bool:
    return (
        comp.x0 >= cell_x
        and comp.x1 <= cell_x + font.GLYPH_COLS * scale
        and comp.y0 >= cell_y
        and comp.y1 <= cell_y + font.GLYPH_ROWS * scale
    )


def _assemble(
    letters: list[Letter], leftovers: list[_Component] | None = None
) -> list[WordHit]:
    """Chain letters on a common (scale, row, advance) grid into words.

    When ``leftovers`` is given, undecoded components that sit exactly in a
    grid cell adjacent to or between decoded glyphs are read as ``?``.
    """
    leftovers = list(leftovers or [])
    used_leftover = [False] * len(leftovers)
    lines: dict[tuple[int, int], list[Letter]] = {}
    for letter in sorted(letters, key=lambda l: (l.cell_y, l.cell_x)):
        lines.setdefault((letter.scale, letter.cell_y), []).append(letter)

    def find_cell(cell_x: int, cell_y: int, scale: int) -> int | None:
        if cell_x < 0 or cell_y < 0:
            return None
        for idx, comp in enumerate(leftovers):
            if not used_leftover[idx] and _fits_cell(comp, cell_x, cell_y, scale):
                return idx
        return None

    def claim_cell(cell_x: int, cell_y: int, scale: int) -> bool:
        idx = find_cell(cell_x, cell_y, scale)
        if idx is None:
            return False
        used_leftover[idx] = True
        return True

    hits: list[WordHit] = []
    for (scale, cell_y), row in sorted(lines.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        advance = font.GLYPH_ADVANCE * scale
        row = sorted(row, key=lambda l: l.cell_x)
        index = 0
        while index < len(row):
            chars = [row[index].char]
            start_x = row[index].cell_x
            end_x = start_x
            index += 1
            while index < len(row):
                gap_cells, rem = divmod(row[index].cell_x - end_x, advance)
                if rem != 0 or gap_cells < 1:
                    break  # off-grid: a different word
                if gap_cells > 1:
                    # Bridge interior holes with '?' if corrupted ink fills
                    # every skipped cell; claim only once all cells match.
                    found = [
                        find_cell(end_x + k * advance, cell_y, scale)
                        for k in range(1, gap_cells)
                    ]
                    if any(idx is None for idx in found) or len(set(found)) != len(found):
                        break
                    for idx in found:
                        used_leftover[idx] = True
                    chars.extend("?" * (gap_cells - 1))
                chars.append(row[index].char)
                end_x = row[index].cell_x
                index += 1
            # Extend over corrupted glyphs at either end of the chain.
            while claim_cell(start_x - advance, cell_y, scale):
                chars.insert(0, "?")
                start_x -= advance
            while claim_cell(end_x + advance, cell_y, scale):
                chars.append("?")
                end_x += advance
            width = (font.GLYPH_ADVANCE * len(chars) - 1) * scale
            hits.append(
                WordHit(
                    word="".join(chars),
                    box=BBox(start_x, cell_y, width, font.GLYPH_ROWS * scale),
                    scale=scale,
                )
            )
    hits.sort(key=lambda h: (h.box.top, h.box.left))
    return hits


def scan_words(mask: np.ndarray, read_corrupted: bool = False) -> list[WordHit]:
    """Find every rendered word in a binary ink mask.

    With ``read_corrupted`` the scan also represents undecodable ink that
    aligns with a word's glyph grid as ``?`` characters (recognition mode);
    without it only cleanly decoded glyphs are reported (detection mode).
    """
    comps = _components(mask)
    if not comps:
        return []
    letters, leftovers = _decode(comps)
    if not letters:
        if read_corrupted and leftovers:
            y0 = min(c.y0 for c in leftovers)
            x0 = min(c.x0 for c in leftovers)
            y1 = max(c.y1 for c in leftovers)
            x1 = max(c.x1 for c in leftovers)
            return [WordHit(word="?", box=BBox(x0, y0, x1 - x0, y1 - y0), scale=1)]
        return []
    return _assemble(letters, leftovers if read_corrupted else None)
