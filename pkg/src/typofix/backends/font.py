"""Built-in 5x7 bitmap font used by the synthetic renderer and the template OCR.

Glyphs cover A-Z, 0-9, and a little punctuation. The mock OCR relies on two
properties that a unit test enforces over the whole table: no two glyph ink
patterns are equal, and no pattern is an integer upscale of another (so a
pixel block identifies its glyph and render scale uniquely).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from typofix.errors import GlyphError

GLYPH_ROWS = 7
GLYPH_COLS = 5
GLYPH_ADVANCE = 6  # 5 columns of ink plus 1 column of spacing
MAX_SCAN_SCALE = 8
INK = (0, 0, 0)

_GLYPHS = {
    "A": (
        ".###.",
        "#...#",
        "#...#",
        "#####",
        "#...#",
        "#...#",
        "#...#",
    ),
    "B": (
        "####.",
        "#...#",
        "#...#",
        "####.",
        "#...#",
        "#...#",
        "####.",
    ),
    "C": (
        ".###.",
        "#...#",
        "#....",
        "#....",
        "#....",
        "#...#",
        ".###.",
    ),
    "D": (
        "####.",
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        "####.",
    ),
    "E": (
        "#####",
        "#....",
        "#....",
        "####.",
        "#....",
        "#....",
        "#####",
    ),
    "F": (
        "#####",
        "#....",
        "#....",
        "####.",
        "#....",
        "#....",
        "#....",
    ),
    "G": (
        ".###.",
        "#...#",
        "#....",
        "#.###",
        "#...#",
        "#...#",
        ".####",
    ),
    "H": (
        "#...#",
        "#...#",
        "#...#",
        "#####",
        "#...#",
        "#...#",
        "#...#",
    ),
    "I": (
        "#####",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        "#####",
    ),
    "J": (
        "..###",
        "...#.",
        "...#.",
        "...#.",
        "...#.",
        "#..#.",
        ".##..",
    ),
    "K": (
        "#...#",
        "#..#.",
        "#.#..",
        "##...",
        "#.#..",
        "#..#.",
        "#...#",
    ),
    "L": (
        "#....",
        "#....",
        "#....",
        "#....",
        "#....",
        "#....",
        "#####",
    ),
    "M": (
        "#...#",
        "##.##",
        "#.#.#",
        "#.#.#",
        "#...#",
        "#...#",
        "#...#",
    ),
    "N": (
        "#...#",
        "##..#",
        "#.#.#",
        "#..##",
        "#...#",
        "#...#",
        "#...#",
    ),
    "O": (
        ".###.",
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        ".###.",
    ),
    "P": (
        "####.",
        "#...#",
        "#...#",
        "####.",
        "#....",
        "#....",
        "#....",
    ),
    "Q": (
        ".###.",
        "#...#",
        "#...#",
        "#...#",
        "#.#.#",
        "#..#.",
        ".##.#",
    ),
    "R": (
        "####.",
        "#...#",
        "#...#",
        "####.",
        "#.#..",
        "#..#.",
        "#...#",
    ),
    "S": (
        ".####",
        "#....",
        "#....",
        ".###.",
        "....#",
        "....#",
        "####.",
    ),
    "T": (
        "#####",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
    ),
    "U": (
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        ".###.",
    ),
    "V": (
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        "#...#",
        ".#.#.",
        "..#..",
    ),
    "W": (
        "#...#",
        "#...#",
        "#...#",
        "#.#.#",
        "#.#.#",
        "##.##",
        "#...#",
    ),
    "X": (
        "#...#",
        "#...#",
        ".#.#.",
        "..#..",
        ".#.#.",
        "#...#",
        "#...#",
    ),
    "Y": (
        "#...#",
        "#...#",
        ".#.#.",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
    ),
    "Z": (
        "#####",
        "....#",
        "...#.",
        "..#..",
        ".#...",
        "#....",
        "#####",
    ),
    "0": (
        ".###.",
        "#...#",
        "#..##",
        "#.#.#",
        "##..#",
        "#...#",
        ".###.",
    ),
    "1": (
        "..#..",
        ".##..",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        ".###.",
    ),
    "2": (
        ".###.",
        "#...#",
        "....#",
        "...#.",
        "..#..",
        ".#...",
        "#####",
    ),
    "3": (
        "#####",
        "...#.",
        "..#..",
        "...#.",
        "....#",
        "#...#",
        ".###.",
    ),
    "4": (
        "...#.",
        "..##.",
        ".#.#.",
        "#..#.",
        "#####",
        "...#.",
        "...#.",
    ),
    "5": (
        "#####",
        "#....",
        "####.",
        "....#",
        "....#",
        "#...#",
        ".###.",
    ),
    "6": (
        "..##.",
        ".#...",
        "#....",
        "####.",
        "#...#",
        "#...#",
        ".###.",
    ),
    "7": (
        "#####",
        "....#",
        "...#.",
        "..#..",
        ".#...",
        ".#...",
        ".#...",
    ),
    "8": (
        ".###.",
        "#...#",
        "#...#",
        ".###.",
        "#...#",
        "#...#",
        ".###.",
    ),
    "9": (
        ".###.",
        "#...#",
        "#...#",
        ".####",
        "....#",
        "...#.",
        ".##..",
    ),
    "!": (
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        ".....",
        "..#..",
    ),
    "?": (
        ".###.",
        "#...#",
        "....#",
        "...#.",
        "..#..",
        ".....",
        "..#..",
    ),
    ".": (
        ".....",
        ".....",
        ".....",
        ".....",
        ".....",
        ".##..",
        ".##..",
    ),
    ",": (
        ".....",
        ".....",
        ".....",
        ".....",
        ".##..",
        "..#..",
        ".#...",
    ),
    "'": (
        "..#..",
        "..#..",
        ".#...",
        ".....",
        ".....",
        ".....",
        ".....",
    ),
    "-": (
        ".....",
        ".....",
        ".....",
        ".###.",
        ".....",
        ".....",
        ".....",
    ),
}

GLYPH_CHARS = tuple(sorted(_GLYPHS))
SUBSTITUTION_CHARS = tuple(sorted(c for c in GLYPH_CHARS if c.isalnum()))


@dataclass(frozen=True)
class GlyphInfo:
    """Precomputed ink geometry for one glyph.

    ``ink`` is the glyph bitmap cropped to its ink bounding box; ``row_off``
    and ``col_off`` locate that box inside the 5x7 cell; ``parts`` is the
    number of 8-connected ink components (1 for everything except ``!``/``?``).
    """

    char: str
    grid: np.ndarray
    ink: np.ndarray
    row_off: int
    col_off: int
    parts: int


def _glyph_grid(char: str) -> np.ndarray:
    rows = _GLYPHS[char]
    grid = np.array([[c == "#" for c in row] for row in rows], dtype=bool)
    grid.setflags(write=False)
    return grid


def _build_info(char: str) -> GlyphInfo:
    grid = _glyph_grid(char)
    ys, xs = np.nonzero(grid)
    r0, r1 = int(ys.min()), int(ys.max()) + 1
    c0, c1 = int(xs.min()), int(xs.max()) + 1
    ink = grid[r0:r1, c0:c1].copy()
    ink.setflags(write=False)
    _, parts = ndimage.label(grid, structure=np.ones((3, 3), dtype=int))
    return GlyphInfo(char=char, grid=grid, ink=ink, row_off=r0, col_off=c0, parts=int(parts))


GLYPH_INFO: dict[str, GlyphInfo] = {char: _build_info(char) for char in GLYPH_CHARS}
SINGLE_PART_GLYPHS = tuple(g for g in GLYPH_INFO.values() if g.parts == 1)
MULTI_PART_GLYPHS = tuple(g for g in GLYPH_INFO.values() if g.parts > 1)


@lru_cache(maxsize=2048)
def scaled_ink(char: str, scale: int) -> np.ndarray:
    """Glyph ink pattern upscaled by an integer factor."""
    ink = GLYPH_INFO[char].ink
    if scale == 1:
        return ink
    scaled = np.kron(ink, np.ones((scale, scale), dtype=bool))
    scaled.setflags(write=False)
    return scaled


def word_extent(word: str, scale: int) -> tuple[int, int]:
    """(width, height) in pixels of a word rendered at the given scale."""
    if not word:
        raise ValueError("cannot size an empty word")
    width = (GLYPH_ADVANCE * len(word) - 1) * scale
    return width, GLYPH_ROWS * scale


def word_mask(word: str, scale: int) -> np.ndarray:
    """Boolean ink mask of a rendered word; raises GlyphError on unknown chars."""
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    for char in word:
        if char not in _GLYPHS:
            raise GlyphError(char, word)
    width, _ = word_extent(word, 1)
    grid = np.zeros((GLYPH_ROWS, width), dtype=bool)
    for k, char in enumerate(word):
        grid[:, k * GLYPH_ADVANCE : k * GLYPH_ADVANCE + GLYPH_COLS] = GLYPH_INFO[char].grid
    if scale == 1:
        return grid
    return np.kron(grid, np.ones((scale, scale), dtype=bool))


def max_scale_for_box(word: str, box_width: int, box_height: int) -> int | None:
    """Largest integer scale at which the word fits the box, or None."""
    if not word:
        return None
    width_units = GLYPH_ADVANCE * len(word) - 1
    scale = min(box_width // width_units, box_height // GLYPH_ROWS)
    return scale if scale >= 1 else None
