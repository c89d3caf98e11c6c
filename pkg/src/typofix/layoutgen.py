"""Layout regeneration: turn missing words into image-coordinate boxes.

The planner port speaks a 128x128 canvas convention. Its responses are
schema-validated (bounds, exact word coverage, bounded overlap with existing
text) and retried on violation; once the retry budget is spent, a
deterministic band-placement fallback takes over so a flaky planner degrades
the run instead of failing it.
"""

from __future__ import annotations

from dataclasses import dataclass

from typofix.errors import PlanningError
from typofix.imaging import BBox, RasterImage

CANVAS_SIZE = 128
_BAND_HEIGHT = 12
_BAND_MARGIN = 2

# An element may overlap existing text up to this IoU before the response
# counts as a violation.
MAX_EXISTING_IOU = 0.3


@dataclass(frozen=True)
class LayoutElement:
    """One planned word box in canvas units."""

    word: str
    width: int
    height: int
    left: int
    top: int

    def __post_init__(self):
        problem = element_problem(self.to_json())
        if problem:
            raise ValueError(problem)

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "width": self.width,
            "height": self.height,
            "left": self.left,
            "top": self.top,
        }

    def to_bbox(self) -> BBox:
        return BBox(self.left, self.top, self.width, self.height)


@dataclass(frozen=True)
class PlannedLayout:
    """Elements covering the missing words in order; ``source`` records whether
    the planner produced them or the fallback did."""

    elements: tuple[LayoutElement, ...]
    source: str  # "planner" | "fallback"


def element_problem(raw: object) -> str | None:
    """Why a raw element is not schema-valid, or None if it is."""
    if not isinstance(raw, dict):
        return f"element must be an object, got {type(raw).__name__}"
    for key in ("word", "width", "height", "left", "top"):
        if key not in raw:
            return f"element missing {key!r}"
    word = raw["word"]
    if not isinstance(word, str) or not word:
        return f"element word must be a non-empty string, got {word!r}"
    for key, low, high in (
        ("width", 1, CANVAS_SIZE),
        ("height", 1, CANVAS_SIZE),
        ("left", 0, CANVAS_SIZE - 1),
        ("top", 0, CANVAS_SIZE - 1),
    ):
        value = raw[key]
        if not isinstance(value, int) or isinstance(value, bool):
            return f"element {key} must be an integer, got {value!r}"
        if not low <= value <= high:
            return f"element {key}={value} outside {low}..{high}"
    if raw["left"] + raw["width"] > CANVAS_SIZE:
        return f"element exceeds canvas on the right: left={raw['left']} width={raw['width']}"
    if raw["top"] + raw["height"] > CANVAS_SIZE:
        return f"element exceeds canvas at the bottom: top={raw['top']} height={raw['height']}"
    return None


def _coerce_box(item) -> BBox:
    if isinstance(item, BBox):
        return item
    if isinstance(item, dict):
        return BBox(int(item["left"]), int(item["top"]), int(item["width"]), int(item["height"]))
    raise TypeError(f"cannot interpret {item!r} as a canvas box")


def response_problem(
    elements: object, missing: list[str], existing: list[BBox] | list[dict]
) -> str | None:
    """Validate a raw planner response against the contract: a list of
    schema-valid elements whose words equal ``missing`` exactly and in order,
    each overlapping existing text at most :data:`MAX_EXISTING_IOU`."""
    if not isinstance(elements, list):
        return f"elements must be a list, got {type(elements).__name__}"
    for raw in elements:
        problem = element_problem(raw)
        if problem:
            return problem
    words = [raw["word"] for raw in elements]
    if words != list(missing):
        return f"element words {words} do not cover missing words {list(missing)}"
    existing_boxes = [_coerce_box(e) for e in existing]
    for raw in elements:
        box = BBox(raw["left"], raw["top"], raw["width"], raw["height"])
        for other in existing_boxes:
            iou = box.iou(other)
            if iou > MAX_EXISTING_IOU:
                return f"element {raw['word']!r} overlaps existing text (IoU {iou:.2f})"
    return None


def band_placement(existing: list[dict] | list[BBox], missing: list[str]) -> list[dict]:
    """Place each word in the topmost horizontal band clear of occupied boxes.

    Width is ``min(124, 6 * len(word) + 2)``, height 12, left margin 2, and a
    1-unit gap is kept around occupied boxes. Deterministic. Raises
    :class:`PlanningError` naming the words that do not fit.
    """
    occupied = [_coerce_box(item) for item in existing]
    placed: list[dict] = []
    unplaceable: list[str] = []
    for word in missing:
        width = min(CANVAS_SIZE - 2 * _BAND_MARGIN, 6 * len(word) + 2)
        found = None
        for top in range(_BAND_MARGIN, CANVAS_SIZE - _BAND_HEIGHT + 1):
            candidate = BBox(_BAND_MARGIN, top, width, _BAND_HEIGHT)
            grown = BBox(
                max(0, candidate.left - 1),
                max(0, candidate.top - 1),
                candidate.width + 2,
                candidate.height + 2,
            )
            if all(grown.intersection(box) is None for box in occupied):
                found = candidate
                break
        if found is None:
            unplaceable.append(word)
            continue
        occupied.append(found)
        placed.append(
            {
                "word": word,
                "width": found.width,
                "height": found.height,
                "left": found.left,
                "top": found.top,
            }
        )
    if unplaceable:
        raise PlanningError(unplaceable, placed=placed)
    return placed


def to_canvas_box(box: BBox, image_width: int, image_height: int) -> dict:
    """Scale an image box onto the canvas, clamped into schema range."""
    sx = CANVAS_SIZE / image_width
    sy = CANVAS_SIZE / image_height
    left = min(CANVAS_SIZE - 1, max(0, round(box.left * sx)))
    top = min(CANVAS_SIZE - 1, max(0, round(box.top * sy)))
    width = max(1, min(CANVAS_SIZE - left, round(box.width * sx)))
    height = max(1, min(CANVAS_SIZE - top, round(box.height * sy)))
    return {"left": left, "top": top, "width": width, "height": height}


def to_image_coords(element: LayoutElement, image_width: int, image_height: int) -> BBox:
    """Map a canvas element to pixel coordinates: per-axis linear scale,
    rounded, clamped into bounds with positive area."""
    sx = image_width / CANVAS_SIZE
    sy = image_height / CANVAS_SIZE
    left = min(image_width - 1, max(0, round(element.left * sx)))
    top = min(image_height - 1, max(0, round(element.top * sy)))
    width = max(1, min(image_width - left, round(element.width * sx)))
    height = max(1, min(image_height - top, round(element.height * sy)))
    return BBox(left, top, width, height)


def plan_missing(
    image: RasterImage,
    existing: list[BBox],
    missing: list[str],
    planner,
    retries: int = 5,
    existing_words: list[str] | None = None,
) -> PlannedLayout:
    """Obtain a schema-valid layout for the missing words.

    Existing boxes are down-scaled to the canvas and sent with every request.
    The planner gets ``retries + 1`` attempts; any invalid response (schema,
    coverage, overlap) or exception triggers a retry. After exhaustion the
    band-placement fallback is used and ``source`` is ``"fallback"``. A
    fallback overflow raises :class:`PlanningError` carrying the partial
    layout, so callers can keep the placeable words.
    """
    if not missing:
        return PlannedLayout(elements=(), source="planner")
    words = existing_words if existing_words is not None else ["text"] * len(existing)
    existing_elements = [
        {"word": word or "text", **to_canvas_box(box, image.width, image.height)}
        for box, word in zip(existing, words)
    ]
    for _ in range(max(retries, 0) + 1):
        try:
            raw = planner.plan(image, existing_elements, list(missing))
        except Exception:
            continue
        if response_problem(raw, list(missing), existing_elements) is None:
            elements = tuple(
                LayoutElement(
                    word=e["word"], width=e["width"], height=e["height"],
                    left=e["left"], top=e["top"],
                )
                for e in raw
            )
            return PlannedLayout(elements=elements, source="planner")
    try:
        placed = band_placement(existing_elements, list(missing))
    except PlanningError as err:
        err.placed = PlannedLayout(
            elements=tuple(
                LayoutElement(
                    word=e["word"], width=e["width"], height=e["height"],
                    left=e["left"], top=e["top"],
                )
                for e in (err.placed or [])
            ),
            source="fallback",
        )
        raise
    elements = tuple(
        LayoutElement(
            word=e["word"], width=e["width"], height=e["height"], left=e["left"], top=e["top"]
        )
        for e in placed
    )
    return PlannedLayout(elements=elements, source="fallback")
