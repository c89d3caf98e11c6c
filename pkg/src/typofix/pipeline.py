"""The four-stage correction pipeline: detect, erase, regenerate, correct.

``run`` drives one image end to end: extract the prompt's target words,
detect and read what was actually rendered, match the two word sets, erase
surplus and filtered text, plan boxes for missing words, then iterate the
text editor over misspelled targets, compositing only boxes whose content
reads back correctly. Everything observable lands in a :class:`RunReport`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from typofix import layoutgen
from typofix.backends.ports import Ports
from typofix.errors import ConfigError, PlanningError, StageError, TypofixError
from typofix.imaging import (
    BBox,
    Polygon,
    RasterImage,
    composite,
    enlarge_bbox,
    filter_small_regions,
    polygon_to_bbox,
)
from typofix.prompt import PromptSpec, extract_targets
from typofix.util import canonical_json
from typofix.wordmatch import ErrorReport, WordSet, classify, match


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable knobs, with the defaults used throughout the test corpus.

    ``theta`` filters detected regions shorter than that fraction of image
    height; ``t_max`` bounds correction iterations; ``pad_cost`` is the
    constant matching cost against a padding token; ``enlarge_factor`` grows
    erase masks by that fraction of box height per side; ``erase_all`` masks
    every text box during inpainting while compositing only the removal set.
    """

    theta: float = 0.04
    t_max: int = 10
    pad_cost: int = 10
    enlarge_factor: float = 0.1
    erase_all: bool = True
    planner_retries: int = 5
    case_insensitive: bool = False
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError(f"theta must be in [0, 1], got {self.theta}")
        if self.t_max < 1:
            raise ConfigError(f"t_max must be >= 1, got {self.t_max}")
        if self.pad_cost < 1:
            raise ConfigError(f"pad_cost must be >= 1, got {self.pad_cost}")
        if self.enlarge_factor < 0:
            raise ConfigError(f"enlarge_factor must be >= 0, got {self.enlarge_factor}")
        if self.planner_retries < 0:
            raise ConfigError(f"planner_retries must be >= 0, got {self.planner_retries}")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc))

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "t_max": self.t_max,
            "pad_cost": self.pad_cost,
            "enlarge_factor": self.enlarge_factor,
            "erase_all": self.erase_all,
            "planner_retries": self.planner_retries,
            "case_insensitive": self.case_insensitive,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class DetectedText:
    """What the detector/recognizer stack found, after height filtering and
    splitting of multi-word recognitions into per-word sub-boxes."""

    regions: tuple[Polygon, ...]
    boxes: tuple[BBox, ...]
    words: tuple[str, ...]
    filtered: tuple[tuple[Polygon, str], ...]


@dataclass
class RunReport:
    """Per-stage trace of one pipeline run.

    ``counts`` uses the corpus-statistics column names
    (``detected_words``/``surplus_words``/``lack_words``/``typo_words``/
    ``typo_corrected_words``). ``detected_words`` counts words recognized in
    retained regions; ``surplus_words`` counts everything erased as
    unintended, i.e. matching surplus plus height-filtered regions;
    ``typo_corrected_words`` counts typo fixes plus regenerated words whose
    render verified.
    """

    image_id: str = "image"
    prompt: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    detected_words: list = field(default_factory=list)
    filtered_regions: list = field(default_factory=list)
    surplus_words: list = field(default_factory=list)
    missing_words: list = field(default_factory=list)
    typo_pairs: list = field(default_factory=list)
    exact_words: list = field(default_factory=list)
    removal_boxes: list = field(default_factory=list)
    target_boxes: list = field(default_factory=list)
    iterations_outstanding: list = field(default_factory=list)
    iterations_pending: list = field(default_factory=list)
    final_uncorrected: list = field(default_factory=list)
    unplaceable_words: list = field(default_factory=list)
    editor_skipped: list = field(default_factory=list)
    planner_source: str = "none"
    timings: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self, include_timings: bool = True) -> dict:
        data = {
            "image_id": self.image_id,
            "prompt": self.prompt,
            "counts": self.counts,
            "detected_words": self.detected_words,
            "filtered_regions": self.filtered_regions,
            "surplus_words": self.surplus_words,
            "missing_words": self.missing_words,
            "typo_pairs": self.typo_pairs,
            "exact_words": self.exact_words,
            "removal_boxes": self.removal_boxes,
            "target_boxes": self.target_boxes,
            "iterations_outstanding": self.iterations_outstanding,
            "iterations_pending": self.iterations_pending,
            "final_uncorrected": self.final_uncorrected,
            "unplaceable_words": self.unplaceable_words,
            "editor_skipped": self.editor_skipped,
            "planner_source": self.planner_source,
            "config": self.config,
        }
        if include_timings:
            data["timings"] = self.timings
        return data

    def canonical_json(self, include_timings: bool = False) -> str:
        return canonical_json(self.to_dict(include_timings=include_timings))

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        report = cls()
        for key, value in data.items():
            if hasattr(report, key):
                setattr(report, key, value)
        return report


def _box_json(box: BBox) -> dict:
    return {"left": box.left, "top": box.top, "width": box.width, "height": box.height}


def _words_equal(recognized: str, target: str, config: PipelineConfig) -> bool:
    if config.case_insensitive:
        return recognized.casefold() == target.casefold()
    return recognized == target


def detect_words(
    image: RasterImage, detector, recognizer, config: PipelineConfig
) -> DetectedText:
    """Detect polygonal regions, drop the ones shorter than ``theta`` of the
    image height, and read the remaining words.

    A recognition containing spaces (a detector that merged words) is split
    into per-word sub-boxes by proportional width; an empty recognition sends
    its region to ``filtered``.
    """
    raw = [poly.clamped(image.width, image.height) for poly in detector.detect(image)]
    kept, removed = filter_small_regions(raw, config.theta, image.height)
    filtered = [(poly, "below-height-threshold") for poly in removed]
    words = recognizer.recognize(image, kept)
    if len(words) != len(kept):
        raise StageError(
            "detect",
            f"recognizer returned {len(words)} words for {len(kept)} regions",
        )
    regions: list[Polygon] = []
    boxes: list[BBox] = []
    out_words: list[str] = []
    for region, text in zip(kept, words):
        tokens = [t for t in text.split(" ") if t]
        if not tokens:
            filtered.append((region, "empty-recognition"))
            continue
        box = polygon_to_bbox(region)
        if len(tokens) == 1:
            regions.append(region)
            boxes.append(box)
            out_words.append(tokens[0])
            continue
        total = sum(len(t) for t in tokens)
        edges = [box.left]
        consumed = 0
        for token in tokens:
            consumed += len(token)
            edges.append(box.left + round(box.width * consumed / total))
        for i, token in enumerate(tokens):
            left = edges[i]
            width = max(1, edges[i + 1] - left)
            sub = BBox(left, box.top, width, box.height)
            regions.append(Polygon.from_rect(sub.left, sub.top, sub.width, sub.height))
            boxes.append(sub)
            out_words.append(token)
    return DetectedText(
        regions=tuple(regions),
        boxes=tuple(boxes),
        words=tuple(out_words),
        filtered=tuple(filtered),
    )


def removal_set(
    image: RasterImage, detected: DetectedText, report: ErrorReport, config: PipelineConfig
) -> list[BBox]:
    """Boxes to erase: surplus words plus filtered regions, each enlarged."""
    bounds = (image.width, image.height)
    boxes = [detected.boxes[i] for i in report.surplus]
    boxes += [polygon_to_bbox(poly) for poly, _ in detected.filtered]
    return [enlarge_bbox(box, config.enlarge_factor, bounds) for box in boxes]


def erase_stage(
    image: RasterImage,
    detected: DetectedText,
    report: ErrorReport,
    eraser,
    config: PipelineConfig,
) -> RasterImage:
    """Erase the removal set. With ``erase_all`` the eraser sees masks for
    every text box (so it cannot infill letter-like texture), but only the
    removal set is composited back; pixels outside it match the input exactly.
    """
    removal = removal_set(image, detected, report, config)
    if not removal:
        return image
    bounds = (image.width, image.height)
    if config.erase_all:
        masks = [enlarge_bbox(box, config.enlarge_factor, bounds) for box in detected.boxes]
        masks += [
            enlarge_bbox(polygon_to_bbox(poly), config.enlarge_factor, bounds)
            for poly, _ in detected.filtered
        ]
    else:
        masks = removal
    erased = eraser.erase(image, masks, config.erase_all)
    if (erased.width, erased.height) != (image.width, image.height):
        raise StageError("erase", "eraser changed the image dimensions")
    return composite(image, erased, removal)


def regenerate_stage(
    image: RasterImage,
    detected: DetectedText,
    report: ErrorReport,
    planner,
    config: PipelineConfig,
) -> tuple[list[tuple[BBox, str]], str, list[str]]:
    """Plan one image-coordinate box per missing word.

    Returns (placed targets, planner source, unplaceable words). Planning
    failures degrade the run: whatever fit is kept, the rest is reported.
    """
    if not report.missing:
        return [], "none", []
    keep = {i for i, _ in report.typos} | {i for i, _ in report.exact}
    existing_boxes = [detected.boxes[i] for i in sorted(keep)]
    word_for = dict(report.typos + report.exact)
    existing_words = [word_for[i] for i in sorted(keep)]
    try:
        layout = layoutgen.plan_missing(
            image,
            existing_boxes,
            list(report.missing),
            planner,
            retries=config.planner_retries,
            existing_words=existing_words,
        )
        unplaceable: list[str] = []
    except PlanningError as err:
        layout = err.placed if isinstance(err.placed, layoutgen.PlannedLayout) else None
        unplaceable = list(err.unplaceable)
        if layout is None:
            return [], "fallback", unplaceable
    targets = [
        (layoutgen.to_image_coords(element, image.width, image.height), element.word)
        for element in layout.elements
    ]
    return targets, layout.source, unplaceable


def typo_correct(
    image: RasterImage,
    targets: list[tuple[BBox, str]],
    editor,
    recognizer,
    config: PipelineConfig,
) -> tuple[RasterImage, list[int], list[list[str]]]:
    """Iteratively edit the outstanding targets, keeping only verified boxes.

    Each round: the editor renders every outstanding target on a copy, the
    recognizer reads each edited box, and boxes whose text equals the target
    (under the configured case policy) are composited into the working image
    and retired. Stops early once nothing is outstanding, and never after
    more than ``t_max`` rounds. Returns the final image, the outstanding
    count before and after each round, and the matching pending word lists.
    """
    work = image
    outstanding = list(targets)
    history = [len(outstanding)]
    pending = [[word for _, word in outstanding]]
    for _ in range(config.t_max):
        if not outstanding:
            break
        edited = editor.edit(work, outstanding)
        if (edited.width, edited.height) != (work.width, work.height):
            raise StageError("correct", "editor changed the image dimensions")
        regions = [
            Polygon.from_rect(box.left, box.top, box.width, box.height)
            for box, _ in outstanding
        ]
        read = recognizer.recognize(edited, regions)
        if len(read) != len(outstanding):
            raise StageError(
                "correct",
                f"recognizer returned {len(read)} words for {len(outstanding)} regions",
            )
        verified = [
            i
            for i, (box, word) in enumerate(outstanding)
            if _words_equal(read[i], word, config)
        ]
        work = composite(work, edited, [outstanding[i][0] for i in verified])
        outstanding = [t for i, t in enumerate(outstanding) if i not in set(verified)]
        history.append(len(outstanding))
        pending.append([word for _, word in outstanding])
    return work, history, pending


def run(
    image: RasterImage,
    prompt: str | PromptSpec,
    config: PipelineConfig,
    ports: Ports,
    image_id: str = "image",
) -> tuple[RasterImage, RunReport]:
    """Run the full pipeline on one image.

    Detection happens exactly once; later stages trust the match bookkeeping
    rather than re-detecting, which avoids oscillation from detector noise.
    With no target words the pipeline erases all detected text and the last
    two stages have nothing to do.
    """
    report = RunReport(image_id=image_id, config=config.to_dict())
    spec = prompt if isinstance(prompt, PromptSpec) else extract_targets(prompt)
    report.prompt = {
        "raw": spec.raw,
        "targets": list(spec.targets),
        "spans": [list(span) for span in spec.spans],
        "warnings": list(spec.warnings),
    }
    timings: dict[str, float] = {}
    report.timings = timings

    def staged(stage: str, fn, *args):
        start = time.perf_counter()
        try:
            result = fn(*args)
        except StageError:
            raise
        except TypofixError as exc:
            raise StageError(stage, str(exc), partial_report=report)
        finally:
            timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - start
        return result

    try:
        detected = staged("detect", detect_words, image, ports.detector, ports.recognizer, config)
        report.detected_words = list(detected.words)
        report.filtered_regions = [
            {"box": _box_json(polygon_to_bbox(poly)), "reason": reason}
            for poly, reason in detected.filtered
        ]

        start = time.perf_counter()
        result = match(
            spec.targets, WordSet(detected.words), config.pad_cost, config.case_insensitive
        )
        errors = classify(result, spec.targets, WordSet(detected.words))
        timings["match"] = time.perf_counter() - start
        report.surplus_words = [detected.words[i] for i in errors.surplus]
        report.missing_words = list(errors.missing)
        report.typo_pairs = [[detected.words[i], target] for i, target in errors.typos]
        report.exact_words = [word for _, word in errors.exact]
        report.removal_boxes = [
            _box_json(box) for box in removal_set(image, detected, errors, config)
        ]

        working = staged("erase", erase_stage, image, detected, errors, ports.eraser, config)

        start = time.perf_counter()
        regenerated, planner_source, unplaceable = regenerate_stage(
            working, detected, errors, ports.planner, config
        )
        timings["plan"] = time.perf_counter() - start
        report.planner_source = planner_source
        report.unplaceable_words = unplaceable

        targets = [(detected.boxes[i], word) for i, word in errors.typos] + regenerated
        report.target_boxes = [_box_json(box) for box, _ in targets]

        final, history, pending = staged(
            "correct", typo_correct, working, targets, ports.editor, ports.recognizer, config
        )
        report.iterations_outstanding = history
        report.iterations_pending = pending
        report.final_uncorrected = pending[-1] if pending else []
        skipped = getattr(ports.editor, "last_skipped", None)
        if skipped:
            report.editor_skipped = [
                {"box": _box_json(box), "word": word, "reason": reason}
                for box, word, reason in skipped
            ]

        corrected = history[0] - history[-1] if history else 0
        report.counts = {
            "prompt_words": len(spec.targets),
            "detected_words": len(detected.words),
            "surplus_words": len(errors.surplus) + len(detected.filtered),
            "lack_words": len(errors.missing),
            "typo_words": len(errors.typos),
            "typo_corrected_words": corrected,
        }
        return final, report
    except StageError as exc:
        exc.partial_report = report
        raise
