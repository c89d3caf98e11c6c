"""Evaluation: OCR accuracy, corpus word statistics, convergence curves.

The recognizer used here is configured separately from the pipeline's own
(OCR measured during iteration is a different channel from the one used to
score results).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from typofix.pipeline import RunReport
from typofix.wordmatch import PairKind, WordSet, match

STAT_COLUMNS = (
    "detected_words",
    "surplus_words",
    "lack_words",
    "typo_words",
    "typo_corrected_words",
)


@dataclass(frozen=True)
class EvalRecord:
    """Per-image evaluation against the prompt's target words."""

    image_id: str
    targets: tuple[str, ...]
    recognized: tuple[str, ...]
    accuracy: float


@dataclass(frozen=True)
class CorpusStats:
    """Corpus-wide sums of the per-run word counts."""

    detected_words: int = 0
    surplus_words: int = 0
    lack_words: int = 0
    typo_words: int = 0
    typo_corrected_words: int = 0
    prompt_word_total: int = 0

    def to_dict(self) -> dict:
        return {
            "detected_words": self.detected_words,
            "surplus_words": self.surplus_words,
            "lack_words": self.lack_words,
            "typo_words": self.typo_words,
            "typo_corrected_words": self.typo_corrected_words,
            "prompt_word_total": self.prompt_word_total,
        }


def ocr_accuracy(targets, recognized, case_insensitive: bool = False) -> float:
    """Fraction of target words with an exact-match partner in the optimal
    assignment. 1.0 for an empty prompt with nothing detected, 0.0 for an
    empty prompt with leftover words."""
    target_set = targets if isinstance(targets, WordSet) else WordSet(tuple(targets))
    recognized_set = (
        recognized if isinstance(recognized, WordSet) else WordSet(tuple(recognized))
    )
    if len(target_set) == 0:
        return 1.0 if len(recognized_set) == 0 else 0.0
    result = match(target_set, recognized_set, case_insensitive=case_insensitive)
    exact = sum(1 for pair in result.pairs if pair.kind is PairKind.EXACT)
    return exact / len(target_set)


def _counts(report: RunReport | dict) -> dict:
    if isinstance(report, RunReport):
        return report.counts
    return report.get("counts", {})


def corpus_stats(reports) -> CorpusStats:
    """Column-wise sums over per-image reports (RunReport objects or dicts)."""
    totals = {column: 0 for column in STAT_COLUMNS}
    prompt_total = 0
    for report in reports:
        counts = _counts(report)
        for column in STAT_COLUMNS:
            totals[column] += int(counts.get(column, 0))
        prompt_total += int(counts.get("prompt_words", 0))
    return CorpusStats(prompt_word_total=prompt_total, **totals)


def _history(report: RunReport | dict) -> list[int] | None:
    if isinstance(report, RunReport):
        history = report.iterations_outstanding
    else:
        history = report.get("iterations_outstanding")
    if not history:
        return None
    return [int(k) for k in history]


def convergence_curve(reports) -> tuple[list[tuple[int, float]], int]:
    """Mean corrected fraction per correction iteration.

    For each image, the fraction at iteration ``t`` is (corrected so far) /
    (corrected by the final iteration), defined as 0 when nothing is ever
    corrected. Histories that ended early are held at their last value.
    Returns (rows, skipped) where rows are ``(iteration, mean_fraction)`` and
    ``skipped`` counts reports without an iteration history.
    """
    histories: list[list[int]] = []
    skipped = 0
    for report in reports:
        history = _history(report)
        if history is None:
            skipped += 1
            continue
        histories.append(history)
    if not histories:
        return [], skipped
    length = max(len(h) for h in histories)
    rows: list[tuple[int, float]] = []
    for t in range(1, length):
        fractions = []
        for history in histories:
            k0 = history[0]
            kt = history[min(t, len(history) - 1)]
            total = k0 - history[-1]
            fractions.append((k0 - kt) / total if total > 0 else 0.0)
        rows.append((t, sum(fractions) / len(fractions)))
    return rows, skipped


def write_curve_csv(rows: list[tuple[int, float]], path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "mean_fraction"])
        for iteration, fraction in rows:
            writer.writerow([iteration, f"{fraction:.6f}"])


def evaluate_image(
    image, targets, detector, recognizer, case_insensitive: bool = False, image_id: str = "image"
) -> EvalRecord:
    """Read an image with the evaluation OCR stack and score it against the
    target words."""
    regions = detector.detect(image)
    raw = recognizer.recognize(image, regions)
    recognized: list[str] = []
    for text in raw:
        recognized.extend(t for t in text.split(" ") if t)
    return EvalRecord(
        image_id=image_id,
        targets=tuple(targets),
        recognized=tuple(recognized),
        accuracy=ocr_accuracy(tuple(targets), tuple(recognized), case_insensitive),
    )
