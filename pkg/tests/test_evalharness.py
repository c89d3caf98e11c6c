from __future__ import annotations

import pytest

from typofix.evalharness import (
    CorpusStats,
    convergence_curve,
    corpus_stats,
    ocr_accuracy,
    write_curve_csv,
)
from typofix.pipeline import RunReport


def report_with(counts=None, history=None):
    report = RunReport()
    report.counts = counts or {}
    report.iterations_outstanding = history or []
    return report


class TestOcrAccuracy:
    def test_perfect(self):
        assert ocr_accuracy(("A", "B"), ("A", "B")) == 1.0

    def test_half(self):
        assert ocr_accuracy(("A", "B"), ("A",)) == 0.5

    def test_typo_is_not_exact(self):
        assert ocr_accuracy(("SALE",), ("SALF",)) == 0.0

    def test_empty_prompt(self):
        assert ocr_accuracy((), ()) == 1.0
        assert ocr_accuracy((), ("LEFTOVER",)) == 0.0

    def test_permutation_invariant(self):
        base = ocr_accuracy(("A", "B", "C"), ("C", "A"))
        assert ocr_accuracy(("C", "B", "A"), ("A", "C")) == base

    def test_case_policy(self):
        assert ocr_accuracy(("Sale",), ("SALE",)) == 0.0
        assert ocr_accuracy(("Sale",), ("SALE",), case_insensitive=True) == 1.0

    def test_bounded(self):
        value = ocr_accuracy(("A", "B", "C", "D"), ("A", "X", "Y"))
        assert 0.0 <= value <= 1.0


class TestCorpusStats:
    def test_empty(self):
        assert corpus_stats([]) == CorpusStats()

    def test_addition(self):
        reports = [
            report_with(
                {
                    "prompt_words": 3,
                    "detected_words": 1,
                    "surplus_words": 1,
                    "lack_words": 0,
                    "typo_words": 1,
                    "typo_corrected_words": 1,
                }
            ),
            report_with(
                {
                    "prompt_words": 2,
                    "detected_words": 2,
                    "surplus_words": 0,
                    "lack_words": 1,
                    "typo_words": 0,
                    "typo_corrected_words": 0,
                }
            ),
        ]
        stats = corpus_stats(reports)
        assert stats == CorpusStats(
            detected_words=3,
            surplus_words=1,
            lack_words=1,
            typo_words=1,
            typo_corrected_words=1,
            prompt_word_total=5,
        )

    def test_accepts_dict_rows(self):
        rows = [{"counts": {"detected_words": 4, "prompt_words": 2}}]
        stats = corpus_stats(rows)
        assert stats.detected_words == 4 and stats.prompt_word_total == 2

    def test_schema_columns(self):
        stats = corpus_stats([])
        assert set(stats.to_dict()) == {
            "detected_words",
            "surplus_words",
            "lack_words",
            "typo_words",
            "typo_corrected_words",
            "prompt_word_total",
        }


class TestConvergenceCurve:
    def test_perfect_editor_hits_one_at_iteration_one(self):
        rows, skipped = convergence_curve([report_with(history=[5, 0])])
        assert skipped == 0
        assert rows[0] == (1, 1.0)

    def test_hopeless_editor_all_zero(self):
        rows, _ = convergence_curve([report_with(history=[4, 4, 4])])
        assert all(fraction == 0.0 for _, fraction in rows)

    def test_non_decreasing(self):
        rows, _ = convergence_curve(
            [report_with(history=[10, 6, 3, 1, 0]), report_with(history=[8, 8, 2, 2, 1])]
        )
        values = [fraction for _, fraction in rows]
        assert values == sorted(values)

    def test_short_histories_held_at_final_value(self):
        rows, _ = convergence_curve(
            [report_with(history=[2, 0]), report_with(history=[4, 2, 1, 0])]
        )
        assert rows[-1][1] == 1.0

    def test_missing_histories_skipped_with_count(self):
        rows, skipped = convergence_curve([report_with(), report_with(history=[1, 0])])
        assert skipped == 1 and rows

    def test_csv_output(self, tmp_path):
        rows, _ = convergence_curve([report_with(history=[4, 1, 0])])
        path = tmp_path / "curve.csv"
        write_curve_csv(rows, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "iteration,mean_fraction"
        assert len(lines) == len(rows) + 1


class TestEvaluateImage:
    def test_scores_rendered_scene(self):
        from typofix.backends.mocks import MockDetector, MockRecognizer
        from typofix.backends.scene import SyntheticScene, place_word, render_scene
        from typofix.evalharness import evaluate_image

        image = render_scene(
            SyntheticScene(
                200, 120, (place_word("SALE", 10, 10, 3), place_word("NOW", 10, 60, 3)),
                background=(245, 245, 240),
            )
        )
        record = evaluate_image(
            image, ("SALE", "NOW"), MockDetector(), MockRecognizer(), image_id="x"
        )
        assert record.accuracy == 1.0
        assert sorted(record.recognized) == ["NOW", "SALE"]
