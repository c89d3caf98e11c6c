"""Acceptance suite: property-based and seeded-simulation checks.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all).
Criteria marked with a time budget assert it.
"""

from __future__ import annotations

import itertools
import time
from contextlib import contextmanager
from functools import lru_cache

import numpy as np

from typofix import evalharness, pipeline
from typofix.backends.mocks import FlakyEditor, MockDetector, MockRecognizer
from typofix.backends.ports import make_ports
from typofix.backends.server import MockBackendServer
from typofix.corpus import generate_corpus
from typofix.errors import PlanningError
from typofix.imaging import BBox, Mask, Polygon, RasterImage, filter_small_regions
from typofix.layoutgen import element_problem, plan_missing
from typofix.wordmatch import PAD, PairKind, WordSet, levenshtein, match


@contextmanager
def criterion(name: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL: {name} ({time.perf_counter() - start:.2f}s)")
        raise
    print(f"PASS: {name} ({time.perf_counter() - start:.2f}s)")


# --- shared oracles -------------------------------------------------------


def oracle_lev(a: str, b: str) -> int:
    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return go(i + 1, j + 1)
        return 1 + min(go(i + 1, j), go(i, j + 1), go(i + 1, j + 1))

    return go(0, 0)


def oracle_min_cost(prompt: list[str], detected: list[str], pad_cost: int) -> int:
    size = max(len(prompt), len(detected))
    if size == 0:
        return 0
    rows = prompt + [PAD] * (size - len(prompt))
    cols = detected + [PAD] * (size - len(detected))
    table = [
        [
            0
            if rows[i] is PAD and cols[j] is PAD
            else pad_cost
            if rows[i] is PAD or cols[j] is PAD
            else oracle_lev(rows[i], cols[j])
            for j in range(size)
        ]
        for i in range(size)
    ]
    return min(
        sum(table[i][p[i]] for i in range(size))
        for p in itertools.permutations(range(size))
    )


def _random_instances(count: int, seed: int):
    rng = np.random.default_rng(seed)
    alphabet = "ABCD"
    instances = []
    for _ in range(count):
        n = int(rng.integers(0, 7))
        n_hat = int(rng.integers(0, 7))
        def word():
            length = int(rng.integers(1, 7))
            return "".join(alphabet[int(rng.integers(0, 4))] for _ in range(length))
        instances.append(([word() for _ in range(n)], [word() for _ in range(n_hat)]))
    return instances


INSTANCES = _random_instances(1000, seed=20240)


# --- criteria --------------------------------------------------------------


def test_assignment_optimality():
    with criterion("assignment optimality on 1000 random instances"):
        start = time.perf_counter()
        for prompt, detected in INSTANCES:
            result = match(WordSet(tuple(prompt)), WordSet(tuple(detected)), pad_cost=10)
            assert result.total_cost == oracle_min_cost(prompt, detected, pad_cost=10)
        assert time.perf_counter() - start < 10.0


def test_taxonomy_cardinality():
    with criterion("taxonomy cardinality under dominant pad cost"):
        for prompt, detected in INSTANCES:
            words = prompt + detected
            max_lev = max((levenshtein(a, b) for a in words for b in words), default=0)
            result = match(
                WordSet(tuple(prompt)), WordSet(tuple(detected)), pad_cost=max_lev + 1
            )
            surplus = sum(1 for p in result.pairs if p.kind is PairKind.SURPLUS)
            missing = sum(1 for p in result.pairs if p.kind is PairKind.MISSING)
            assert surplus == max(0, len(detected) - len(prompt))
            assert missing == max(0, len(prompt) - len(detected))


def test_levenshtein_oracle():
    with criterion("levenshtein equals recursive brute force, all pairs len<=5 over 3 letters"):
        strings = [
            "".join(chars)
            for length in range(6)
            for chars in itertools.product("ABC", repeat=length)
        ]
        assert len(strings) == 364
        for a, b in itertools.combinations_with_replacement(strings, 2):
            expected = oracle_lev(a, b)
            assert levenshtein(a, b) == expected
            assert levenshtein(b, a) == expected


def test_filter_threshold():
    with criterion("height filter is strict-less at theta=0.04, H=100"):
        regions = {h: Polygon.from_rect(0, 0, 30, h) for h in range(1, 11)}
        kept, removed = filter_small_regions(list(regions.values()), 0.04, 100)
        removed_heights = {int(p.vertices[2][1]) for p in removed}
        kept_heights = {int(p.vertices[2][1]) for p in kept}
        assert removed_heights == {1, 2, 3}
        assert kept_heights == {4, 5, 6, 7, 8, 9, 10}  # boundary height 4 stays


def test_pixel_conservatism(corpus_records):
    with criterion("pixel conservatism outside removal and target boxes, 50 scenes"):
        start = time.perf_counter()
        config = pipeline.PipelineConfig(seed=7)
        for record in corpus_records:
            image = record.render()
            ports = make_ports(
                {"editor": "mock:editor?p=0.7"}, seed=7, image_id=record.image_id
            )
            out, report = pipeline.run(image, record.prompt, config, ports, record.image_id)
            allowed = [
                BBox(b["left"], b["top"], b["width"], b["height"])
                for b in report.removal_boxes + report.target_boxes
            ]
            outside = ~Mask.from_boxes(image.width, image.height, allowed).bits
            assert np.array_equal(out.array[outside], image.array[outside]), record.image_id
        assert time.perf_counter() - start < 30.0


def test_end_to_end_perfection(corpus_records):
    with criterion("end-to-end perfection with perfect editor on 50-scene corpus"):
        config = pipeline.PipelineConfig(seed=7)
        eval_detector, eval_recognizer = MockDetector(), MockRecognizer()
        reports = []
        for record in corpus_records:
            image = record.render()
            ports = make_ports(
                {"editor": "mock:editor?p=1.0"}, seed=7, image_id=record.image_id
            )
            out, report = pipeline.run(image, record.prompt, config, ports, record.image_id)
            reports.append(report)
            assert report.final_uncorrected == [], record.image_id
            assert report.unplaceable_words == [], record.image_id
            evaluated = evalharness.evaluate_image(
                out,
                record.truth["targets"],
                eval_detector,
                eval_recognizer,
                image_id=record.image_id,
            )
            assert evaluated.accuracy == 1.0, (record.image_id, evaluated.recognized)
        # pipeline-reported statistics equal the constructed ground truth
        stats = evalharness.corpus_stats(reports)
        expected = {"prompt_words": 0, "detected_words": 0, "surplus_words": 0,
                    "lack_words": 0, "typo_words": 0, "typo_corrected_words": 0}
        for record in corpus_records:
            for key in expected:
                expected[key] += record.truth["expected_counts"][key]
        assert stats.detected_words == expected["detected_words"]
        assert stats.surplus_words == expected["surplus_words"]
        assert stats.lack_words == expected["lack_words"]
        assert stats.typo_words == expected["typo_words"]
        assert stats.typo_corrected_words == expected["typo_corrected_words"]
        assert stats.prompt_word_total == expected["prompt_words"]


def test_correction_convergence():
    with criterion("correction loop reaches 80% of total improvement by iteration 4"):
        start = time.perf_counter()
        rng = np.random.default_rng(99)
        alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        targets = []
        for i in range(200):
            row, col = divmod(i, 10)
            word = "".join(alphabet[int(rng.integers(0, 26))] for _ in range(4))
            targets.append((BBox(2 + col * 46, 2 + row * 16, 44, 12), word))
        image = RasterImage.new(2 + 10 * 46, 2 + 20 * 16, (240, 240, 240))
        config = pipeline.PipelineConfig(t_max=10, seed=0)
        editor = FlakyEditor(p=0.4, seed=123)
        _, history, _ = pipeline.typo_correct(
            image, targets, editor, MockRecognizer(), config
        )
        assert all(a >= b for a, b in zip(history, history[1:])), history
        total = history[0] - history[-1]
        assert total > 0
        corrected_at_4 = history[0] - history[min(4, len(history) - 1)]
        assert corrected_at_4 / total >= 0.80, history
        assert time.perf_counter() - start < 60.0


def test_layout_robustness():
    with criterion("byzantine planner always yields valid fallback or planning error"):
        rng = np.random.default_rng(7)
        image = RasterImage.new(256, 256, (250, 250, 250))

        class Byzantine:
            def __init__(self):
                self.calls = 0

            def plan(self, image, existing, missing):
                self.calls += 1
                kind = int(rng.integers(0, 7))
                if kind == 0:
                    raise RuntimeError("corrupt response")
                if kind == 1:
                    return {"not": "a list"}
                if kind == 2:
                    return [{"word": missing[0] if missing else "x"}]
                if kind == 3:
                    return [
                        {
                            "word": w,
                            "width": int(rng.integers(-200, 400)),
                            "height": int(rng.integers(-200, 400)),
                            "left": int(rng.integers(-200, 400)),
                            "top": int(rng.integers(-200, 400)),
                        }
                        for w in missing
                    ]
                if kind == 4:
                    return []
                if kind == 5:
                    return [
                        {"word": "EXTRA", "width": 10, "height": 10, "left": 0, "top": 0}
                    ]
                return 42

        for case in range(100):
            planner = Byzantine()
            missing = [f"W{case}", "SECOND"][: 1 + case % 2]
            # every fifth case leaves no canvas space, forcing the error path
            existing = [BBox(0, 0, 256, 250)] if case % 5 == 0 else []
            retries = case % 4
            try:
                layout = plan_missing(image, existing, missing, planner, retries=retries)
                assert layout.source == "fallback"
                assert [e.word for e in layout.elements] == missing
                assert all(element_problem(e.to_json()) is None for e in layout.elements)
            except PlanningError as err:
                assert err.unplaceable
            assert planner.calls <= retries + 1


def test_determinism_and_protocol_transparency(tmp_path, corpus_records):
    with criterion("in-process and served mocks produce bit-identical runs"):
        from typofix.cli import main
        from typofix.corpus import write_corpus

        corpus_dir = tmp_path / "corpus"
        write_corpus(corpus_dir, 50, seed=7)

        local_out = tmp_path / "local"
        code = main(
            [
                "batch",
                str(corpus_dir / "manifest.jsonl"),
                "--out",
                str(local_out),
                "--seed",
                "7",
                "--workers",
                "4",
                "--endpoint.editor=mock:editor?p=0.7",
            ]
        )
        assert code == 0

        server = MockBackendServer(port=0, editor_p=0.7, seed=0)
        server.start()
        try:
            remote_out = tmp_path / "remote"
            args = [
                "batch",
                str(corpus_dir / "manifest.jsonl"),
                "--out",
                str(remote_out),
                "--seed",
                "7",
                "--workers",
                "2",
            ]
            args += [
                f"--endpoint.{name}={server.address}"
                for name in ("detector", "recognizer", "eraser", "planner", "editor")
            ]
            code = main(args)
            assert code == 0
        finally:
            server.stop()

        local_reports = (local_out / "reports.jsonl").read_bytes()
        remote_reports = (remote_out / "reports.jsonl").read_bytes()
        assert local_reports == remote_reports
        for png in sorted(p.name for p in local_out.glob("*.png")):
            assert (local_out / png).read_bytes() == (remote_out / png).read_bytes(), png


def test_statistics_schema():
    with criterion("corpus statistics reproduce the five-column schema exactly"):
        rows = [
            {
                "counts": {
                    "prompt_words": 3,
                    "detected_words": 1,
                    "surplus_words": 1,
                    "lack_words": 0,
                    "typo_words": 1,
                    "typo_corrected_words": 1,
                }
            },
            {
                "counts": {
                    "prompt_words": 2,
                    "detected_words": 2,
                    "surplus_words": 0,
                    "lack_words": 1,
                    "typo_words": 0,
                    "typo_corrected_words": 0,
                }
            },
        ]
        stats = evalharness.corpus_stats(rows)
        assert stats.to_dict() == {
            "detected_words": 3,
            "surplus_words": 1,
            "lack_words": 1,
            "typo_words": 1,
            "typo_corrected_words": 1,
            "prompt_word_total": 5,
        }
        assert tuple(evalharness.STAT_COLUMNS) == (
            "detected_words",
            "surplus_words",
            "lack_words",
            "typo_words",
            "typo_corrected_words",
        )
        # constructed corpus: sums must equal generator ground truth
        records = generate_corpus(25, seed=13)
        constructed = [
            {"counts": dict(record.truth["expected_counts"])} for record in records
        ]
        stats = evalharness.corpus_stats(constructed)
        assert stats.detected_words == sum(
            r.truth["expected_counts"]["detected_words"] for r in records
        )
        assert stats.typo_words == sum(
            r.truth["expected_counts"]["typo_words"] for r in records
        )
