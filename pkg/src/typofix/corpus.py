"""Seeded synthetic corpora with a controlled error mix.

Each scene renders a prompt's target words with injected errors (a surplus
word, a dropped word, a one-character corruption) and records both the raw
injection and the error counts the matching taxonomy implies for it, so
end-to-end runs can be checked against constructed ground truth.

Note one arithmetic consequence of padding-based matching: when a scene has
both a surplus and a missing word, the word counts are equal, there are no
padding slots, and the pair is necessarily reported as one typo (the surplus
word's box is re-edited into the missing word). ``expected_counts`` accounts
for that.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from typofix.backends import font
from typofix.backends.scene import Placement, SyntheticScene, place_word, render_scene
from typofix.imaging import RasterImage
from typofix.wordmatch import levenshtein

# Pairwise Levenshtein distance of at least 3 keeps the optimal matching from
# pairing a corrupted word with the wrong target (a unit test enforces this).
LEXICON = (
    "SALE", "OPEN", "FRESH", "COFFEE", "MUSIC", "PARTY", "TONIGHT", "SUMMER",
    "DESIGN", "MARKET", "WORLD", "DREAM", "PIZZA", "BURGER", "RADIO", "VINYL",
    "STUDIO", "GRAND", "ROYAL", "ULTRA", "PIXEL", "LIGHT", "GALAXY", "RIVER",
    "CLOUD", "STONE", "BLOOM", "CRISP", "EMBER", "QUARTZ", "VELVET", "HARBOR",
)

PROMPT_TEMPLATES = (
    'a poster with the text "{}"',
    'a shop sign saying "{}"',
    "a flyer that reads '{}'",
    'minimal cover design, large text "{}"',
)

BACKGROUNDS = (
    (245, 245, 240),
    (230, 240, 250),
    (250, 235, 225),
    (236, 248, 235),
    (238, 234, 246),
    (252, 247, 229),
)


@dataclass(frozen=True)
class ErrorMix:
    """Per-scene probabilities of injecting each error kind."""

    surplus_rate: float = 0.5
    missing_rate: float = 0.3
    typo_rate: float = 0.5


@dataclass(frozen=True)
class SceneRecord:
    """One generated scene plus its ground truth."""

    image_id: str
    scene: SyntheticScene
    prompt: str
    truth: dict

    def render(self) -> RasterImage:
        return render_scene(self.scene)


def _corrupt(word: str, rng: np.random.Generator, forbidden: set[str]) -> str | None:
    for _ in range(20):
        position = int(rng.integers(0, len(word)))
        choices = [c for c in font.SUBSTITUTION_CHARS if c != word[position]]
        substitute = choices[int(rng.integers(0, len(choices)))]
        candidate = word[:position] + substitute + word[position + 1 :]
        if candidate not in forbidden:
            return candidate
    return None


def _expected_counts(
    n_rendered: int, n_targets: int, injected_typos: int, surplus: bool, missing: bool
) -> dict:
    # Padding slots exist only for the cardinality gap, so a surplus and a
    # missing word in the same scene must pair with each other as a typo.
    both = surplus and missing
    return {
        "prompt_words": n_targets,
        "detected_words": n_rendered,
        "surplus_words": 1 if surplus and not both else 0,
        "lack_words": 1 if missing and not both else 0,
        "typo_words": injected_typos + (1 if both else 0),
    }


def generate_scene(
    index: int, seed: int, mix: ErrorMix, size: int = 256
) -> SceneRecord:
    """Build scene ``index`` of a corpus; deterministic in (index, seed, mix)."""
    rng = np.random.default_rng([seed & (2**63 - 1), index])
    background = BACKGROUNDS[int(rng.integers(0, len(BACKGROUNDS)))]
    template = PROMPT_TEMPLATES[int(rng.integers(0, len(PROMPT_TEMPLATES)))]
    n_targets = int(rng.integers(2, 5))
    targets = [LEXICON[i] for i in rng.choice(len(LEXICON), size=n_targets, replace=False)]

    inject_typo = bool(rng.random() < mix.typo_rate)
    inject_missing = bool(rng.random() < mix.missing_rate)
    inject_surplus = bool(rng.random() < mix.surplus_rate)

    missing_word = None
    rendered = list(targets)
    if inject_missing:
        missing_word = rendered.pop(int(rng.integers(0, len(rendered))))

    typo_pair = None
    if inject_typo and rendered:
        victim = int(rng.integers(0, len(rendered)))
        corrupted = _corrupt(rendered[victim], rng, forbidden=set(targets) | set(rendered))
        if corrupted is not None:
            typo_pair = (corrupted, rendered[victim])
            rendered[victim] = corrupted
        else:
            inject_typo = False

    surplus_word = None
    if inject_surplus:
        # When the scene also lacks a word, this box will be re-edited into
        # the missing word, so it must be at least as long to fit the render.
        min_len = len(missing_word) if missing_word else 0
        pool = [
            w
            for w in LEXICON
            if w not in targets and w not in rendered and len(w) >= min_len
        ]
        if pool:
            surplus_word = pool[int(rng.integers(0, len(pool)))]
            rendered.insert(int(rng.integers(0, len(rendered) + 1)), surplus_word)
        else:
            inject_surplus = False

    margin = 6
    placements: list[Placement] = []
    top = margin
    for word in rendered:
        scale = int(rng.integers(2, 5))
        width, height = font.word_extent(word, scale)
        while width > size - 2 * margin and scale > 2:
            scale -= 1
            width, height = font.word_extent(word, scale)
        left = int(rng.integers(margin, size - margin - width + 1))
        placements.append(place_word(word, left, top, scale))
        top += height + int(rng.integers(6, 13))

    scene = SyntheticScene(
        width=size,
        height=size,
        placements=tuple(placements),
        background=background,
        seed=seed,
    )
    prompt = template.format(" ".join(targets))
    counts = _expected_counts(
        len(rendered), len(targets), 1 if typo_pair else 0, inject_surplus, inject_missing
    )
    counts["typo_corrected_words"] = counts["typo_words"] + counts["lack_words"]
    truth = {
        "targets": targets,
        "rendered": [
            {"word": p.word, "left": p.box.left, "top": p.box.top, "scale": p.scale}
            for p in placements
        ],
        "surplus": [surplus_word] if surplus_word else [],
        "missing": [missing_word] if missing_word else [],
        "typos": [{"rendered": typo_pair[0], "target": typo_pair[1]}] if typo_pair else [],
        "expected_counts": counts,
    }
    return SceneRecord(
        image_id=f"scene_{index:03d}", scene=scene, prompt=prompt, truth=truth
    )


def generate_corpus(
    count: int, seed: int, mix: ErrorMix | None = None, size: int = 256
) -> list[SceneRecord]:
    mix = mix or ErrorMix()
    return [generate_scene(i, seed, mix, size) for i in range(count)]


def write_corpus(
    out_dir: str | Path,
    count: int,
    seed: int,
    mix: ErrorMix | None = None,
    size: int = 256,
) -> list[SceneRecord]:
    """Write PNGs, per-scene ground truth, and a batch manifest. Byte-identical
    for identical arguments."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = generate_corpus(count, seed, mix, size)
    manifest_rows = []
    for record in records:
        record.render().to_png(out / f"{record.image_id}.png")
        truth_path = out / f"{record.image_id}.truth.json"
        truth_path.write_text(json.dumps(record.truth, sort_keys=True, indent=2) + "\n")
        manifest_rows.append({"image": f"{record.image_id}.png", "prompt": record.prompt})
    with open(out / "manifest.jsonl", "w") as handle:
        for row in manifest_rows:
            handle.write(json.dumps(row, sort_keys=True) + "\n")
    summary = {
        "count": count,
        "seed": seed,
        "size": size,
        "mix": {
            "surplus_rate": (mix or ErrorMix()).surplus_rate,
            "missing_rate": (mix or ErrorMix()).missing_rate,
            "typo_rate": (mix or ErrorMix()).typo_rate,
        },
        "expected_totals": _totals(records),
    }
    (out / "corpus.json").write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return records


def _totals(records: list[SceneRecord]) -> dict:
    keys = (
        "prompt_words",
        "detected_words",
        "surplus_words",
        "lack_words",
        "typo_words",
        "typo_corrected_words",
    )
    totals = {key: 0 for key in keys}
    for record in records:
        for key in keys:
            totals[key] += record.truth["expected_counts"][key]
    return totals
