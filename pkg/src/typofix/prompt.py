"""Target-word extraction from prompts and the template fallback for augmentation.

Words the image must show are marked by enclosing them in single or double
quotes inside the prompt. Spans are matched per quote character, non-greedy,
with no nesting; an unpaired quote is ignored with a warning.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from typofix.wordmatch import WordSet

QUOTE_CHARS = ("'", '"')

FALLBACK_TEMPLATE = 'Draw a picture about {prompt} with the large text "{text}"'


@dataclass(frozen=True)
class PromptSpec:
    """A prompt plus the words its quoted spans request, in order."""

    raw: str
    targets: WordSet
    spans: tuple[tuple[int, int], ...]
    warnings: tuple[str, ...] = field(default=())


def _quoted_spans(text: str) -> tuple[list[tuple[int, int]], list[str]]:
    """Character ranges of the *contents* of quoted spans, scanning left to
    right. An opening quote with no closing partner is skipped."""
    spans: list[tuple[int, int]] = []
    warnings: list[str] = []
    pos = 0
    while pos < len(text):
        opens = [(text.find(ch, pos), ch) for ch in QUOTE_CHARS]
        opens = [(i, ch) for i, ch in opens if i != -1]
        if not opens:
            break
        start, quote = min(opens)
        end = text.find(quote, start + 1)
        if end == -1:
            warnings.append(f"unpaired {quote} at index {start} ignored")
            pos = start + 1
            continue
        spans.append((start + 1, end))
        pos = end + 1
    return spans, warnings


def extract_targets(prompt: str) -> PromptSpec:
    """Collect the words inside all quoted spans of a prompt.

    Span contents are concatenated in order and split on runs of spaces;
    empty tokens are dropped. A prompt without quoted spans yields an empty
    target list (the pipeline then treats every detected word as surplus).
    """
    spans, warnings = _quoted_spans(prompt)
    joined = " ".join(prompt[start:end] for start, end in spans)
    words = [token for token in joined.split(" ") if token]
    return PromptSpec(
        raw=prompt,
        targets=WordSet(tuple(words)),
        spans=tuple(spans),
        warnings=tuple(warnings),
    )


def fallback_augment(prompt: str, targets: WordSet) -> str:
    """Deterministic augmentation template used once retries are exhausted.

    The original prompt is inlined with its quote characters stripped, and
    the target words are re-quoted as one double-quoted span at the end, so
    the output always validates.
    """
    stripped = "".join(ch for ch in prompt if ch not in QUOTE_CHARS)
    return FALLBACK_TEMPLATE.format(prompt=stripped, text=" ".join(targets))


def validate_augmented(augmented: str, targets: WordSet) -> bool:
    """True iff every target word appears inside a quoted span of ``augmented``.

    This is a span check, not a substring check: a target mentioned outside
    quotes does not count. Duplicated targets need matching multiplicity.
    """
    quoted = extract_targets(augmented).targets
    available = Counter(quoted)
    needed = Counter(targets)
    return all(available[word] >= count for word, count in needed.items())


def augment_with_retries(prompt: str, augmenter, retries: int = 5) -> str:
    """Ask an augmenter port to rewrite the prompt, keeping the quoted targets.

    Invalid or failing responses are retried up to ``retries`` times; after
    that the template fallback is used. The target words come from the
    original prompt's quoted spans.
    """
    targets = extract_targets(prompt).targets
    for _ in range(max(retries, 0) + 1):
        try:
            candidate = augmenter.augment(prompt)
        except Exception:
            continue
        if isinstance(candidate, str) and validate_augmented(candidate, targets):
            return candidate
    return fallback_augment(prompt, targets)
