"""Word-set matching: edit distance, padding, optimal assignment, error taxonomy.

The prompt's words and the words actually found in the image are equalized
with padding tokens and matched one-to-one by minimum total cost, where a
word/word pair costs its Levenshtein distance, a word/padding pair costs a
constant, and a padding/padding pair is free. The matched pairs classify
every detected word as exact, a typo, or surplus, and every unmatched prompt
word as missing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

__all__ = [
    "PAD",
    "ErrorReport",
    "MatchPair",
    "MatchResult",
    "PadToken",
    "PaddedWordSet",
    "PairKind",
    "WordSet",
    "classify",
    "equalize",
    "levenshtein",
    "match",
    "solve_assignment",
]


class PadToken:
    """Singleton marker for a padding slot in a matching."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "PAD"


PAD = PadToken()


@dataclass(frozen=True)
class WordSet:
    """Ordered list of non-empty, space-free words. Duplicates are kept:
    matching treats them as distinct slots."""

    words: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        for word in self.words:
            if not word:
                raise ValueError("words must be non-empty")
            if " " in word:
                raise ValueError(f"words must not contain spaces: {word!r}")

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __getitem__(self, i: int) -> str:
        return self.words[i]


@dataclass(frozen=True)
class PaddedWordSet:
    """A word set plus enough padding tokens to reach the common size of a
    matched pair of sets."""

    words: WordSet
    pad_count: int

    def __post_init__(self):
        if self.pad_count < 0:
            raise ValueError("pad_count must be >= 0")

    @property
    def size(self) -> int:
        return len(self.words) + self.pad_count

    def slot(self, i: int) -> str | PadToken:
        """Word at slot ``i``, or PAD for slots past the real words."""
        return self.words[i] if i < len(self.words) else PAD


class PairKind(enum.Enum):
    EXACT = "exact"
    TYPO = "typo"
    SURPLUS = "surplus"
    MISSING = "missing"
    PAD_PAD = "pad-pad"


@dataclass(frozen=True)
class MatchPair:
    """One edge of the matching. ``None`` on a side means that slot is padding."""

    prompt_index: int | None
    detected_index: int | None
    cost: int
    kind: PairKind


@dataclass(frozen=True)
class MatchResult:
    """A perfect matching over the padded sets, minimum total cost."""

    pairs: tuple[MatchPair, ...]
    total_cost: int


@dataclass(frozen=True)
class ErrorReport:
    """The matching read as actions: erase surplus, place missing, re-edit typos.

    ``surplus``/``typos``/``exact`` index into the detected word list and
    are mutually disjoint, together covering every detected index.
    """

    surplus: tuple[int, ...]
    missing: tuple[str, ...]
    typos: tuple[tuple[int, str], ...]
    exact: tuple[tuple[int, str], ...]
    missing_indices: tuple[int, ...] = field(default=())


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # delete
                    current[j - 1] + 1,  # insert
                    previous[j - 1] + (ca != cb),  # substitute
                )
            )
        previous = current
    return previous[-1]


def equalize(prompt: WordSet, detected: WordSet) -> tuple[PaddedWordSet, PaddedWordSet]:
    """Pad the smaller set so both reach size ``max(N, N_hat)``."""
    size = max(len(prompt), len(detected))
    return (
        PaddedWordSet(prompt, size - len(prompt)),
        PaddedWordSet(detected, size - len(detected)),
    )


def solve_assignment(cost: list[list[int]]) -> list[int]:
    """Minimum-cost perfect matching on a square integer matrix.

    Returns ``assignment`` with ``assignment[row] = column``. Hungarian
    algorithm with row/column potentials and shortest augmenting paths,
    cubic time. Exact integer arithmetic throughout, so arbitrarily large
    tie-breaking offsets are safe.
    """
    n = len(cost)
    if n == 0:
        return []
    for row in cost:
        if len(row) != n:
            raise ValueError("cost matrix must be square")

    inf = max(max(row) for row in cost) * n + 1
    # 1-indexed potentials; p[j] is the row matched to column j.
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            assignment[p[j] - 1] = j - 1
    return assignment


def _pair_cost(a: str | PadToken, b: str | PadToken, pad_cost: int, case_insensitive: bool) -> int:
    a_pad = isinstance(a, PadToken)
    b_pad = isinstance(b, PadToken)
    if a_pad and b_pad:
        return 0
    if a_pad or b_pad:
        return pad_cost
    if case_insensitive:
        return levenshtein(a.casefold(), b.casefold())
    return levenshtein(a, b)


def _kind_of(prompt_index: int | None, detected_index: int | None, cost: int) -> PairKind:
    if prompt_index is None and detected_index is None:
        return PairKind.PAD_PAD
    if prompt_index is None:
        return PairKind.SURPLUS
    if detected_index is None:
        return PairKind.MISSING
    return PairKind.EXACT if cost == 0 else PairKind.TYPO


def match(
    prompt: WordSet,
    detected: WordSet,
    pad_cost: int = 10,
    case_insensitive: bool = False,
) -> MatchResult:
    """Minimum-cost perfect matching between the equalized word sets.

    Ties between equal-cost matchings are broken toward the lexicographically
    smallest (prompt slot, detected slot) pairing, which makes the result a
    pure function of its inputs. The tie-break is folded into the solver by
    scaling: with ``n`` slots, slot preferences are encoded base ``n + 1``
    below the cost scale, so they can never override a genuine cost
    difference.
    """
    if pad_cost < 1:
        raise ValueError(f"pad_cost must be >= 1, got {pad_cost}")
    padded_prompt, padded_detected = equalize(prompt, detected)
    n = padded_prompt.size
    if n == 0:
        return MatchResult(pairs=(), total_cost=0)

    base = [
        [
            _pair_cost(padded_prompt.slot(i), padded_detected.slot(j), pad_cost, case_insensitive)
            for j in range(n)
        ]
        for i in range(n)
    ]
    scale = (n + 1) ** n
    weighted = [
        [base[i][j] * scale + j * (n + 1) ** (n - 1 - i) for j in range(n)] for i in range(n)
    ]
    assignment = solve_assignment(weighted)

    pairs = []
    total = 0
    for i, j in enumerate(assignment):
        cost = base[i][j]
        prompt_index = i if i < len(prompt) else None
        detected_index = j if j < len(detected) else None
        kind = _kind_of(prompt_index, detected_index, cost)
        pairs.append(MatchPair(prompt_index, detected_index, cost, kind))
        total += cost
    return MatchResult(pairs=tuple(pairs), total_cost=total)


def classify(result: MatchResult, prompt: WordSet, detected: WordSet) -> ErrorReport:
    """Partition detected indices into exact/typo/surplus and list the missing
    prompt words. Padding/padding pairs carry no information and are dropped."""
    surplus: list[int] = []
    missing: list[tuple[int, str]] = []
    typos: list[tuple[int, str]] = []
    exact: list[tuple[int, str]] = []
    for pair in result.pairs:
        if pair.kind is PairKind.PAD_PAD:
            continue
        if pair.kind is PairKind.SURPLUS:
            surplus.append(pair.detected_index)
        elif pair.kind is PairKind.MISSING:
            missing.append((pair.prompt_index, prompt[pair.prompt_index]))
        elif pair.kind is PairKind.TYPO:
            typos.append((pair.detected_index, prompt[pair.prompt_index]))
        else:
            exact.append((pair.detected_index, prompt[pair.prompt_index]))
    surplus.sort()
    missing.sort()
    typos.sort()
    exact.sort()
    return ErrorReport(
        surplus=tuple(surplus),
        missing=tuple(word for _, word in missing),
        typos=tuple(typos),
        exact=tuple(exact),
        missing_indices=tuple(i for i, _ in missing),
    )
