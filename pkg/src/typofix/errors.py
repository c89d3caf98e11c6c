"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TypofixError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TypofixError):
    """Invalid configuration value, file, or endpoint specification."""


class DimensionError(TypofixError):
    """Images or masks with mismatched dimensions were combined."""


class GlyphError(TypofixError):
    """A word contains a character outside the built-in glyph set."""

    def __init__(self, char: str, word: str) -> None:
        super().__init__(f"no glyph for character {char!r} in word {word!r}")
        self.char = char
        self.word = word


class BackendError(TypofixError):
    """A model backend failed after exhausting its retry budget."""

    def __init__(self, port: str, message: str) -> None:
        super().__init__(f"backend {port!r}: {message}")
        self.port = port


class PlanningError(TypofixError):
    """Layout planning could not place every missing word.

    Carries whatever partial layout was produced so callers can degrade
    gracefully instead of dropping all placements.
    """

    def __init__(self, unplaceable: list[str], placed=None) -> None:
        super().__init__(f"no canvas space for words: {unplaceable}")
        self.unplaceable = list(unplaceable)
        self.placed = placed


class StageError(TypofixError):
    """A pipeline stage failed; carries the partial run state."""

    def __init__(self, stage: str, message: str, partial_report=None) -> None:
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage
        self.partial_report = partial_report
