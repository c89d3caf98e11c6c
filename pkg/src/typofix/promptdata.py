"""Accessors for the shipped prompt text files.

``layout_system`` is the instruction a vision-language planner receives with
every layout request; ``augment_system`` drives prompt augmentation; the two
``rating_*`` prompts define the image-rating criteria for a Rater port.
Executing a rater is outside this package; the port is only a contract.
"""

from __future__ import annotations

from importlib import resources
from typing import Protocol

_FILES = {
    "augment_system": "augment_system_prompt.txt",
    "layout_system": "layout_system_prompt.txt",
    "rating_graphic": "rating_graphic_prompt.txt",
    "rating_match": "rating_match_prompt.txt",
}


def load_prompt(name: str) -> str:
    """Return one of the shipped prompt texts by short name."""
    try:
        filename = _FILES[name]
    except KeyError:
        raise KeyError(f"unknown prompt {name!r}; expected one of {sorted(_FILES)}")
    return resources.files("typofix").joinpath(f"data/{filename}").read_text("utf-8")


class Rater(Protocol):
    """Scores an image 1..10 against one of the rating criteria."""

    def rate(self, image, criterion: str) -> float: ...
