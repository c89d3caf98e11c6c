"""typofix: detect and repair typographic errors in text-rendered images.

The pipeline takes an image produced by a text-to-image generator together
with the prompt that requested specific words, finds what was actually
rendered, erases unintended words, plans boxes for missing ones, and
iteratively re-edits misspelled words until they read back correctly.
"""

from typofix.errors import (
    BackendError,
    ConfigError,
    DimensionError,
    PlanningError,
    StageError,
    TypofixError,
)
from typofix.imaging import BBox, Mask, Polygon, RasterImage
from typofix.pipeline import PipelineConfig, RunReport, run

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "BackendError",
    "ConfigError",
    "DimensionError",
    "Mask",
    "PipelineConfig",
    "PlanningError",
    "Polygon",
    "RasterImage",
    "RunReport",
    "StageError",
    "TypofixError",
    "run",
    "__version__",
]
