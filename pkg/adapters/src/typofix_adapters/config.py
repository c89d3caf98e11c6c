from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

PORTS = ("detector", "recognizer", "eraser", "planner", "editor", "augmenter")

DEFAULT_MAX_REQUEST_BYTES = 16 * 1024 * 1024


@dataclass(frozen=True)
class AdapterConfig:
    """Per-port model selection plus service limits.

    Model names resolve through :mod:`typofix_adapters.registry`; every
    enabled port maps to exactly one loaded model. ``device`` is passed to
    models that accept one ("cpu" or "cuda").
    """

    detector: str = "reference"
    recognizer: str = "reference"
    eraser: str = "reference"
    planner: str = "reference"
    editor: str = "reference"
    augmenter: str = "reference"
    device: str = "cpu"
    max_request_bytes: int = DEFAULT_MAX_REQUEST_BYTES
    ports: tuple[str, ...] = field(default=PORTS)

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))
        unknown = set(self.ports) - set(PORTS)
        if unknown:
            raise ValueError(f"unknown ports {sorted(unknown)}; expected subset of {PORTS}")
        if self.max_request_bytes < 1024:
            raise ValueError("max_request_bytes must be at least 1 KiB")

    def model_for(self, port: str) -> str:
        return getattr(self, port)

    @classmethod
    def from_dict(cls, data: dict) -> "AdapterConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "AdapterConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))
