from __future__ import annotations


class AdapterError(Exception):
    """Base class for adapter failures."""


class ModelUnavailableError(AdapterError):
    """A selected model cannot be loaded in this environment."""

    def __init__(self, model: str, reason: str) -> None:
        super().__init__(f"model {model!r} unavailable: {reason}")
        self.model = model
        self.reason = reason


class StartupError(AdapterError):
    """The service refused to start; lists every port whose model failed."""

    def __init__(self, failures: dict[str, str]) -> None:
        lines = ", ".join(f"{port}: {reason}" for port, reason in sorted(failures.items()))
        super().__init__(f"cannot start, model load failed for {lines}")
        self.failures = dict(failures)
