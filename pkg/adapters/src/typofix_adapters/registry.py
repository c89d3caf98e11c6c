"""Model registry: map (port, name) to a loaded model instance."""

from __future__ import annotations

from typofix_adapters import reference, zoo
from typofix_adapters.config import PORTS, AdapterConfig
from typofix_adapters.errors import ModelUnavailableError, StartupError

REGISTRY: dict[str, dict[str, type]] = {
    "detector": {
        "reference": reference.ReferenceDetector,
        "paddle": zoo.PaddleDetector,
        "deepsolo": zoo.DeepSoloDetector,
        "craft": zoo.CraftDetector,
        "hi-sam": zoo.HiSamDetector,
        "mask-textspotter": zoo.MaskTextSpotterDetector,
    },
    "recognizer": {
        "reference": reference.ReferenceRecognizer,
        "paddle": zoo.PaddleRecognizer,
        "trocr": zoo.TrOCRRecognizer,
        "clip4str": zoo.Clip4strRecognizer,
        "baek": zoo.BaekRecognizer,
    },
    "eraser": {
        "reference": reference.ReferenceEraser,
        "lama": zoo.LamaEraser,
        "garnet": zoo.GarnetEraser,
    },
    "planner": {
        "reference": reference.ReferencePlanner,
        "openai": zoo.OpenAIPlanner,
    },
    "editor": {
        "reference": reference.ReferenceEditor,
        "anytext": zoo.AnyTextEditor,
        "udifftext": zoo.UDiffTextEditor,
        "mostel": zoo.MostelEditor,
        "textctrl": zoo.TextCtrlEditor,
    },
    "augmenter": {
        "reference": reference.ReferenceAugmenter,
        "openai": zoo.OpenAIAugmenter,
    },
}


def available_models(port: str) -> list[str]:
    return sorted(REGISTRY[port])


def load_model(port: str, name: str, device: str = "cpu"):
    try:
        factory = REGISTRY[port][name]
    except KeyError:
        raise ModelUnavailableError(
            name, f"no such {port} model; choose one of {available_models(port)}"
        )
    try:
        return factory(device=device)
    except TypeError:
        return factory()


def build_models(config: AdapterConfig) -> dict[str, object]:
    """Load one model per enabled port; collect every failure before refusing."""
    models: dict[str, object] = {}
    failures: dict[str, str] = {}
    for port in PORTS:
        if port not in config.ports:
            continue
        try:
            models[port] = load_model(port, config.model_for(port), config.device)
        except ModelUnavailableError as exc:
            failures[port] = str(exc)
    if failures:
        raise StartupError(failures)
    return models
