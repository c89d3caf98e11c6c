"""Wrappers for heavyweight third-party models, loaded lazily.

Each loader imports its dependency at call time and raises
:class:`ModelUnavailableError` with an actionable message when the package
or its weights are absent, so the service can refuse startup naming the
port instead of crashing mid-request. Pre/post-processing follows each
model's own documentation.
"""

from __future__ import annotations

import json
import os
import re
from importlib import resources

import numpy as np

from typofix_adapters.errors import ModelUnavailableError
from typofix_adapters.wire import encode_image


def _require(module: str, model: str, hint: str):
    import importlib

    try:
        return importlib.import_module(module)
    except ImportError as exc:
        raise ModelUnavailableError(model, f"{exc}; install with {hint}")


class PaddleDetector:
    """Scene-text detection via PaddleOCR's DB detector."""

    def __init__(self, device: str = "cpu") -> None:
        paddleocr = _require("paddleocr", "paddle-detector", "pip install paddleocr")
        self._engine = paddleocr.PaddleOCR(
            use_angle_cls=False, det=True, rec=False, lang="en", use_gpu=device == "cuda"
        )

    def detect(self, image: np.ndarray) -> list[list[list[float]]]:
        result = self._engine.ocr(image[:, :, ::-1], det=True, rec=False)
        boxes = result[0] if result else []
        return [[[float(x), float(y)] for x, y in quad] for quad in boxes]


class PaddleRecognizer:
    """Scene-text recognition via PaddleOCR's CRNN/SVTR recognizer."""

    def __init__(self, device: str = "cpu") -> None:
        paddleocr = _require("paddleocr", "paddle-recognizer", "pip install paddleocr")
        self._engine = paddleocr.PaddleOCR(
            use_angle_cls=False, det=False, rec=True, lang="en", use_gpu=device == "cuda"
        )

    def recognize(self, image: np.ndarray, polygons: list[list[list[float]]]) -> list[str]:
        from typofix_adapters.wire import polygon_bbox

        height, width = image.shape[:2]
        words = []
        for polygon in polygons:
            left, top, right, bottom = polygon_bbox(polygon, width, height)
            crop = image[top:bottom, left:right, ::-1]
            result = self._engine.ocr(crop, det=False, rec=True)
            text = result[0][0][0] if result and result[0] else ""
            words.append(text)
        return words


def _unavailable(model: str, package: str, hint: str):
    class _Stub:
        def __init__(self, device: str = "cpu") -> None:
            _require(package, model, hint)

    _Stub.__name__ = model
    return _Stub


# Detection/recognition/erasing/editing zoo entries whose packages publish no
# pip distribution ship as named stubs: selecting one without its dependency
# installed fails at startup with the port name and an install hint.
DeepSoloDetector = _unavailable("deepsolo", "adet", "the DeepSolo release (detectron2-based)")
CraftDetector = _unavailable("craft", "craft_text_detector", "pip install craft-text-detector")
HiSamDetector = _unavailable("hi-sam", "hi_sam", "the Hi-SAM release")
MaskTextSpotterDetector = _unavailable("mask-textspotter", "masktextspotter", "the Mask TextSpotter v3 release")
TrOCRRecognizer = _unavailable("trocr", "transformers_trocr_weights", "transformers plus TrOCR weights")
Clip4strRecognizer = _unavailable("clip4str", "clip4str", "the CLIP4STR release")
BaekRecognizer = _unavailable("baek", "deep_text_recognition", "the deep-text-recognition-benchmark release")
LamaEraser = _unavailable("lama", "lama_cleaner", "pip install lama-cleaner")
GarnetEraser = _unavailable("garnet", "garnet", "the GaRNet release")
AnyTextEditor = _unavailable("anytext", "anytext", "the AnyText release")
UDiffTextEditor = _unavailable("udifftext", "udifftext", "the UDiffText release")
MostelEditor = _unavailable("mostel", "mostel", "the MOSTEL release")
TextCtrlEditor = _unavailable("textctrl", "textctrl", "the TextCtrl release")


def _layout_system_prompt() -> str:
    return (
        resources.files("typofix_adapters")
        .joinpath("data/layout_system_prompt.txt")
        .read_text("utf-8")
    )


class _OpenAIChat:
    """Minimal OpenAI-compatible chat client (endpoint and key from env)."""

    def __init__(self, model_label: str) -> None:
        httpx = _require("httpx", model_label, "pip install httpx")
        self._httpx = httpx
        self.api_key = os.environ.get("OPENAI_API_KEY")
        self.base_url = os.environ.get("OPENAI_BASE_URL", "https://api.openai.com/v1")
        self.model = os.environ.get("OPENAI_MODEL", "gpt-4o")
        if not self.api_key:
            raise ModelUnavailableError(model_label, "OPENAI_API_KEY is not set")

    def chat(self, system: str, user_content) -> str:
        response = self._httpx.post(
            f"{self.base_url.rstrip('/')}/chat/completions",
            headers={"Authorization": f"Bearer {self.api_key}"},
            json={
                "model": self.model,
                "messages": [
                    {"role": "system", "content": system},
                    {"role": "user", "content": user_content},
                ],
            },
            timeout=60.0,
        )
        response.raise_for_status()
        return response.json()["choices"][0]["message"]["content"]


class OpenAIPlanner:
    """Vision-language layout planning through an OpenAI-compatible API.

    Sends the canvas-schema system prompt, the image, the existing layout,
    and the missing words; parses the JSON ``elements`` from the reply.
    Validation and retries belong to the client side of the protocol.
    """

    def __init__(self, device: str = "cpu") -> None:
        self._client = _OpenAIChat("openai-planner")
        self._system = _layout_system_prompt()

    def plan(self, image: np.ndarray, existing: list[dict], missing: list[str]) -> list[dict]:
        content = [
            {
                "type": "text",
                "text": (
                    f"Current layout: {json.dumps({'elements': existing})} "
                    f"Input keywords: {json.dumps(missing)} Output:"
                ),
            },
            {
                "type": "image_url",
                "image_url": {"url": f"data:image/png;base64,{encode_image(image)}"},
            },
        ]
        reply = self._client.chat(self._system, content)
        blob = re.search(r"\{.*\}", reply, flags=re.DOTALL)
        parsed = json.loads(blob.group(0) if blob else reply)
        elements = parsed.get("elements", parsed if isinstance(parsed, list) else [])
        return elements if isinstance(elements, list) else []


class OpenAIAugmenter:
    """Prompt augmentation through an OpenAI-compatible API."""

    def __init__(self, device: str = "cpu") -> None:
        self._client = _OpenAIChat("openai-augmenter")
        self._system = (
            resources.files("typofix_adapters")
            .joinpath("data/augment_system_prompt.txt")
            .read_text("utf-8")
        )

    def augment(self, prompt: str) -> str:
        return self._client.chat(self._system, prompt).strip()
