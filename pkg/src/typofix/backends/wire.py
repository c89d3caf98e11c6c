"""JSON-over-HTTP clients for remote model backends.

All images travel as base64-encoded PNG; coordinates are pixels with origin
top-left. Failed requests (transport errors or non-2xx responses) are retried
up to the endpoint's budget, then surface as :class:`BackendError`.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass

import requests

from typofix.errors import BackendError
from typofix.imaging import BBox, Polygon, RasterImage


def encode_image(image: RasterImage) -> str:
    return base64.b64encode(image.to_png_bytes()).decode("ascii")


def decode_image(data: str) -> RasterImage:
    return RasterImage.from_png_bytes(base64.b64decode(data))


def box_to_json(box: BBox) -> dict:
    return {"left": box.left, "top": box.top, "width": box.width, "height": box.height}


def box_from_json(data: dict) -> BBox:
    return BBox(int(data["left"]), int(data["top"]), int(data["width"]), int(data["height"]))


def polygon_to_json(poly: Polygon) -> dict:
    return {"polygon": [[x, y] for x, y in poly.vertices]}


def polygon_from_json(data: dict) -> Polygon:
    return Polygon(tuple((float(x), float(y)) for x, y in data["polygon"]))


@dataclass(frozen=True)
class BackendEndpoint:
    """Where a port lives: an HTTP base URL, with a timeout and retry budget."""

    url: str
    timeout: float = 30.0
    retries: int = 5

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError(f"timeout must be > 0, got {self.timeout}")
        if self.retries < 0:
            raise ValueError(f"retries must be >= 0, got {self.retries}")


class WireClient:
    """Minimal JSON POST client with retries for one backend service."""

    def __init__(self, endpoint: BackendEndpoint, port_name: str) -> None:
        self.endpoint = endpoint
        self.port_name = port_name
        self._session = requests.Session()

    def post(self, path: str, payload: dict) -> dict:
        url = self.endpoint.url.rstrip("/") + path
        last_error = "no attempt made"
        for _ in range(self.endpoint.retries + 1):
            try:
                response = self._session.post(url, json=payload, timeout=self.endpoint.timeout)
            except requests.RequestException as exc:
                last_error = f"request failed: {exc}"
                continue
            if 200 <= response.status_code < 300:
                try:
                    body = response.json()
                except ValueError:
                    last_error = "response was not JSON"
                    continue
                if isinstance(body, dict):
                    return body
                last_error = f"expected a JSON object, got {type(body).__name__}"
                continue
            try:
                message = response.json().get("error", response.text)
            except ValueError:
                message = response.text
            last_error = f"HTTP {response.status_code}: {message}"
        raise BackendError(self.port_name, last_error)


def _parse_response(client: WireClient, body: dict, parse):
    """Apply a parser to a response body, mapping malformed payloads to
    BackendError instead of leaking decode exceptions."""
    try:
        return parse(body)
    except (KeyError, TypeError, ValueError, OSError) as exc:
        raise BackendError(client.port_name, f"malformed response: {exc}")


class RemoteDetector:
    def __init__(self, client: WireClient) -> None:
        self.client = client

    def detect(self, image: RasterImage) -> list[Polygon]:
        body = self.client.post("/v1/detect", {"image": encode_image(image)})
        return _parse_response(
            self.client,
            body,
            lambda b: [polygon_from_json(region) for region in b.get("regions", [])],
        )


class RemoteRecognizer:
    def __init__(self, client: WireClient) -> None:
        self.client = client

    def recognize(self, image: RasterImage, regions: list[Polygon]) -> list[str]:
        body = self.client.post(
            "/v1/recognize",
            {"image": encode_image(image), "regions": [polygon_to_json(r) for r in regions]},
        )
        return [str(word) for word in body.get("words", [])]


class RemoteEraser:
    def __init__(self, client: WireClient) -> None:
        self.client = client

    def erase(self, image: RasterImage, masks: list[BBox], erase_all: bool = False) -> RasterImage:
        body = self.client.post(
            "/v1/erase",
            {
                "image": encode_image(image),
                "masks": [box_to_json(box) for box in masks],
                "erase_all": bool(erase_all),
            },
        )
        return _parse_response(self.client, body, lambda b: decode_image(b["image"]))


class RemotePlanner:
    def __init__(self, client: WireClient) -> None:
        self.client = client

    def plan(self, image: RasterImage, existing: list[dict], missing: list[str]) -> list[dict]:
        body = self.client.post(
            "/v1/plan_layout",
            {"image": encode_image(image), "existing": existing, "missing": list(missing)},
        )
        elements = body.get("elements")
        if not isinstance(elements, list):
            raise BackendError(self.client.port_name, "plan_layout response lacks an elements list")
        return elements


class RemoteEditor:
    """Client for a served editor; transmits its stream identity so a shared
    server reproduces exactly what an in-process editor with the same seed
    would render."""

    def __init__(self, client: WireClient, seed: int = 0) -> None:
        self.client = client
        self.seed = seed
        self.ordinal = 0

    def edit(self, image: RasterImage, targets: list[tuple[BBox, str]]) -> RasterImage:
        payload = {
            "image": encode_image(image),
            "targets": [{"box": box_to_json(box), "word": word} for box, word in targets],
            "rng": {"seed": self.seed & (2**63 - 1), "ordinal": self.ordinal},
        }
        self.ordinal += 1
        body = self.client.post("/v1/edit_text", payload)
        return _parse_response(self.client, body, lambda b: decode_image(b["image"]))


class RemoteAugmenter:
    def __init__(self, client: WireClient) -> None:
        self.client = client

    def augment(self, prompt: str) -> str:
        body = self.client.post("/v1/augment", {"prompt": prompt})
        return str(body.get("prompt", ""))
