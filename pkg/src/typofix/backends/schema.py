"""Loading and applying the shared wire-protocol JSON schema."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

ENDPOINTS = {
    "/v1/detect": ("DetectRequest", "DetectResponse"),
    "/v1/recognize": ("RecognizeRequest", "RecognizeResponse"),
    "/v1/erase": ("EraseRequest", "EraseResponse"),
    "/v1/plan_layout": ("PlanLayoutRequest", "PlanLayoutResponse"),
    "/v1/edit_text": ("EditTextRequest", "EditTextResponse"),
    "/v1/augment": ("AugmentRequest", "AugmentResponse"),
}


@lru_cache(maxsize=1)
def protocol_schema() -> dict:
    text = resources.files("typofix").joinpath("schemas/protocol.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_message(kind: str, payload: object) -> None:
    """Validate a payload against one ``$defs`` entry of the protocol schema.

    Raises ``jsonschema.ValidationError`` on violation and ``KeyError`` for
    an unknown message kind.
    """
    schema = protocol_schema()
    if kind not in schema["$defs"]:
        raise KeyError(f"unknown protocol message kind {kind!r}")
    jsonschema.validate(instance=payload, schema={"$defs": schema["$defs"], "$ref": f"#/$defs/{kind}"})


def message_problem(kind: str, payload: object) -> str | None:
    """Like :func:`validate_message` but returns the error text instead of raising."""
    try:
        validate_message(kind, payload)
    except jsonschema.ValidationError as err:
        return err.message
    return None
