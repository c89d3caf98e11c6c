"""Model ports, their wire protocol, and the deterministic mock implementations.

Five model roles sit behind small duck-typed ports: a text detector, a text
recognizer, an eraser, a layout planner, and a text editor (plus a prompt
augmenter). Each port can be served by an in-process mock, or by any HTTP
service speaking the JSON wire protocol in :mod:`typofix.backends.wire`.
"""

from typofix.backends.mocks import (
    FlakyEditor,
    MockAugmenter,
    MockDetector,
    MockEraser,
    MockPlanner,
    MockRecognizer,
    flaky_edit,
    mock_detect,
    mock_erase,
    mock_plan,
    mock_recognize,
)
from typofix.backends.ports import Ports, make_ports, parse_endpoint
from typofix.backends.scene import Placement, SyntheticScene, place_word, render_scene
from typofix.backends.wire import BackendEndpoint

__all__ = [
    "BackendEndpoint",
    "FlakyEditor",
    "MockAugmenter",
    "MockDetector",
    "MockEraser",
    "MockPlanner",
    "MockRecognizer",
    "Placement",
    "Ports",
    "SyntheticScene",
    "flaky_edit",
    "make_ports",
    "mock_detect",
    "mock_erase",
    "mock_plan",
    "mock_recognize",
    "parse_endpoint",
    "place_word",
    "render_scene",
]
