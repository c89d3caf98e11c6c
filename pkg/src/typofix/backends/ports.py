"""Port wiring: endpoint specs, the port bundle, and construction helpers.

An endpoint spec is either ``mock`` / ``mock:<name>`` (optionally with query
parameters, e.g. ``mock:editor?p=0.4``) for the in-process mock, or an HTTP
base URL for a service speaking the wire protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import parse_qs, urlparse

from typofix.backends import mocks, wire
from typofix.errors import ConfigError
from typofix.util import derive_seed

PORT_NAMES = ("detector", "recognizer", "eraser", "planner", "editor", "augmenter")

DEFAULT_ENDPOINTS = {name: "mock" for name in PORT_NAMES}


@dataclass(frozen=True)
class ParsedEndpoint:
    kind: str  # "mock" | "remote"
    url: str | None = None
    params: dict[str, str] = field(default_factory=dict)


def parse_endpoint(spec: str) -> ParsedEndpoint:
    spec = spec.strip()
    if spec == "mock" or spec.startswith("mock:") or spec.startswith("mock?"):
        query = ""
        if "?" in spec:
            spec, query = spec.split("?", 1)
        params = {k: v[-1] for k, v in parse_qs(query).items()}
        return ParsedEndpoint(kind="mock", params=params)
    parsed = urlparse(spec)
    if parsed.scheme in ("http", "https") and parsed.netloc:
        return ParsedEndpoint(kind="remote", url=spec)
    raise ConfigError(f"endpoint must be 'mock[:name][?k=v]' or an http(s) URL, got {spec!r}")


@dataclass
class Ports:
    """The model ports one pipeline run talks to."""

    detector: object
    recognizer: object
    eraser: object
    planner: object
    editor: object
    augmenter: object | None = None


def _mock_port(name: str, params: dict[str, str], seed: int):
    if name == "detector":
        return mocks.MockDetector()
    if name == "recognizer":
        return mocks.MockRecognizer()
    if name == "eraser":
        return mocks.MockEraser()
    if name == "planner":
        return mocks.MockPlanner()
    if name == "editor":
        try:
            p = float(params.get("p", "1.0"))
        except ValueError:
            raise ConfigError(f"editor endpoint parameter p must be a number, got {params['p']!r}")
        return mocks.FlakyEditor(p=p, seed=seed)
    if name == "augmenter":
        return mocks.MockAugmenter()
    raise ConfigError(f"unknown port name {name!r}")


def _remote_port(name: str, endpoint: wire.BackendEndpoint, seed: int):
    client = wire.WireClient(endpoint, port_name=name)
    if name == "detector":
        return wire.RemoteDetector(client)
    if name == "recognizer":
        return wire.RemoteRecognizer(client)
    if name == "eraser":
        return wire.RemoteEraser(client)
    if name == "planner":
        return wire.RemotePlanner(client)
    if name == "editor":
        return wire.RemoteEditor(client, seed=seed)
    if name == "augmenter":
        return wire.RemoteAugmenter(client)
    raise ConfigError(f"unknown port name {name!r}")


def make_ports(
    endpoints: dict[str, str] | None = None,
    *,
    seed: int = 0,
    image_id: str = "image",
    timeout: float = 30.0,
    retries: int = 5,
) -> Ports:
    """Build the port bundle for one pipeline run.

    The editor's RNG stream is derived from ``(seed, image_id)``, so batch
    runs give each image an independent, order-insensitive stream whether the
    editor is in-process or remote.
    """
    table = dict(DEFAULT_ENDPOINTS)
    for name, spec in (endpoints or {}).items():
        if name not in PORT_NAMES:
            raise ConfigError(f"unknown port {name!r}; expected one of {PORT_NAMES}")
        table[name] = spec
    editor_seed = derive_seed(seed, image_id)
    built = {}
    for name in PORT_NAMES:
        parsed = parse_endpoint(table[name])
        if parsed.kind == "mock":
            built[name] = _mock_port(name, parsed.params, editor_seed)
        else:
            endpoint = wire.BackendEndpoint(url=parsed.url, timeout=timeout, retries=retries)
            built[name] = _remote_port(name, endpoint, editor_seed)
    return Ports(**built)
