"""Serve the mock model suite over the wire protocol.

Useful for adapter-conformance fixtures and for verifying that runs through
the wire are bit-identical to in-process runs.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from typofix.backends import mocks, schema, wire
from typofix.errors import PlanningError, TypofixError


class MockBackendServer:
    """All six mock ports behind HTTP. Requests are validated against the
    shared protocol schema; violations get a 400 with ``{"error": ...}``."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, editor_p: float = 1.0, seed: int = 0):
        self.detector = mocks.MockDetector()
        self.recognizer = mocks.MockRecognizer()
        self.eraser = mocks.MockEraser()
        self.planner = mocks.MockPlanner()
        self.editor_p = editor_p
        self.seed = seed
        self.augmenter = mocks.MockAugmenter()
        self._fallback_editor = mocks.FlakyEditor(p=editor_p, seed=seed)
        self._editor_lock = threading.Lock()
        self._httpd = ThreadingHTTPServer((host, port), _make_handler(self))
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    # endpoint handlers -------------------------------------------------

    def handle(self, path: str, body: dict) -> dict:
        if path == "/v1/detect":
            image = wire.decode_image(body["image"])
            return {"regions": [wire.polygon_to_json(p) for p in self.detector.detect(image)]}
        if path == "/v1/recognize":
            image = wire.decode_image(body["image"])
            regions = [wire.polygon_from_json(r) for r in body["regions"]]
            return {"words": self.recognizer.recognize(image, regions)}
        if path == "/v1/erase":
            image = wire.decode_image(body["image"])
            masks = [wire.box_from_json(m) for m in body["masks"]]
            erased = self.eraser.erase(image, masks, bool(body.get("erase_all", False)))
            return {"image": wire.encode_image(erased)}
        if path == "/v1/plan_layout":
            image = wire.decode_image(body["image"])
            elements = self.planner.plan(image, body["existing"], body["missing"])
            return {"elements": elements}
        if path == "/v1/edit_text":
            image = wire.decode_image(body["image"])
            targets = [(wire.box_from_json(t["box"]), t["word"]) for t in body["targets"]]
            rng = body.get("rng")
            if rng is not None:
                edited, _ = mocks.flaky_edit(
                    image, targets, self.editor_p, int(rng["seed"]), int(rng["ordinal"])
                )
            else:
                with self._editor_lock:
                    edited = self._fallback_editor.edit(image, targets)
            return {"image": wire.encode_image(edited)}
        if path == "/v1/augment":
            return {"prompt": self.augmenter.augment(body["prompt"])}
        raise KeyError(path)


def _make_handler(server: MockBackendServer):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, format, *args):  # quiet by default
            pass

        def _send(self, status: int, payload: dict) -> None:
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            if self.path == "/v1/capabilities":
                self._send(
                    200,
                    {
                        "ports": ["detector", "recognizer", "eraser", "planner", "editor", "augmenter"],
                        "concurrency": {name: "parallel" for name in
                                        ("detector", "recognizer", "eraser", "planner", "editor", "augmenter")},
                    },
                )
                return
            self._send(404, {"error": f"unknown path {self.path}"})

        def do_POST(self):
            if self.path not in schema.ENDPOINTS:
                self._send(404, {"error": f"unknown path {self.path}"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length).decode("utf-8"))
            except (ValueError, UnicodeDecodeError) as exc:
                self._send(400, {"error": f"invalid JSON body: {exc}"})
                return
            request_kind, _ = schema.ENDPOINTS[self.path]
            problem = schema.message_problem(request_kind, body)
            if problem is not None:
                self._send(400, {"error": f"request does not match {request_kind}: {problem}"})
                return
            try:
                payload = server.handle(self.path, body)
            except PlanningError as exc:
                self._send(422, {"error": str(exc)})
                return
            except (TypofixError, KeyError, ValueError) as exc:
                self._send(500, {"error": str(exc)})
                return
            self._send(200, payload)

    return Handler
