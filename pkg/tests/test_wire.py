from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from typofix.backends import schema, wire
from typofix.backends.mocks import FlakyEditor, MockDetector, MockEraser, MockRecognizer
from typofix.backends.ports import make_ports, parse_endpoint
from typofix.backends.scene import place_word, render_scene, SyntheticScene
from typofix.backends.server import MockBackendServer
from typofix.errors import BackendError, ConfigError
from typofix.imaging import BBox, Polygon, RasterImage


@pytest.fixture(scope="module")
def mock_server():
    server = MockBackendServer(port=0, editor_p=1.0, seed=0)
    server.start()
    yield server
    server.stop()


def sample_image():
    scene = SyntheticScene(
        128, 96, (place_word("HI", 8, 8, 2), place_word("SALE", 8, 40, 2)),
        background=(240, 240, 235),
    )
    return render_scene(scene)


class TestCodec:
    def test_image_round_trip(self):
        img = sample_image()
        assert wire.decode_image(wire.encode_image(img)) == img

    def test_box_round_trip(self):
        box = BBox(1, 2, 3, 4)
        assert wire.box_from_json(wire.box_to_json(box)) == box

    def test_polygon_round_trip(self):
        poly = Polygon(((1.5, 2.0), (8.0, 2.0), (8.0, 9.25), (1.5, 9.25)))
        assert wire.polygon_from_json(wire.polygon_to_json(poly)) == poly


class TestSchema:
    def test_known_kinds_validate(self):
        assert schema.message_problem("DetectRequest", {"image": "aGVsbG8="}) is None
        assert schema.message_problem("DetectResponse", {"regions": []}) is None

    def test_violations_reported(self):
        assert schema.message_problem("DetectRequest", {}) is not None
        bad_element = {"word": "w", "width": 200, "height": 5, "left": 0, "top": 0}
        assert schema.message_problem("PlanLayoutResponse", {"elements": [bad_element]}) is not None

    def test_unknown_kind_raises(self):
        with pytest.raises(KeyError):
            schema.validate_message("NoSuchThing", {})

    def test_all_endpoints_have_schemas(self):
        defs = schema.protocol_schema()["$defs"]
        for request_kind, response_kind in schema.ENDPOINTS.values():
            assert request_kind in defs and response_kind in defs


class TestParseEndpoint:
    def test_mock_forms(self):
        assert parse_endpoint("mock").kind == "mock"
        assert parse_endpoint("mock:editor").kind == "mock"
        parsed = parse_endpoint("mock:editor?p=0.25")
        assert parsed.params == {"p": "0.25"}

    def test_url_form(self):
        parsed = parse_endpoint("http://127.0.0.1:9000")
        assert parsed.kind == "remote" and parsed.url == "http://127.0.0.1:9000"

    def test_garbage_rejected(self):
        with pytest.raises(ConfigError):
            parse_endpoint("ftp://nope")


class TestServedMocks:
    def test_detect_recognize_parity(self, mock_server):
        img = sample_image()
        ports = make_ports(
            {name: mock_server.address for name in ("detector", "recognizer")},
            seed=0,
            image_id="t",
        )
        local_regions = MockDetector().detect(img)
        remote_regions = ports.detector.detect(img)
        assert remote_regions == local_regions
        assert ports.recognizer.recognize(img, remote_regions) == MockRecognizer().recognize(
            img, local_regions
        )

    def test_erase_parity(self, mock_server):
        img = sample_image()
        masks = [BBox(8, 8, 22, 14)]
        ports = make_ports({"eraser": mock_server.address}, seed=0, image_id="t")
        assert ports.eraser.erase(img, masks, True) == MockEraser().erase(img, masks, True)

    def test_edit_parity_via_rng_stream(self, mock_server):
        img = RasterImage.new(200, 40, (240, 240, 240))
        targets = [(BBox(4, 4, 44, 12), "SALE"), (BBox(60, 4, 44, 12), "OPEN")]
        seed = 1234
        local = FlakyEditor(p=1.0, seed=seed)
        remote_ports = make_ports({"editor": mock_server.address}, seed=0, image_id="x")
        remote = remote_ports.editor
        remote.seed = seed  # align stream identity with the local instance
        assert remote.edit(img, targets) == local.edit(img, targets)
        assert remote.edit(img, targets) == local.edit(img, targets)

    def test_plan_and_augment(self, mock_server):
        ports = make_ports(
            {"planner": mock_server.address, "augmenter": mock_server.address},
            seed=0,
            image_id="t",
        )
        elements = ports.planner.plan(sample_image(), [], ["HI"])
        assert elements == [{"word": "HI", "width": 14, "height": 12, "left": 2, "top": 2}]
        assert ports.augmenter.augment('say "HI"') == 'say "HI"'

    def test_invalid_request_gets_error_body(self, mock_server):
        import requests

        response = requests.post(f"{mock_server.address}/v1/detect", json={}, timeout=5)
        assert response.status_code == 400
        assert "error" in response.json()

    def test_unknown_path_404(self, mock_server):
        import requests

        response = requests.post(f"{mock_server.address}/v1/nope", json={}, timeout=5)
        assert response.status_code == 404

    def test_capabilities(self, mock_server):
        import requests

        body = requests.get(f"{mock_server.address}/v1/capabilities", timeout=5).json()
        assert schema.message_problem("CapabilitiesResponse", body) is None
        assert "editor" in body["ports"]


class _CountingFlaky(BaseHTTPRequestHandler):
    failures = 2
    calls = 0

    def log_message(self, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        self.rfile.read(length)
        type(self).calls += 1
        if type(self).calls <= type(self).failures:
            payload = json.dumps({"error": "transient"}).encode()
            self.send_response(503)
        else:
            payload = json.dumps({"words": []}).encode()
            self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)


class TestRetries:
    def test_client_retries_then_succeeds(self):
        _CountingFlaky.calls = 0
        httpd = HTTPServer(("127.0.0.1", 0), _CountingFlaky)
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        try:
            url = f"http://127.0.0.1:{httpd.server_address[1]}"
            client = wire.WireClient(wire.BackendEndpoint(url, timeout=5, retries=5), "recognizer")
            body = client.post("/v1/recognize", {"image": "eA==", "regions": []})
            assert body == {"words": []}
            assert _CountingFlaky.calls == 3
        finally:
            httpd.shutdown()
            httpd.server_close()

    def test_exhausted_retries_surface_backend_error(self):
        _CountingFlaky.calls = 0
        _CountingFlaky.failures = 99
        httpd = HTTPServer(("127.0.0.1", 0), _CountingFlaky)
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        try:
            url = f"http://127.0.0.1:{httpd.server_address[1]}"
            client = wire.WireClient(wire.BackendEndpoint(url, timeout=5, retries=2), "recognizer")
            with pytest.raises(BackendError) as err:
                client.post("/v1/recognize", {"image": "eA==", "regions": []})
            assert _CountingFlaky.calls == 3
            assert "503" in str(err.value)
        finally:
            _CountingFlaky.failures = 2
            httpd.shutdown()
            httpd.server_close()

    def test_unreachable_endpoint(self):
        client = wire.WireClient(
            wire.BackendEndpoint("http://127.0.0.1:1", timeout=0.2, retries=1), "detector"
        )
        with pytest.raises(BackendError):
            client.post("/v1/detect", {"image": "eA=="})


class _GarbageImage(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        self.rfile.read(length)
        payload = json.dumps({"image": "bm90LWEtcG5n"}).encode()  # not a PNG
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)


class TestMalformedResponses:
    def test_invalid_image_payload_becomes_backend_error(self):
        httpd = HTTPServer(("127.0.0.1", 0), _GarbageImage)
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        try:
            url = f"http://127.0.0.1:{httpd.server_address[1]}"
            client = wire.WireClient(wire.BackendEndpoint(url, timeout=5, retries=0), "eraser")
            eraser = wire.RemoteEraser(client)
            with pytest.raises(BackendError) as err:
                eraser.erase(sample_image(), [BBox(0, 0, 4, 4)], False)
            assert "malformed response" in str(err.value)
        finally:
            httpd.shutdown()
            httpd.server_close()
