from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from typofix_adapters.config import AdapterConfig
from typofix_adapters.service import create_app

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def client():
    app = create_app(AdapterConfig())
    with TestClient(app, raise_server_exceptions=False) as test_client:
        yield test_client


@pytest.fixture(scope="session")
def fixtures():
    loaded = {}
    for path in sorted(FIXTURES_DIR.glob("*.json")):
        loaded[path.stem] = json.loads(path.read_text())
    assert len(loaded) == 6, "expected one golden fixture per endpoint"
    return loaded
