from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from tempus_sidecar.app import create_app


@pytest.fixture(scope="session")
def client() -> TestClient:
    return TestClient(create_app(mode="stub"))
