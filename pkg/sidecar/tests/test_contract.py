"""Cross-component contract: stub responses must equal the golden-request
fixture (shared with the pipeline core) to the last bit."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

GOLDEN = Path(__file__).resolve().parents[2] / "fixtures" / "stub_golden.json"


@pytest.fixture(scope="module")
def golden() -> dict:
    return json.loads(GOLDEN.read_text("utf-8"))


def test_aspect_sentiment_matches_golden(client, golden):
    for case in golden["aspect_sentiment"]:
        resp = client.post("/v1/aspect-sentiment", json=case["request"])
        assert resp.status_code == 200
        body = resp.json()
        expected = case["response"]
        # exact float equality: both sides round-trip through repr
        assert body["negative"] == expected["negative"]
        assert body["neutral"] == expected["neutral"]
        assert body["positive"] == expected["positive"]


def test_logprobs_match_golden(client, golden):
    for case in golden["logprobs"]:
        resp = client.post("/v1/logprobs", json=case["request"])
        assert resp.status_code == 200
        body = resp.json()
        assert body["tokens"] == case["response"]["tokens"]
        assert body["token_logprobs"] == case["response"]["token_logprobs"]


def test_identical_request_byte_identical_response(client, golden):
    case = golden["aspect_sentiment"][1]
    first = client.post("/v1/aspect-sentiment", json=case["request"])
    second = client.post("/v1/aspect-sentiment", json=case["request"])
    assert first.content == second.content
