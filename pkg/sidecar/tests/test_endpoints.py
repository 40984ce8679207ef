"""Stub-mode endpoint behavior: scoring rules, error codes, service info."""

from __future__ import annotations


def _absa(client, text, aspect, span=None):
    if span is None:
        start = text.index(aspect)
        span = [start, start + len(aspect)]
    return client.post(
        "/v1/aspect-sentiment", json={"text": text, "aspect": aspect, "aspect_char_span": span}
    )


class TestAspectSentiment:
    def test_zero_markers_identity(self, client):
        resp = _absa(client, "It ended abruptly.", "abruptly")
        assert resp.status_code == 200
        body = resp.json()
        assert body["negative"] == body["neutral"] == body["positive"] == 1 / 3

    def test_one_positive_marker(self, client):
        resp = _absa(client, "Good [POS] days pass swiftly.", "swiftly")
        assert resp.json() == {"negative": 0.25, "neutral": 0.25, "positive": 0.5}

    def test_two_negative_markers(self, client):
        resp = _absa(client, "It ended [NEG] [NEG] badly and abruptly.", "abruptly")
        assert resp.json() == {"negative": 0.6, "neutral": 0.2, "positive": 0.2}

    def test_span_mismatch_is_400(self, client):
        resp = _absa(client, "It ended abruptly.", "abruptly", span=[0, 8])
        assert resp.status_code == 400

    def test_span_past_text_end_is_400(self, client):
        resp = _absa(client, "short", "short", span=[0, 99])
        assert resp.status_code == 400

    def test_schema_violation_is_400(self, client):
        resp = client.post("/v1/aspect-sentiment", json={"text": "x"})
        assert resp.status_code == 400
        resp = client.post(
            "/v1/aspect-sentiment",
            json={"text": "x", "aspect": "x", "aspect_char_span": [0, 1, 2]},
        )
        assert resp.status_code == 400

    def test_negative_span_is_400(self, client):
        resp = client.post(
            "/v1/aspect-sentiment",
            json={"text": "xy", "aspect": "x", "aspect_char_span": [-1, 1]},
        )
        assert resp.status_code == 400


class TestLogProbs:
    def test_seen_unseen_rule(self, client):
        resp = client.post("/v1/logprobs", json={"context": "a b", "continuation": "a c"})
        assert resp.status_code == 200
        assert resp.json() == {"tokens": ["a", "c"], "token_logprobs": [-1.0, -2.0]}

    def test_empty_context_all_unseen(self, client):
        resp = client.post("/v1/logprobs", json={"context": "", "continuation": "x y z"})
        assert resp.json()["token_logprobs"] == [-2.0, -2.0, -2.0]

    def test_empty_continuation_is_400(self, client):
        resp = client.post("/v1/logprobs", json={"context": "a", "continuation": "  "})
        assert resp.status_code == 400

    def test_schema_violation_is_400(self, client):
        resp = client.post("/v1/logprobs", json={"context": "a"})
        assert resp.status_code == 400

    def test_lengths_match_and_nonpositive(self, client):
        resp = client.post(
            "/v1/logprobs",
            json={"context": "the cat", "continuation": "The CAT sat down."},
        )
        body = resp.json()
        assert len(body["tokens"]) == len(body["token_logprobs"]) == 4
        assert all(lp <= 0 for lp in body["token_logprobs"])


class TestServiceInfo:
    def test_health(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "mode": "stub"}

    def test_model_info(self, client):
        resp = client.get("/v1/model")
        assert resp.json() == {"mode": "stub", "model_id": "stub-v1"}

    def test_model_mode_without_models_is_degraded_and_503(self, monkeypatch):
        from fastapi.testclient import TestClient

        from tempus_sidecar.app import create_app

        monkeypatch.delenv("TEMPUS_ABSA_MODEL", raising=False)
        monkeypatch.delenv("TEMPUS_LM_MODEL", raising=False)
        degraded = TestClient(create_app(mode="model"))
        assert degraded.get("/v1/health").json()["status"] == "degraded"
        resp = degraded.post(
            "/v1/aspect-sentiment",
            json={"text": "x", "aspect": "x", "aspect_char_span": [0, 1]},
        )
        assert resp.status_code == 503
        resp = degraded.post("/v1/logprobs", json={"context": "", "continuation": "x"})
        assert resp.status_code == 503
