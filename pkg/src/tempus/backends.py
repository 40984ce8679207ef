"""Scoring backends: the in-process deterministic stub and the HTTP client.

Both expose the same two calls: three-polarity aspect sentiment for a text
with a marked aspect span, and per-token log-probabilities of a
continuation given a context.  The stub makes the whole pipeline
deterministic and dependency-free; the HTTP client talks to the inference
sidecar's wire protocol and retries transient failures with exponential
backoff.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from pathlib import Path
from typing import Protocol

import requests

from .errors import BackendError

__all__ = [
    "Backend",
    "StubBackend",
    "HttpBackend",
    "ScoreCache",
    "stub_aspect_sentiment",
    "stub_logprobs",
    "validate_simplex",
]

SIMPLEX_TOLERANCE = 1e-6
STUB_MODEL_ID = "stub-v1"


class Backend(Protocol):
    model_id: str

    def aspect_sentiment(
        self, text: str, aspect: str, aspect_char_span: tuple[int, int]
    ) -> tuple[float, float, float]: ...

    def logprobs(self, context: str, continuation: str) -> tuple[list[str], list[float]]: ...


def stub_aspect_sentiment(text: str) -> tuple[float, float, float]:
    """Marker-counting stub: weights (1+n, 1, 1+p) over literal "[NEG]"/"[POS]"."""
    n = text.count("[NEG]")
    p = text.count("[POS]")
    total = 3 + n + p
    return ((1 + n) / total, 1 / total, (1 + p) / total)


def stub_logprobs(context: str, continuation: str) -> tuple[list[str], list[float]]:
    """Whitespace tokens, lowercased; -1.0 if seen in the context, else -2.0."""
    seen = set(context.lower().split())
    tokens = continuation.lower().split()
    return tokens, [-1.0 if t in seen else -2.0 for t in tokens]


def validate_simplex(scores: tuple[float, float, float], origin: str) -> None:
    if any(not (0.0 <= s <= 1.0) for s in scores):
        raise BackendError(f"{origin}: polarity scores outside [0, 1]: {scores}")
    if abs(sum(scores) - 1.0) > SIMPLEX_TOLERANCE:
        raise BackendError(f"{origin}: polarity scores do not sum to 1: {scores}")


class StubBackend:
    """In-process deterministic backend; counts calls for cache tests."""

    model_id = STUB_MODEL_ID

    def __init__(self):
        self.calls = 0

    def aspect_sentiment(self, text, aspect, aspect_char_span):
        self.calls += 1
        return stub_aspect_sentiment(text)

    def logprobs(self, context, continuation):
        self.calls += 1
        return stub_logprobs(context, continuation)


class HttpBackend:
    """Client for the inference sidecar's HTTP/JSON protocol."""

    def __init__(
        self,
        base_url: str,
        *,
        max_attempts: int = 3,
        backoff_base: float = 0.5,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.session = session or requests.Session()
        self.calls = 0
        self._model_id: str | None = None

    @property
    def model_id(self) -> str:
        if self._model_id is None:
            info = self._request("GET", "/v1/model")
            self._model_id = str(info.get("model_id", "unknown"))
        return self._model_id

    def aspect_sentiment(self, text, aspect, aspect_char_span):
        body = {"text": text, "aspect": aspect, "aspect_char_span": list(aspect_char_span)}
        data = self._request("POST", "/v1/aspect-sentiment", body)
        try:
            return (float(data["negative"]), float(data["neutral"]), float(data["positive"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed aspect-sentiment response: {data}") from exc

    def logprobs(self, context, continuation):
        body = {"context": context, "continuation": continuation}
        data = self._request("POST", "/v1/logprobs", body)
        try:
            tokens = [str(t) for t in data["tokens"]]
            lps = [float(v) for v in data["token_logprobs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed logprobs response: {data}") from exc
        if len(tokens) != len(lps):
            raise BackendError("logprobs response: tokens and token_logprobs differ in length")
        return tokens, lps

    def _request(self, method: str, path: str, body: dict | None = None) -> dict:
        url = self.base_url + path
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                self.calls += 1
                resp = self.session.request(method, url, json=body, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500:
                last_error = BackendError(f"{url}: server error {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise BackendError(f"{url}: HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()
            except ValueError as exc:
                raise BackendError(f"{url}: response is not JSON") from exc
        raise BackendError(
            f"{url}: unreachable after {self.max_attempts} attempts: {last_error}"
        )


class ScoreCache:
    """Content-addressed JSON cache; one file per key, atomic writes.

    Safe for concurrent readers; writes are serialized with a lock.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @staticmethod
    def key(*parts) -> str:
        payload = json.dumps(parts, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str):
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text("utf-8"))

    def put(self, key: str, value) -> None:
        payload = json.dumps(value, ensure_ascii=False, sort_keys=True)
        path = self._path(key)
        with self._lock:
            tmp = path.with_suffix(".tmp")
            tmp.write_text(payload, "utf-8")
            tmp.replace(path)
