"""Deterministic stub scoring, shared contract with the pipeline core.

These two functions are the sidecar's half of a cross-component contract:
the golden-request fixture (fixtures/stub_golden.json at the repo root)
pins their outputs bit for bit against the core's in-process stub, so the
two implementations may never drift apart.
"""

from __future__ import annotations

STUB_MODEL_ID = "stub-v1"


def aspect_sentiment(text: str) -> tuple[float, float, float]:
    """Weights (1+n, 1, 1+p) normalized, counting literal "[NEG]"/"[POS]"."""
    n = text.count("[NEG]")
    p = text.count("[POS]")
    total = 3 + n + p
    return ((1 + n) / total, 1 / total, (1 + p) / total)


def logprobs(context: str, continuation: str) -> tuple[list[str], list[float]]:
    """Whitespace tokens, lowercased; -1.0 when seen in the context, else -2.0."""
    seen = set(context.lower().split())
    tokens = continuation.lower().split()
    return tokens, [-1.0 if t in seen else -2.0 for t in tokens]
