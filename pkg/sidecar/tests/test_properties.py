"""Response invariants over randomized request bodies."""

from __future__ import annotations

import random


def test_simplex_invariant_on_every_response(client):
    rng = random.Random(12)
    words = ["time", "[NEG]", "[POS]", "slowly", "again", "x", "[NEG][POS]", "été"]
    for _ in range(60):
        text = " ".join(rng.choices(words, k=rng.randint(1, 12)))
        aspect_start = rng.randrange(0, len(text))
        aspect_end = rng.randrange(aspect_start + 1, len(text) + 1)
        aspect = text[aspect_start:aspect_end]
        resp = client.post(
            "/v1/aspect-sentiment",
            json={"text": text, "aspect": aspect, "aspect_char_span": [aspect_start, aspect_end]},
        )
        assert resp.status_code == 200
        body = resp.json()
        total = body["negative"] + body["neutral"] + body["positive"]
        assert abs(total - 1.0) <= 1e-6
        assert all(0.0 <= body[k] <= 1.0 for k in ("negative", "neutral", "positive"))


def test_logprob_lists_always_parallel_and_nonpositive(client):
    rng = random.Random(13)
    vocab = ["a", "b", "c", "the", "Cat.", "é"]
    for _ in range(60):
        context = " ".join(rng.choices(vocab, k=rng.randint(0, 8)))
        continuation = " ".join(rng.choices(vocab, k=rng.randint(1, 8)))
        resp = client.post("/v1/logprobs", json={"context": context, "continuation": continuation})
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["tokens"]) == len(body["token_logprobs"])
        assert len(body["tokens"]) > 0
        assert all(lp <= 0 for lp in body["token_logprobs"])
