"""Narrative-flow measurement via a history-size sweep.

Sequentiality of a story is the mean per-token log-probability gain a
sentence gets from conditioning on its preceding sentences versus the
topic alone, in nats per token.  Each book contributes a story built from
its first sentences (default 18), with the book title as the topic prompt.
The sweep evaluates every history size from 1 up, plus "full".
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .backends import Backend, ScoreCache
from .errors import ValidationError
from .segment import Sentence

__all__ = [
    "Story",
    "SequentialityCurve",
    "build_story",
    "sentence_nll",
    "sequentiality_at",
    "sweep_history",
    "FULL",
]

FULL = "full"


@dataclass(frozen=True)
class Story:
    source_id: str
    topic: str
    sentences: tuple[str, ...]
    short: bool = False  # True when the book had fewer sentences than asked


@dataclass
class SequentialityCurve:
    history_sizes: list[object]  # ints ascending, then "full"
    means: dict[object, float]
    per_story: dict[str, dict[object, float]] = field(default_factory=dict)

    def as_summary(self) -> dict:
        return {
            "history_sizes": [str(h) for h in self.history_sizes],
            "means": {str(h): self.means[h] for h in self.history_sizes},
            "n_stories": len(self.per_story),
        }


def build_story(
    source_id: str, topic: str, sentences: Sequence[Sentence], n: int = 18
) -> Story | None:
    """First min(n, available) sentences; None for books under 2 sentences."""
    if n < 2:
        raise ValidationError("build_story: story length must be >= 2")
    if len(sentences) < 2:
        return None
    taken = tuple(s.text for s in sentences[:n])
    return Story(source_id, topic, taken, short=len(sentences) < n)


class _NllCache:
    """Per-run memo for (context, sentence) pairs, optionally disk-backed."""

    def __init__(self, backend: Backend, disk: ScoreCache | None = None):
        self.backend = backend
        self.disk = disk
        self._memo: dict[tuple[str, str], float] = {}

    def nll(self, context: str, sentence: str) -> float:
        memo_key = (context, sentence)
        if memo_key in self._memo:
            return self._memo[memo_key]
        value = None
        disk_key = None
        if self.disk is not None:
            disk_key = self.disk.key("nll", self.backend.model_id, context, sentence)
            hit = self.disk.get(disk_key)
            if hit is not None:
                value = float(hit["nll"])
        if value is None:
            value = sentence_nll(self.backend, context, sentence)
            if self.disk is not None and disk_key is not None:
                self.disk.put(disk_key, {"nll": value})
        self._memo[memo_key] = value
        return value


def sentence_nll(backend: Backend, context: str, sentence: str) -> float:
    """Mean per-token negative log-probability of sentence given context."""
    if not sentence.strip():
        raise ValidationError("sentence_nll: empty sentence")
    tokens, logprobs = backend.logprobs(context, sentence)
    if not tokens:
        raise ValidationError("sentence_nll: backend returned no tokens")
    return -math.fsum(logprobs) / len(logprobs)


def _join_context(topic: str, history: Sequence[str]) -> str:
    return " ".join([topic, *history]) if history else topic


def sequentiality_at(
    story: Story,
    h: int | str,
    backend: Backend,
    cache: _NllCache | None = None,
    include_first: bool = False,
) -> float:
    """Mean log-probability gain from history of size h (or "full").

    For sentence i (1-based, from 2 to n): the gain is
    nll(topic alone) - nll(topic + sentences max(1, i-h)..i-1).
    Positive values mean history makes sentences more predictable.  The
    first sentence's gain is identically zero and excluded unless
    include_first is set.
    """
    n = len(story.sentences)
    if n < 2:
        raise ValidationError("sequentiality_at: story needs at least 2 sentences")
    if h != FULL and (not isinstance(h, int) or h < 1):
        raise ValidationError(f"sequentiality_at: history size must be >= 1 or '{FULL}'")
    if cache is None:
        cache = _NllCache(backend)
    deltas = []
    if include_first:
        deltas.append(0.0)
    for i in range(1, n):  # 0-based index of the scored sentence
        sentence = story.sentences[i]
        start = 0 if h == FULL else max(0, i - int(h))
        history = story.sentences[start:i]
        topic_nll = cache.nll(story.topic, sentence)
        history_nll = cache.nll(_join_context(story.topic, history), sentence)
        deltas.append(topic_nll - history_nll)
    return math.fsum(deltas) / len(deltas)


def sweep_history(
    stories: Sequence[Story],
    backend: Backend,
    *,
    h_max: int | None = None,
    disk_cache: ScoreCache | None = None,
    include_first: bool = False,
    concurrency: int = 1,
) -> SequentialityCurve:
    """Mean sequentiality per history size over all stories.

    History sizes run from 1 to (longest story - 1), capped at h_max when
    given, plus "full".  Stories shorter than a given h contribute their
    full-history value there, so every story participates at every h.
    """
    if not stories:
        raise ValidationError("sweep_history: no valid stories")
    longest = max(len(s.sentences) for s in stories)
    top = longest - 1
    if h_max is not None:
        if h_max < 1:
            raise ValidationError("sweep_history: h_max must be >= 1")
        top = min(top, h_max)
    sizes: list[object] = [*range(1, top + 1), FULL]

    cache = _NllCache(backend, disk_cache)
    per_story: dict[str, dict[object, float]] = {}

    def evaluate(story: Story) -> tuple[str, dict[object, float]]:
        values = {
            h: sequentiality_at(story, h, backend, cache, include_first) for h in sizes
        }
        return story.source_id, values

    ordered = sorted(stories, key=lambda s: s.source_id)
    if concurrency > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            for source_id, values in pool.map(evaluate, ordered):
                per_story[source_id] = values
    else:
        for story in ordered:
            source_id, values = evaluate(story)
            per_story[source_id] = values

    means = {
        h: math.fsum(per_story[sid][h] for sid in per_story) / len(per_story)
        for h in sizes
    }
    return SequentialityCurve(history_sizes=sizes, means=means, per_story=per_story)
