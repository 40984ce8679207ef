"""Deterministic sentence splitting and tokenization.

Rule-based on purpose: the same input always yields the same segmentation,
with exact character offsets into the source text, and no model dependency.
Splitting happens at sentence terminators (``. ! ?`` plus any closing quotes
or brackets that follow), except after known abbreviations or a single
capital initial, and never when the next word starts with a lowercase
letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

__all__ = [
    "Sentence",
    "Token",
    "load_abbreviations",
    "split_sentences",
    "tokenize",
    "count_words",
]

_TERMINATORS = frozenset(".!?")
_CLOSERS = frozenset("\"')]}”’»")

_WS_CHUNK = re.compile(r"\S+")
_LAST_CHUNK = re.compile(r"\S+$")
_OPENING_PUNCT = re.compile(r"^[^\w.]+")


@dataclass(frozen=True)
class Sentence:
    source_id: str
    index: int
    char_span: tuple[int, int]  # half-open offsets into the source text
    text: str


@dataclass(frozen=True)
class Token:
    sentence_index: int
    char_span: tuple[int, int]  # half-open offsets within the sentence
    surface: str
    normalized: str


@lru_cache(maxsize=None)
def _default_abbreviations() -> frozenset[str]:
    data = resources.files("tempus.data").joinpath("abbreviations.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in data.splitlines() if line.strip())


def load_abbreviations(path: str | Path | None = None) -> frozenset[str]:
    """Abbreviation list, one entry per line; defaults to the shipped file."""
    if path is None:
        return _default_abbreviations()
    text = Path(path).read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def _is_abbreviation(text: str, period_idx: int, abbreviations: frozenset[str]) -> bool:
    """True when the period at period_idx ends an abbreviation or an initial."""
    m = _LAST_CHUNK.search(text, 0, period_idx + 1)
    if m is None:
        return False
    # drop opening punctuation such as quotes or parens
    core = _OPENING_PUNCT.sub("", m.group(0))
    if core.lower() in abbreviations:
        return True
    # single capital initial, e.g. "J. Smith"
    prev = text[period_idx - 1] if period_idx >= 1 else ""
    before = text[period_idx - 2] if period_idx >= 2 else ""
    return prev.isupper() and prev.isalpha() and (period_idx < 2 or not before.isalpha())


def split_sentences(
    text: str,
    source_id: str = "",
    abbreviations: frozenset[str] | None = None,
) -> list[Sentence]:
    """Split text into sentences with exact half-open character spans.

    Whitespace between sentences belongs to no sentence; every
    non-whitespace character is covered by exactly one span.
    """
    if abbreviations is None:
        abbreviations = _default_abbreviations()
    n = len(text)
    boundaries: list[int] = []  # exclusive end offsets
    i = 0
    while i < n:
        ch = text[i]
        if ch not in _TERMINATORS:
            i += 1
            continue
        j = i + 1
        while j < n and text[j] in _CLOSERS:
            j += 1
        if j < n and not text[j].isspace():
            i += 1  # mid-token period such as "3.14" or "e.g.x"
            continue
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k < n and text[k].islower():
            i = j
            continue
        if ch == "." and _is_abbreviation(text, i, abbreviations):
            i = j
            continue
        boundaries.append(j)
        i = j

    sentences: list[Sentence] = []
    cursor = 0

    def emit(start: int, end: int) -> None:
        # trim surrounding whitespace out of the span
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start < end:
            sentences.append(
                Sentence(source_id, len(sentences), (start, end), text[start:end])
            )

    for boundary in boundaries:
        emit(cursor, boundary)
        cursor = boundary
    emit(cursor, n)
    return sentences


def _core_bounds(surface: str) -> tuple[int, int]:
    """Bounds of the token core after stripping surrounding punctuation."""
    start, end = 0, len(surface)
    while start < end and not surface[start].isalnum():
        start += 1
    while end > start and not surface[end - 1].isalnum():
        end -= 1
    return start, end


def tokenize(sentence: Sentence) -> list[Token]:
    """Whitespace-delimited tokens; normalized forms are lowercased cores."""
    tokens = []
    for m in _WS_CHUNK.finditer(sentence.text):
        surface = m.group(0)
        lo, hi = _core_bounds(surface)
        tokens.append(
            Token(
                sentence_index=sentence.index,
                char_span=(m.start(), m.end()),
                surface=surface,
                normalized=surface[lo:hi].lower(),
            )
        )
    return tokens


def count_words(sentences: list[Sentence]) -> int:
    """Tokens with a non-empty normalized form."""
    return sum(
        1 for s in sentences for t in tokenize(s) if t.normalized
    )
