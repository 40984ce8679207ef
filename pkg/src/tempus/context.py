"""Contextual sentence windows around each marked occurrence.

A window is the sentence containing the expression plus its neighbors: a
triplet when both neighbors exist, a pair at the first or last sentence of
a book, and a degenerate single-sentence window for one-sentence books.
Sentences are joined with single spaces and the aspect span is recomputed
into window coordinates, so slicing the window text always yields the
matched surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ValidationError
from .lexicon import Occurrence
from .segment import Sentence

__all__ = ["ContextWindow", "extract_window", "extract_all"]

KINDS = ("triplet", "pair-leading", "pair-trailing", "single")


@dataclass(frozen=True)
class ContextWindow:
    occurrence_id: int
    source_id: str
    kind: str  # triplet | pair-leading | pair-trailing | single (degenerate)
    text: str
    aspect_char_span: tuple[int, int]
    aspect_surface: str

    def as_record(self) -> dict:
        return {
            "occurrence_id": self.occurrence_id,
            "source_id": self.source_id,
            "kind": self.kind,
            "text": self.text,
            "aspect_char_span": list(self.aspect_char_span),
            "aspect_surface": self.aspect_surface,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ContextWindow":
        return cls(
            occurrence_id=rec["occurrence_id"],
            source_id=rec["source_id"],
            kind=rec["kind"],
            text=rec["text"],
            aspect_char_span=tuple(rec["aspect_char_span"]),
            aspect_surface=rec["aspect_surface"],
        )


def extract_window(occurrence: Occurrence, sentences: Sequence[Sentence]) -> ContextWindow:
    """Build the 2-3 sentence window for one occurrence."""
    idx = occurrence.sentence_index
    if idx < 0 or idx >= len(sentences):
        raise ValidationError(
            f"occurrence {occurrence.occurrence_id}: sentence index {idx} out of range "
            f"for '{occurrence.source_id}' ({len(sentences)} sentences)"
        )
    has_prev = idx > 0
    has_next = idx < len(sentences) - 1
    if has_prev and has_next:
        kind, members = "triplet", (idx - 1, idx, idx + 1)
    elif has_next:
        kind, members = "pair-trailing", (idx, idx + 1)
    elif has_prev:
        kind, members = "pair-leading", (idx - 1, idx)
    else:
        kind, members = "single", (idx,)

    parts = [sentences[i].text for i in members]
    text = " ".join(parts)
    offset = 0
    for i in members:
        if i == idx:
            break
        offset += len(sentences[i].text) + 1
    lo, hi = occurrence.char_span
    span = (offset + lo, offset + hi)
    surface = occurrence.matched_surface
    if text[span[0] : span[1]] != surface:
        raise ValidationError(
            f"occurrence {occurrence.occurrence_id}: aspect span does not round-trip"
        )
    return ContextWindow(
        occurrence_id=occurrence.occurrence_id,
        source_id=occurrence.source_id,
        kind=kind,
        text=text,
        aspect_char_span=span,
        aspect_surface=surface,
    )


def extract_all(
    occurrences: Iterable[Occurrence],
    corpus_sentences: Mapping[str, Sequence[Sentence]],
) -> Iterator[ContextWindow]:
    """One window per occurrence, in occurrence_id order."""
    last_id = None
    for occ in occurrences:
        if last_id is not None and occ.occurrence_id <= last_id:
            raise ValidationError("extract_all: occurrences must be sorted by occurrence_id")
        last_id = occ.occurrence_id
        sentences = corpus_sentences.get(occ.source_id)
        if sentences is None:
            raise ValidationError(
                f"occurrence {occ.occurrence_id}: dangling reference to source '{occ.source_id}'"
            )
        yield extract_window(occ, sentences)
