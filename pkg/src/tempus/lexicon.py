"""The temporal-adverb lexicon and occurrence marking.

Eighty single-token adverbs in six semantic categories, shipped as a
versioned CSV so alternate lexicons can be swapped per run.  Matching is
case-insensitive on whole tokens (normalized forms), deliberately ignoring
part of speech: ambiguous forms such as "still", "last", "next" or
"before" over-match relative to a POS-aware matcher.  A POS-filter hook is
available but off by default.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import ValidationError
from .ingest import BookDocument
from .segment import Sentence, Token, split_sentences, tokenize

__all__ = [
    "CATEGORIES",
    "EXPECTED_CATEGORY_SIZES",
    "LexiconEntry",
    "Occurrence",
    "load_lexicon",
    "match_occurrences",
    "assign_occurrence_ids",
    "category_counts",
]

CATEGORIES = (
    "Immediacy & Suddenness",
    "Frequency & Repetition",
    "Duration & Time Blindness",
    "Sequence & Relative Time",
    "Pace",
    "Overlap",
)

EXPECTED_CATEGORY_SIZES = {
    "Immediacy & Suddenness": 13,
    "Frequency & Repetition": 21,
    "Duration & Time Blindness": 16,
    "Sequence & Relative Time": 23,
    "Pace": 5,
    "Overlap": 2,
}

_SUBGROUPS = ("Past", "Present", "Future-Sequence")


@dataclass(frozen=True)
class LexiconEntry:
    adverb: str
    category: str
    subgroup: str | None = None


@dataclass(frozen=True)
class Occurrence:
    """One marked hit of a temporal expression (lexicon or control group).

    ``token_span`` is half-open over token indices within the sentence and
    ``char_span`` is half-open over characters within the sentence text.
    ``expression`` is the normalized form (the adverb itself for lexicon
    hits); ``group`` is "lexicon" or "time".
    """

    occurrence_id: int
    source_id: str
    sentence_index: int
    token_span: tuple[int, int]
    char_span: tuple[int, int]
    matched_surface: str
    expression: str
    group: str
    category: str | None = None
    rule_id: str | None = None

    def as_record(self) -> dict:
        return {
            "occurrence_id": self.occurrence_id,
            "source_id": self.source_id,
            "sentence_index": self.sentence_index,
            "token_span": list(self.token_span),
            "char_span": list(self.char_span),
            "matched_surface": self.matched_surface,
            "expression": self.expression,
            "group": self.group,
            "category": self.category,
            "rule_id": self.rule_id,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Occurrence":
        return cls(
            occurrence_id=rec["occurrence_id"],
            source_id=rec["source_id"],
            sentence_index=rec["sentence_index"],
            token_span=tuple(rec["token_span"]),
            char_span=tuple(rec["char_span"]),
            matched_surface=rec["matched_surface"],
            expression=rec["expression"],
            group=rec["group"],
            category=rec.get("category"),
            rule_id=rec.get("rule_id"),
        )


def _parse_lexicon(text: str, origin: str, validate_counts: bool) -> list[LexiconEntry]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or set(reader.fieldnames) != {"adverb", "category", "subgroup"}:
        raise ValidationError(f"{origin}: lexicon must have columns adverb, category, subgroup")
    entries: list[LexiconEntry] = []
    seen: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        adverb = (row["adverb"] or "").strip()
        category = (row["category"] or "").strip()
        subgroup = (row["subgroup"] or "").strip() or None
        if not adverb or adverb != adverb.lower():
            raise ValidationError(f"{origin} line {lineno}: adverb must be non-empty lowercase")
        if adverb in seen:
            raise ValidationError(f"{origin} line {lineno}: duplicate adverb '{adverb}'")
        seen.add(adverb)
        if category not in CATEGORIES:
            raise ValidationError(f"{origin} line {lineno}: unknown category '{category}'")
        if subgroup is not None and subgroup not in _SUBGROUPS:
            raise ValidationError(f"{origin} line {lineno}: unknown subgroup '{subgroup}'")
        if subgroup is not None and category != "Sequence & Relative Time":
            raise ValidationError(f"{origin} line {lineno}: subgroup only applies to Sequence & Relative Time")
        entries.append(LexiconEntry(adverb, category, subgroup))

    if validate_counts:
        sizes = {cat: sum(1 for e in entries if e.category == cat) for cat in CATEGORIES}
        if len(entries) != 80 or sizes != EXPECTED_CATEGORY_SIZES:
            raise ValidationError(
                f"{origin}: expected 80 entries with category sizes {EXPECTED_CATEGORY_SIZES}, got {len(entries)} with {sizes}"
            )
    return entries


@lru_cache(maxsize=1)
def _default_lexicon() -> tuple[LexiconEntry, ...]:
    text = resources.files("tempus.data").joinpath("lexicon.csv").read_text("utf-8")
    return tuple(_parse_lexicon(text, "lexicon.csv", validate_counts=True))


def load_lexicon(
    path: str | Path | None = None, *, validate_counts: bool | None = None
) -> list[LexiconEntry]:
    """Load the lexicon; category-size validation defaults to on for the
    shipped file and off for custom files."""
    if path is None:
        return list(_default_lexicon())
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"lexicon file not found: {path}")
    validate = False if validate_counts is None else bool(validate_counts)
    return _parse_lexicon(path.read_text("utf-8"), str(path), validate)


PosFilter = Callable[[Sentence, Token], bool]


def match_occurrences(
    book: BookDocument,
    lexicon: Sequence[LexiconEntry],
    sentences: list[Sentence] | None = None,
    pos_filter: PosFilter | None = None,
) -> list[Occurrence]:
    """Mark all whole-token lexicon matches in one book.

    Occurrence ids are provisional (0-based within the book); call
    assign_occurrence_ids over the whole corpus afterwards.
    """
    by_adverb = {e.adverb: e for e in lexicon}
    if sentences is None:
        sentences = split_sentences(book.text, book.source_id)
    found: list[Occurrence] = []
    for sentence in sentences:
        for tok_idx, token in enumerate(tokenize(sentence)):
            entry = by_adverb.get(token.normalized)
            if entry is None:
                continue
            if pos_filter is not None and not pos_filter(sentence, token):
                continue
            lo = token.char_span[0] + _leading_punct(token.surface)
            found.append(
                Occurrence(
                    occurrence_id=len(found),
                    source_id=book.source_id,
                    sentence_index=sentence.index,
                    token_span=(tok_idx, tok_idx + 1),
                    char_span=(lo, lo + len(token.normalized)),
                    matched_surface=sentence.text[lo : lo + len(token.normalized)],
                    expression=entry.adverb,
                    group="lexicon",
                    category=entry.category,
                )
            )
    return found


def _leading_punct(surface: str) -> int:
    i = 0
    while i < len(surface) and not surface[i].isalnum():
        i += 1
    return i


def assign_occurrence_ids(
    occurrences: Iterable[Occurrence], start: int = 0
) -> list[Occurrence]:
    """Deterministic global ids sorted by (source_id, sentence, offset)."""
    ordered = sorted(
        occurrences,
        key=lambda o: (o.source_id, o.sentence_index, o.char_span[0], o.char_span[1]),
    )
    return [replace(o, occurrence_id=start + i) for i, o in enumerate(ordered)]


def category_counts(
    occurrences: Iterable[Occurrence], lexicon: Sequence[LexiconEntry]
) -> dict:
    """Per-category unique-adverb and mention tallies plus absent adverbs."""
    mentions: dict[str, int] = {}
    for occ in occurrences:
        if occ.group != "lexicon":
            continue
        mentions[occ.expression] = mentions.get(occ.expression, 0) + 1

    per_category: dict[str, dict[str, int]] = {
        cat: {"unique_adverbs": 0, "total_mentions": 0} for cat in CATEGORIES
    }
    absent: list[str] = []
    for entry in lexicon:
        count = mentions.get(entry.adverb, 0)
        if count == 0:
            absent.append(entry.adverb)
            continue
        per_category[entry.category]["unique_adverbs"] += 1
        per_category[entry.category]["total_mentions"] += count
    return {
        "categories": per_category,
        "total_mentions": sum(mentions.values()),
        "unique_adverbs": len(mentions),
        "absent_adverbs": sorted(absent),
    }
