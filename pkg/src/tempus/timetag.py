"""Rule-grammar tagger for general date/time expressions.

A deliberately auditable substitute for a statistical NER: every tagged
span comes from a named regex rule in a data file.  Matching is
case-insensitive, longest-match, non-overlapping, and never crosses a
sentence boundary.  Some rules over-match (month "may", season "fall");
the grammar documents what counts as general time rather than adjudicating
part of speech.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ValidationError
from .ingest import BookDocument
from .lexicon import LexiconEntry, Occurrence
from .segment import Sentence, split_sentences, tokenize

__all__ = [
    "GrammarRule",
    "TimeExpression",
    "load_grammar",
    "tag_time_expressions",
    "build_control_group",
    "normalize_expression",
]


@dataclass(frozen=True)
class GrammarRule:
    rule_id: str
    pattern: re.Pattern
    description: str


@dataclass(frozen=True)
class TimeExpression:
    normalized: str
    total_count: int
    rule_id: str

    def as_record(self) -> dict:
        return {
            "normalized": self.normalized,
            "total_count": self.total_count,
            "rule_id": self.rule_id,
        }


def _parse_grammar(text: str, origin: str) -> list[GrammarRule]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or set(reader.fieldnames) != {"rule_id", "pattern", "description"}:
        raise ValidationError(f"{origin}: grammar must have columns rule_id, pattern, description")
    rules = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        rule_id = (row["rule_id"] or "").strip()
        if not rule_id or rule_id in seen:
            raise ValidationError(f"{origin} line {lineno}: missing or duplicate rule_id")
        seen.add(rule_id)
        try:
            pattern = re.compile(row["pattern"], re.IGNORECASE)
        except re.error as exc:
            raise ValidationError(f"{origin} line {lineno}: bad pattern: {exc}") from exc
        rules.append(GrammarRule(rule_id, pattern, row["description"] or ""))
    if not rules:
        raise ValidationError(f"{origin}: grammar file has no rules")
    return rules


@lru_cache(maxsize=1)
def _default_grammar() -> tuple[GrammarRule, ...]:
    text = resources.files("tempus.data").joinpath("time_grammar.csv").read_text("utf-8")
    return tuple(_parse_grammar(text, "time_grammar.csv"))


def load_grammar(path: str | Path | None = None) -> list[GrammarRule]:
    if path is None:
        return list(_default_grammar())
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"grammar file not found: {path}")
    return _parse_grammar(path.read_text("utf-8"), str(path))


def normalize_expression(surface: str) -> str:
    """Lowercase, collapse whitespace, strip a leading article 'the'."""
    norm = " ".join(surface.lower().split())
    if norm.startswith("the "):
        norm = norm[4:]
    return norm


def _select_longest(candidates: list[tuple[int, int, str]]) -> list[tuple[int, int, str]]:
    """Maximal munch: leftmost start wins, longer match breaks ties."""
    chosen: list[tuple[int, int, str]] = []
    last_end = -1
    for start, end, rule_id in sorted(candidates, key=lambda c: (c[0], -(c[1] - c[0]), c[2])):
        if start >= last_end:
            chosen.append((start, end, rule_id))
            last_end = end
    return chosen


def tag_time_expressions(
    book: BookDocument,
    grammar: Sequence[GrammarRule] | None = None,
    sentences: list[Sentence] | None = None,
) -> list[Occurrence]:
    """Tag all grammar matches in one book as provisional occurrences."""
    if grammar is None:
        grammar = _default_grammar()
    if sentences is None:
        sentences = split_sentences(book.text, book.source_id)
    found: list[Occurrence] = []
    for sentence in sentences:
        candidates = [
            (m.start(), m.end(), rule.rule_id)
            for rule in grammar
            for m in rule.pattern.finditer(sentence.text)
        ]
        if not candidates:
            continue
        tokens = tokenize(sentence)
        for start, end, rule_id in _select_longest(candidates):
            covering = [
                i
                for i, t in enumerate(tokens)
                if t.char_span[0] < end and t.char_span[1] > start
            ]
            token_span = (covering[0], covering[-1] + 1) if covering else (0, 0)
            surface = sentence.text[start:end]
            found.append(
                Occurrence(
                    occurrence_id=len(found),
                    source_id=book.source_id,
                    sentence_index=sentence.index,
                    token_span=token_span,
                    char_span=(start, end),
                    matched_surface=surface,
                    expression=normalize_expression(surface),
                    group="time",
                    rule_id=rule_id,
                )
            )
    return found


def build_control_group(
    time_occurrences: Iterable[Occurrence],
    lexicon: Sequence[LexiconEntry],
    min_count: int = 50,
) -> list[TimeExpression]:
    """Frequency-filtered control group, disjoint from the lexicon.

    Groups occurrences by normalized form, drops forms equal to a lexicon
    adverb, drops forms seen fewer than min_count times, and sorts by
    descending count then alphabetically.
    """
    if min_count < 1:
        raise ValidationError("build_control_group: min_count must be >= 1")
    adverbs = {e.adverb for e in lexicon}
    counts: dict[str, int] = {}
    first_rule: dict[str, str] = {}
    for occ in sorted(
        time_occurrences,
        key=lambda o: (o.source_id, o.sentence_index, o.char_span[0]),
    ):
        counts[occ.expression] = counts.get(occ.expression, 0) + 1
        first_rule.setdefault(occ.expression, occ.rule_id or "")
    group = [
        TimeExpression(expr, count, first_rule[expr])
        for expr, count in counts.items()
        if expr not in adverbs and count >= min_count
    ]
    group.sort(key=lambda e: (-e.total_count, e.normalized))
    return group
