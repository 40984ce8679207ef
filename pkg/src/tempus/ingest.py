"""Corpus ingestion: metadata, page extraction, cleaning, de-duplication.

Raw books arrive as per-page plain text, either one file with pages
delimited by form feed (U+000C) or a directory with one file per page
(sorted by filename).  Cleaning removes page-number lines and mid-word line
breaks and normalizes whitespace; it is idempotent by construction.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from . import segment

__all__ = [
    "BookMetadata",
    "RawBook",
    "BookDocument",
    "CorpusStats",
    "load_metadata",
    "load_raw_book",
    "extract_main_text",
    "clean_text",
    "deduplicate",
    "corpus_stats",
]


@dataclass(frozen=True)
class BookMetadata:
    source_id: str
    title: str
    authors: tuple[str, ...]
    year: int
    main_page_range: tuple[int, int]  # 1-based, inclusive
    raw_path: str


@dataclass(frozen=True)
class RawBook:
    source_id: str
    pages: tuple[str, ...]


@dataclass(frozen=True)
class BookDocument:
    source_id: str
    text: str
    cleaning_log: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class CorpusStats:
    book_count: int
    per_unit: dict[str, dict[str, float]]  # unit -> {average, median, total}

    def as_dict(self) -> dict:
        return {"book_count": self.book_count, "units": self.per_unit}


_METADATA_FIELDS = ("source_id", "title", "authors", "year", "main_page_range", "raw_path")


def load_metadata(path: str | Path) -> list[BookMetadata]:
    """Parse and validate the metadata file (a JSON array of records)."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"metadata file not found: {path}")
    try:
        raw = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"metadata file is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ValidationError("metadata file must contain a JSON array")

    records: list[BookMetadata] = []
    seen: set[str] = set()
    for idx, rec in enumerate(raw):
        if not isinstance(rec, dict):
            raise ValidationError(f"metadata record {idx}: not an object")
        for name in _METADATA_FIELDS:
            if name not in rec:
                raise ValidationError(f"metadata record {idx}: missing field '{name}'")
        source_id = rec["source_id"]
        if not isinstance(source_id, str) or not source_id:
            raise ValidationError(f"metadata record {idx}: field 'source_id' must be a non-empty string")
        if source_id in seen:
            raise ValidationError(f"metadata record {idx}: duplicate source_id '{source_id}'")
        seen.add(source_id)
        if not isinstance(rec["title"], str):
            raise ValidationError(f"metadata record {idx}: field 'title' must be a string")
        authors = rec["authors"]
        if not isinstance(authors, list) or not all(isinstance(a, str) for a in authors):
            raise ValidationError(f"metadata record {idx}: field 'authors' must be a list of strings")
        if not isinstance(rec["year"], int):
            raise ValidationError(f"metadata record {idx}: field 'year' must be an integer")
        pr = rec["main_page_range"]
        if (
            not isinstance(pr, list)
            or len(pr) != 2
            or not all(isinstance(p, int) for p in pr)
            or pr[0] < 1
            or pr[1] < pr[0]
        ):
            raise ValidationError(
                f"metadata record {idx}: field 'main_page_range' must be [start, end] with 1 <= start <= end"
            )
        if not isinstance(rec["raw_path"], str) or not rec["raw_path"]:
            raise ValidationError(f"metadata record {idx}: field 'raw_path' must be a non-empty string")
        records.append(
            BookMetadata(
                source_id=source_id,
                title=rec["title"],
                authors=tuple(authors),
                year=rec["year"],
                main_page_range=(pr[0], pr[1]),
                raw_path=rec["raw_path"],
            )
        )
    return records


def load_raw_book(source_id: str, path: str | Path) -> RawBook:
    """Load per-page text: form-feed-delimited file or one-file-per-page dir."""
    path = Path(path)
    if path.is_dir():
        page_files = sorted(p for p in path.iterdir() if p.is_file())
        if not page_files:
            raise ValidationError(f"{source_id}: page directory {path} is empty")
        pages = tuple(p.read_text("utf-8") for p in page_files)
    elif path.is_file():
        text = path.read_text("utf-8")
        parts = text.split("\f")
        if parts and parts[-1] == "":
            parts = parts[:-1]  # trailing form feed
        if not parts:
            raise ValidationError(f"{source_id}: raw file {path} has no pages")
        pages = tuple(parts)
    else:
        raise ValidationError(f"{source_id}: raw path not found: {path}")
    return RawBook(source_id=source_id, pages=pages)


def extract_main_text(raw: RawBook, page_range: tuple[int, int]) -> str:
    """Join pages[start..end] (1-based, inclusive) with single line breaks."""
    start, end = page_range
    if start < 1 or end > len(raw.pages) or start > end:
        raise ValidationError(
            f"{raw.source_id}: page range ({start}, {end}) out of bounds for {len(raw.pages)} pages"
        )
    return "\n".join(raw.pages[start - 1 : end])


_PAGE_NUMBER_LINE = re.compile(r"^[^\S\n]*\d+[^\S\n]*$\n?", re.MULTILINE)
_ROMAN_LINE = re.compile(r"^[^\S\n]*[ivxlcdm]+[^\S\n]*$\n?", re.MULTILINE | re.IGNORECASE)
_HYPHEN_BREAK = re.compile(r"-\n(?=(.))", re.DOTALL)
_WS_AROUND_BREAK = re.compile(r"[^\S\n]+\n[^\S\n]*|\n[^\S\n]+")
_HORIZONTAL_RUN = re.compile(r"[^\S\n]{2,}|[^\S\n ]")  # runs, or a lone tab/FF
_BREAK_RUN = re.compile(r"\n{3,}")


def clean_text(
    text: str, *, remove_roman_numeral_lines: bool = False
) -> tuple[str, dict[str, int]]:
    """Clean extracted page text; returns (text, cleaning_log).

    In order: (1) drop lines that are only digits (page numbers); (2) join
    mid-word line breaks (hyphen + break + lowercase letter); (3) collapse
    horizontal whitespace runs to one space and runs of three or more line
    breaks to two, then trim.  Roman-numeral page lines are only dropped
    when requested.  Counts in the log: page_numbers = lines removed,
    dehyphenations = joins made, whitespace = runs collapsed or removed.
    The function is idempotent: clean(clean(x)) == clean(x).
    """
    log = {"page_numbers": 0, "dehyphenations": 0, "whitespace": 0}
    text = text.replace("\r\n", "\n").replace("\r", "\n")

    # Iterate the rule sequence to a fixpoint: removing a digit line or a
    # whitespace run can expose a new hyphen-break pair.  Every change
    # strictly shortens the text, so this terminates.
    while True:
        text, changed = _clean_pass(text, log, remove_roman_numeral_lines)
        if not changed:
            return text, log


def _clean_pass(text: str, log: dict[str, int], roman: bool) -> tuple[str, bool]:
    before = text

    text, n = _PAGE_NUMBER_LINE.subn("", text)
    log["page_numbers"] += n
    if roman:
        text, n = _ROMAN_LINE.subn("", text)
        log["page_numbers"] += n

    fired = 0

    def join(m: re.Match) -> str:
        nonlocal fired
        if m.group(1).islower():
            fired += 1
            return ""
        return m.group(0)

    while True:
        text = _HYPHEN_BREAK.sub(join, text)
        log["dehyphenations"] += fired
        if fired == 0:
            break
        fired = 0

    text, n = _WS_AROUND_BREAK.subn("\n", text)
    log["whitespace"] += n
    text, n = _HORIZONTAL_RUN.subn(" ", text)
    log["whitespace"] += n
    text, n = _BREAK_RUN.subn("\n\n", text)
    log["whitespace"] += n
    text = text.strip()
    return text, text != before


def _dedup_key(meta: BookMetadata) -> str:
    def norm(s: str) -> str:
        return " ".join(s.lower().split())

    return norm(meta.title) + "::" + ";".join(norm(a) for a in meta.authors)


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def deduplicate(
    books: list[BookDocument], metadata: dict[str, BookMetadata]
) -> tuple[list[BookDocument], list[dict]]:
    """Drop books duplicating an earlier title+authors key or content hash.

    Keeps the first occurrence; order is stable.  Returns (kept, drop
    report), where each report entry names the duplicate and what it
    duplicated.
    """
    kept: list[BookDocument] = []
    dropped: list[dict] = []
    seen_keys: dict[str, str] = {}
    seen_hashes: dict[str, str] = {}
    for book in books:
        meta = metadata.get(book.source_id)
        if meta is None:
            raise ValidationError(f"deduplicate: no metadata for source '{book.source_id}'")
        key = _dedup_key(meta)
        digest = content_hash(book.text)
        if key in seen_keys:
            dropped.append(
                {"source_id": book.source_id, "duplicate_of": seen_keys[key], "reason": "title_authors"}
            )
            continue
        if digest in seen_hashes:
            dropped.append(
                {"source_id": book.source_id, "duplicate_of": seen_hashes[digest], "reason": "content"}
            )
            continue
        seen_keys[key] = book.source_id
        seen_hashes[digest] = book.source_id
        kept.append(book)
    return kept, dropped


def _aggregate(counts: list[int]) -> dict[str, float]:
    n = len(counts)
    ordered = sorted(counts)
    total = sum(ordered)
    if n % 2 == 1:
        median = float(ordered[n // 2])
    else:
        median = (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0
    return {"average": total / n, "median": median, "total": total}


def corpus_stats(books: list[BookDocument]) -> CorpusStats:
    """Sentence/word/character counts aggregated over the corpus.

    Characters are counted on the cleaned text, whitespace included.
    """
    if not books:
        raise ValidationError("corpus_stats: empty corpus")
    sentences: list[int] = []
    words: list[int] = []
    chars: list[int] = []
    for book in sorted(books, key=lambda b: b.source_id):
        sents = segment.split_sentences(book.text, book.source_id)
        sentences.append(len(sents))
        words.append(segment.count_words(sents))
        chars.append(len(book.text))
    return CorpusStats(
        book_count=len(books),
        per_unit={
            "sentences": _aggregate(sentences),
            "words": _aggregate(words),
            "characters": _aggregate(chars),
        },
    )
