"""Pipeline orchestration: stages as subcommands over a workspace directory.

Stage order: ingest -> stats -> match -> tag-times -> contexts -> score ->
analyze -> sequentiality -> tate.  Every stage is idempotent (re-running
with unchanged inputs produces byte-identical outputs) and writes its
artifacts atomically.  Exit codes: 0 success, 2 validation error, 3
backend failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, asdict
from pathlib import Path

from . import artifacts, ingest, lexicon, report, segment, sentiment, sequentiality, tate, timetag
from .backends import Backend, HttpBackend, ScoreCache, StubBackend
from .context import ContextWindow, extract_all
from .errors import BackendError, MissingArtifactError, TempusError, ValidationError
from .sentiment import PolaritySimplex

__all__ = ["RunConfig", "run_stage", "main", "STAGES"]

BACKEND_URL_ENV = "TEMPUS_BACKEND_URL"


@dataclass(frozen=True)
class RunConfig:
    workspace: str = "."
    backend: str | None = None  # "stub" or a base URL
    min_count: int = 50
    story_len: int = 18
    h_max: int | None = None
    concurrency: int = 8
    weighting: str = "unweighted"
    include_first_sentence: bool = False
    remove_roman_pages: bool = False
    deterministic: bool = True

    def validate(self) -> None:
        if self.min_count < 1:
            raise ValidationError("config: min-count must be >= 1")
        if self.story_len < 2:
            raise ValidationError("config: story-len must be >= 2")
        if self.h_max is not None and self.h_max < 1:
            raise ValidationError("config: h-max must be >= 1")
        if self.concurrency < 1:
            raise ValidationError("config: concurrency must be >= 1")
        if self.weighting not in ("unweighted", "occurrence"):
            raise ValidationError("config: weighting must be 'unweighted' or 'occurrence'")
        if not self.deterministic:
            raise ValidationError("config: deterministic must stay enabled")

    @property
    def workspace_path(self) -> Path:
        return Path(self.workspace)

    def make_backend(self) -> Backend:
        if self.backend is None:
            raise ValidationError(
                "backend not configured: pass --stub or --backend-url, "
                f"or set {BACKEND_URL_ENV}"
            )
        if self.backend == "stub":
            return StubBackend()
        return HttpBackend(self.backend)


def _persist_config(config: RunConfig) -> None:
    artifacts.write_json(config.workspace_path / "run_config.json", asdict(config))


# --- corpus helpers ---------------------------------------------------------


def _manifest(ws: Path) -> dict:
    return artifacts.read_json(artifacts.require(ws / "corpus" / "manifest.json", "ingest"))


def _load_corpus(ws: Path) -> list[ingest.BookDocument]:
    manifest = _manifest(ws)
    books = []
    for entry in manifest["books"]:
        sid = entry["source_id"]
        text_path = artifacts.require(ws / "corpus" / f"{sid}.txt", "ingest")
        books.append(
            ingest.BookDocument(
                source_id=sid,
                text=text_path.read_text("utf-8"),
                cleaning_log=manifest["cleaning_logs"].get(sid, {}),
            )
        )
    return books


def _corpus_sentences(books: list[ingest.BookDocument]) -> dict[str, list[segment.Sentence]]:
    return {b.source_id: segment.split_sentences(b.text, b.source_id) for b in books}


# --- stages -----------------------------------------------------------------


def stage_ingest(config: RunConfig) -> dict:
    ws = config.workspace_path
    meta_path = ws / "metadata.json"
    if not meta_path.exists():
        raise MissingArtifactError("metadata.json", "place the corpus metadata in the workspace")
    records = ingest.load_metadata(meta_path)
    by_id = {m.source_id: m for m in records}

    books = []
    logs: dict[str, dict] = {}
    for meta in records:  # metadata file order; dedup keeps first occurrence
        raw_path = Path(meta.raw_path)
        if not raw_path.is_absolute():
            raw_path = ws / raw_path
        raw = ingest.load_raw_book(meta.source_id, raw_path)
        text = ingest.extract_main_text(raw, meta.main_page_range)
        cleaned, log = ingest.clean_text(
            text, remove_roman_numeral_lines=config.remove_roman_pages
        )
        books.append(ingest.BookDocument(meta.source_id, cleaned, log))
        logs[meta.source_id] = log

    kept, dropped = ingest.deduplicate(books, by_id)
    for book in kept:
        artifacts.atomic_write_text(ws / "corpus" / f"{book.source_id}.txt", book.text)
    manifest = {
        "books": sorted(
            (
                {
                    "source_id": b.source_id,
                    "title": by_id[b.source_id].title,
                    "authors": list(by_id[b.source_id].authors),
                    "year": by_id[b.source_id].year,
                }
                for b in kept
            ),
            key=lambda e: e["source_id"],
        ),
        "dropped": dropped,
        "cleaning_logs": {b.source_id: logs[b.source_id] for b in kept},
    }
    artifacts.write_json(ws / "corpus" / "manifest.json", manifest)
    return {"books": len(kept), "dropped": len(dropped)}


def stage_stats(config: RunConfig) -> dict:
    ws = config.workspace_path
    books = _load_corpus(ws)
    result = ingest.corpus_stats(books)
    artifacts.write_json(ws / "corpus" / "corpus_stats.json", result.as_dict())
    return result.as_dict()


def stage_match(config: RunConfig) -> dict:
    ws = config.workspace_path
    books = _load_corpus(ws)
    lex = lexicon.load_lexicon()
    sentences = _corpus_sentences(books)
    found = []
    for book in sorted(books, key=lambda b: b.source_id):
        found.extend(lexicon.match_occurrences(book, lex, sentences[book.source_id]))
    numbered = lexicon.assign_occurrence_ids(found, start=0)
    artifacts.write_jsonl(ws / "occurrences.jsonl", (o.as_record() for o in numbered))
    return {"occurrences": len(numbered)}


def stage_tag_times(config: RunConfig) -> dict:
    ws = config.workspace_path
    lexicon_count = sum(1 for _ in artifacts.read_jsonl(artifacts.require(ws / "occurrences.jsonl", "match")))
    books = _load_corpus(ws)
    sentences = _corpus_sentences(books)
    grammar = timetag.load_grammar()
    found = []
    for book in sorted(books, key=lambda b: b.source_id):
        found.extend(timetag.tag_time_expressions(book, grammar, sentences[book.source_id]))
    numbered = lexicon.assign_occurrence_ids(found, start=lexicon_count)
    artifacts.write_jsonl(ws / "time_occurrences.jsonl", (o.as_record() for o in numbered))

    lex = lexicon.load_lexicon()
    group = timetag.build_control_group(numbered, lex, config.min_count)
    adverbs = {e.adverb for e in lex}
    overlap = [e.normalized for e in group if e.normalized in adverbs]
    if overlap:  # invariant checked on every run, not only under -O-less pytest
        raise ValidationError(f"control group overlaps lexicon: {overlap}")
    artifacts.write_json(
        ws / "control_group.json",
        {
            "min_count": config.min_count,
            "n_expressions": len(group),
            "total_occurrences": sum(e.total_count for e in group),
            "expressions": [e.as_record() for e in group],
        },
    )
    return {"tagged": len(numbered), "control_expressions": len(group)}


def _load_scoring_occurrences(ws: Path) -> list[lexicon.Occurrence]:
    """Lexicon occurrences plus time occurrences retained in the control group."""
    lex_occs = [
        lexicon.Occurrence.from_record(r)
        for r in artifacts.read_jsonl(artifacts.require(ws / "occurrences.jsonl", "match"))
    ]
    control = artifacts.read_json(artifacts.require(ws / "control_group.json", "tag-times"))
    retained = {e["normalized"] for e in control["expressions"]}
    time_occs = [
        occ
        for r in artifacts.read_jsonl(artifacts.require(ws / "time_occurrences.jsonl", "tag-times"))
        if (occ := lexicon.Occurrence.from_record(r)).expression in retained
    ]
    merged = lex_occs + time_occs
    merged.sort(key=lambda o: o.occurrence_id)
    return merged


def stage_contexts(config: RunConfig) -> dict:
    ws = config.workspace_path
    occurrences = _load_scoring_occurrences(ws)
    books = _load_corpus(ws)
    sentences = _corpus_sentences(books)
    windows = list(extract_all(occurrences, sentences))
    artifacts.write_jsonl(ws / "windows.jsonl", (w.as_record() for w in windows))
    return {"windows": len(windows)}


def stage_score(config: RunConfig) -> dict:
    ws = config.workspace_path
    windows = [
        ContextWindow.from_record(r)
        for r in artifacts.read_jsonl(artifacts.require(ws / "windows.jsonl", "contexts"))
    ]
    backend = config.make_backend()
    cache = ScoreCache(ws / "cache")
    scored = sentiment.score_windows(windows, backend, cache, config.concurrency)
    artifacts.write_jsonl(
        ws / "scores.jsonl",
        (
            {
                "occurrence_id": occ_id,
                "negative": simplex.negative,
                "neutral": simplex.neutral,
                "positive": simplex.positive,
                "model_id": backend.model_id,
            }
            for occ_id, simplex in scored
        ),
    )
    return {"scores": len(scored)}


def stage_analyze(config: RunConfig) -> dict:
    ws = config.workspace_path
    occurrences = _load_scoring_occurrences(ws)
    by_id = {o.occurrence_id: o for o in occurrences}
    scores: dict[int, PolaritySimplex] = {}
    for rec in artifacts.read_jsonl(artifacts.require(ws / "scores.jsonl", "score")):
        scores[rec["occurrence_id"]] = PolaritySimplex(
            rec["negative"], rec["neutral"], rec["positive"]
        )
    missing = sorted(set(by_id) - set(scores))
    if missing:
        raise ValidationError(f"analyze: {len(missing)} occurrences lack scores (first: {missing[0]})")
    window_texts = {
        rec["occurrence_id"]: rec["text"]
        for rec in artifacts.read_jsonl(artifacts.require(ws / "windows.jsonl", "contexts"))
    }
    pairs = [(by_id[i], scores[i]) for i in sorted(by_id)]
    expression_sentiments = sentiment.aggregate_expression(pairs)
    summary = report.emit_reports(
        ws, occurrences, scores, expression_sentiments, window_texts, config.weighting
    )
    return {"expressions": len(expression_sentiments), "notes": summary["notes"]}


def stage_sequentiality(config: RunConfig) -> dict:
    ws = config.workspace_path
    manifest = _manifest(ws)
    books = _load_corpus(ws)
    sentences = _corpus_sentences(books)
    titles = {e["source_id"]: e["title"] for e in manifest["books"]}
    stories = []
    skipped = []
    for book in sorted(books, key=lambda b: b.source_id):
        story = sequentiality.build_story(
            book.source_id, titles[book.source_id], sentences[book.source_id], config.story_len
        )
        if story is None:
            skipped.append(book.source_id)
        else:
            stories.append(story)
    if not stories:
        raise ValidationError("sequentiality: no book has the 2+ sentences a story needs")
    backend = config.make_backend()
    curve = sequentiality.sweep_history(
        stories,
        backend,
        h_max=config.h_max,
        disk_cache=ScoreCache(ws / "cache"),
        include_first=config.include_first_sentence,
        concurrency=config.concurrency,
    )
    artifacts.write_csv(
        ws / "sequentiality.csv",
        ["story_id", "h", "value"],
        (
            [sid, str(h), curve.per_story[sid][h]]
            for sid in sorted(curve.per_story)
            for h in curve.history_sizes
        ),
    )
    summary = curve.as_summary()
    summary["skipped_books"] = skipped
    artifacts.write_json(ws / "sequentiality_summary.json", summary)
    return {"stories": len(stories), "skipped": len(skipped)}


def stage_tate(config: RunConfig) -> dict:
    ws = config.workspace_path
    responses_path = ws / "tate_responses.csv"
    if not responses_path.exists():
        raise MissingArtifactError("tate_responses.csv", "place interview responses in the workspace")
    items_path = ws / "tate_items.csv"
    items = tate.load_items(items_path if items_path.exists() else None)
    responses = tate.load_responses(responses_path)
    scored = tate.score_all(responses, items)

    artifacts.write_csv(
        ws / "tate_scores.csv",
        ["participant_id", "item_code", "severity", "total"],
        (
            [pid, s.item_code, s.value, "" if total is None else total]
            for pid, (severities, total, _missing) in scored.items()
            for s in severities
        ),
    )

    complete = {pid: v for pid, v in scored.items() if v[1] is not None}
    result: dict = {
        "participants": len(scored),
        "complete_participants": len(complete),
        "incomplete": {pid: scored[pid][2] for pid in scored if scored[pid][1] is None},
        "totals": {pid: complete[pid][1] for pid in sorted(complete)},
    }

    if len(complete) >= 2:
        matrix = [
            [s.value for s in complete[pid][0]] for pid in sorted(complete)
        ]
        fraction, dropped = tate.factor_variance(matrix, [i.code for i in items])
        result["first_pc_variance"] = fraction
        result["constant_items_dropped"] = dropped
    else:
        result["first_pc_variance"] = None
        result["constant_items_dropped"] = []

    groups_path = ws / "tate_groups.csv"
    comparisons: dict[str, dict] = {}
    if groups_path.exists():
        assignment = _load_groups(groups_path)
        labels = sorted(set(assignment.values()))
        if len(labels) != 2:
            raise ValidationError(f"tate_groups.csv: need exactly 2 groups, got {labels}")
        for item in items:
            a, b = [], []
            for pid, (severities, _total, _missing) in scored.items():
                value = next((s.value for s in severities if s.item_code == item.code), None)
                if value is None or pid not in assignment:
                    continue
                (a if assignment[pid] == labels[0] else b).append(value)
            if a and b:
                comparisons[item.code] = tate.compare_item(a, b).as_dict()
        result["groups"] = labels
    result["item_comparisons"] = comparisons
    artifacts.write_json(ws / "tate_comparisons.json", result)
    return {"participants": len(scored), "comparisons": len(comparisons)}


def _load_groups(path: Path) -> dict[str, str]:
    import csv as _csv

    with path.open(encoding="utf-8", newline="") as handle:
        reader = _csv.DictReader(handle)
        if reader.fieldnames is None or set(reader.fieldnames) != {"participant_id", "group"}:
            raise ValidationError(f"{path}: groups file must have columns participant_id, group")
        return {row["participant_id"].strip(): row["group"].strip() for row in reader}


STAGES = {
    "ingest": stage_ingest,
    "stats": stage_stats,
    "match": stage_match,
    "tag-times": stage_tag_times,
    "contexts": stage_contexts,
    "score": stage_score,
    "analyze": stage_analyze,
    "sequentiality": stage_sequentiality,
    "tate": stage_tate,
}


def run_stage(stage: str, config: RunConfig) -> dict:
    """Validate config, persist it, then run one stage."""
    if stage not in STAGES:
        raise ValidationError(f"unknown stage '{stage}' (expected one of {', '.join(STAGES)})")
    config.validate()
    config.workspace_path.mkdir(parents=True, exist_ok=True)
    _persist_config(config)
    return STAGES[stage](config)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempus",
        description="Temporal-language corpus analysis pipeline",
    )
    parser.add_argument("stage", choices=[*STAGES, "all"], help="pipeline stage to run")
    parser.add_argument("--workspace", default=".", help="workspace directory (default: .)")
    backend = parser.add_mutually_exclusive_group()
    backend.add_argument("--stub", action="store_true", help="use the in-process deterministic stub backend")
    backend.add_argument("--backend-url", default=None, help=f"inference sidecar URL (or set {BACKEND_URL_ENV})")
    parser.add_argument("--min-count", type=int, default=50, help="control-group frequency cut-off")
    parser.add_argument("--story-len", type=int, default=18, help="sentences per story")
    parser.add_argument("--h-max", type=int, default=None, help="cap the history sweep")
    parser.add_argument("--concurrency", type=int, default=8, help="max in-flight backend requests")
    parser.add_argument("--weighting", choices=["unweighted", "occurrence"], default="unweighted")
    parser.add_argument("--include-first-sentence", action="store_true",
                        help="include the (identically zero) first-sentence term in sequentiality means")
    parser.add_argument("--remove-roman-pages", action="store_true",
                        help="also drop roman-numeral-only lines during cleaning")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.stub:
        backend = "stub"
    elif args.backend_url:
        backend = args.backend_url
    else:
        backend = os.environ.get(BACKEND_URL_ENV) or None
    return RunConfig(
        workspace=args.workspace,
        backend=backend,
        min_count=args.min_count,
        story_len=args.story_len,
        h_max=args.h_max,
        concurrency=args.concurrency,
        weighting=args.weighting,
        include_first_sentence=args.include_first_sentence,
        remove_roman_pages=args.remove_roman_pages,
    )


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    stages = list(STAGES) if args.stage == "all" else [args.stage]
    try:
        for stage in stages:
            if args.stage == "all" and stage == "tate" and not (
                config.workspace_path / "tate_responses.csv"
            ).exists():
                print("tate: skipped (no tate_responses.csv in workspace)")
                continue
            result = run_stage(stage, config)
            details = ", ".join(f"{k}={v}" for k, v in result.items())
            print(f"{stage}: ok ({details})")
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TempusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
