"""Workspace artifact I/O: deterministic serialization, atomic writes.

Every artifact write goes through a temp-file rename so stages never leave
partial outputs, and every serialization is byte-deterministic (sorted
keys, repr floats) so re-running a stage with unchanged inputs reproduces
identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterable, Iterator

from .errors import MissingArtifactError

__all__ = [
    "atomic_write_text",
    "write_json",
    "read_json",
    "write_jsonl",
    "read_jsonl",
    "write_csv",
    "require",
]


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, "utf-8")
    os.replace(tmp, path)


def write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n")


def read_json(path: Path):
    return json.loads(path.read_text("utf-8"))


def write_jsonl(path: Path, records: Iterable[dict]) -> None:
    lines = [
        json.dumps(rec, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        for rec in records
    ]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_jsonl(path: Path) -> Iterator[dict]:
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_csv(path: Path, header: list[str], rows: Iterable[Iterable]) -> None:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(list(row))
    atomic_write_text(path, buf.getvalue())


def require(path: Path, producer_stage: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(path.name, f"run the '{producer_stage}' stage first")
    return path
