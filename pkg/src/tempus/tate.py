"""Scoring for structured temporal-experience interview responses.

Forty-two items across seven domains, each rated 0-7 on frequency,
intensity, and impairment.  Item severity is the mean of the three
ratings; the participant total (range 0-294) sums all item severities.
Group comparisons run Mann-Whitney per item; the shared variance of the
first principal component summarizes the severity matrix.

The default item registry ships as a data file (code, name, domain) and
can be swapped for a different instrument layout.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import stats
from .errors import StatsError, ValidationError

__all__ = [
    "TateItem",
    "TateResponse",
    "SeverityScore",
    "load_items",
    "load_responses",
    "score_participant",
    "score_all",
    "compare_item",
    "factor_variance",
    "TOTAL_RANGE",
]

TOTAL_RANGE = (0.0, 294.0)
_RATING_RANGE = range(0, 8)


@dataclass(frozen=True)
class TateItem:
    code: str  # e.g. "5.f"
    name: str
    domain: int  # 1-7


@dataclass(frozen=True)
class TateResponse:
    participant_id: str
    item_code: str
    frequency: int
    intensity: int
    impairment: int


@dataclass(frozen=True)
class SeverityScore:
    participant_id: str
    item_code: str
    value: float  # (frequency + intensity + impairment) / 3, in [0, 7]


def _parse_items(text: str, origin: str, validate: bool) -> list[TateItem]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or set(reader.fieldnames) != {"code", "name", "domain"}:
        raise ValidationError(f"{origin}: item registry must have columns code, name, domain")
    items = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        code = (row["code"] or "").strip()
        if not code or code in seen:
            raise ValidationError(f"{origin} line {lineno}: missing or duplicate item code")
        seen.add(code)
        try:
            domain = int(row["domain"])
        except (TypeError, ValueError):
            raise ValidationError(f"{origin} line {lineno}: domain must be an integer")
        if domain not in range(1, 8):
            raise ValidationError(f"{origin} line {lineno}: domain must be between 1 and 7")
        if not code.startswith(f"{domain}."):
            raise ValidationError(f"{origin} line {lineno}: code '{code}' does not match domain {domain}")
        items.append(TateItem(code, (row["name"] or "").strip(), domain))
    if validate and len(items) != 42:
        raise ValidationError(f"{origin}: expected 42 items, got {len(items)}")
    return items


@lru_cache(maxsize=1)
def _default_items() -> tuple[TateItem, ...]:
    text = resources.files("tempus.data").joinpath("tate_items.csv").read_text("utf-8")
    return tuple(_parse_items(text, "tate_items.csv", validate=True))


def load_items(path: str | Path | None = None) -> list[TateItem]:
    if path is None:
        return list(_default_items())
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"item registry not found: {path}")
    return _parse_items(path.read_text("utf-8"), str(path), validate=False)


def load_responses(path: str | Path) -> list[TateResponse]:
    """Responses CSV: participant_id, item_code, frequency, intensity, impairment."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"responses file not found: {path}")
    expected = {"participant_id", "item_code", "frequency", "intensity", "impairment"}
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise ValidationError(f"{path}: responses must have columns {sorted(expected)}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            ratings = {}
            for scale in ("frequency", "intensity", "impairment"):
                try:
                    value = int(row[scale])
                except (TypeError, ValueError):
                    raise ValidationError(f"{path} line {lineno}: {scale} must be an integer")
                if value not in _RATING_RANGE:
                    raise ValidationError(
                        f"{path} line {lineno}: {scale} rating {value} outside 0-7"
                    )
                ratings[scale] = value
            out.append(
                TateResponse(
                    participant_id=(row["participant_id"] or "").strip(),
                    item_code=(row["item_code"] or "").strip(),
                    **ratings,
                )
            )
    return out


def _severity(resp: TateResponse) -> float:
    return (resp.frequency + resp.intensity + resp.impairment) / 3.0


def score_participant(
    responses: Sequence[TateResponse], items: Sequence[TateItem] | None = None
) -> tuple[list[SeverityScore], float | None, list[str]]:
    """Per-item severities plus the participant total.

    Returns (severities, total, missing_item_codes); the total is None when
    any item is missing rather than being imputed.
    """
    if items is None:
        items = _default_items()
    if not responses:
        raise ValidationError("score_participant: no responses")
    participant = responses[0].participant_id
    codes = {i.code for i in items}
    by_code: dict[str, TateResponse] = {}
    for resp in responses:
        if resp.participant_id != participant:
            raise ValidationError("score_participant: responses span multiple participants")
        if resp.item_code not in codes:
            raise ValidationError(
                f"participant '{participant}': unknown item code '{resp.item_code}'"
            )
        if resp.item_code in by_code:
            raise ValidationError(
                f"participant '{participant}': duplicate response for item '{resp.item_code}'"
            )
        by_code[resp.item_code] = resp
    severities = [
        SeverityScore(participant, item.code, _severity(by_code[item.code]))
        for item in items
        if item.code in by_code
    ]
    missing = sorted(codes - by_code.keys())
    total = None if missing else sum(s.value for s in severities)
    return severities, total, missing


def score_all(
    responses: Sequence[TateResponse], items: Sequence[TateItem] | None = None
) -> dict[str, tuple[list[SeverityScore], float | None, list[str]]]:
    """Score every participant found in the responses, sorted by id."""
    if items is None:
        items = _default_items()
    grouped: dict[str, list[TateResponse]] = {}
    for resp in responses:
        grouped.setdefault(resp.participant_id, []).append(resp)
    return {
        pid: score_participant(grouped[pid], items) for pid in sorted(grouped)
    }


def compare_item(
    group_a: Sequence[float], group_b: Sequence[float]
) -> stats.TestReport:
    """Mann-Whitney comparison of one item's severities across two groups."""
    if not group_a or not group_b:
        raise ValidationError("compare_item: both groups must be non-empty")
    return stats.mann_whitney(group_a, group_b)


def factor_variance(
    severity_matrix: Sequence[Sequence[float]], item_codes: Sequence[str]
) -> tuple[float, list[str]]:
    """First-PC variance fraction of the participants x items matrix.

    Constant item columns carry no variance and are dropped with a report;
    returns (fraction, dropped_item_codes).
    """
    rows = [list(r) for r in severity_matrix]
    if len(rows) < 2:
        raise ValidationError("factor_variance: need at least 2 participants")
    if any(len(r) != len(item_codes) for r in rows):
        raise ValidationError("factor_variance: row width does not match item count")
    dropped = []
    keep_idx = []
    for j in range(len(item_codes)):
        column = [r[j] for r in rows]
        if max(column) == min(column):
            dropped.append(item_codes[j])
        else:
            keep_idx.append(j)
    if not keep_idx:
        raise StatsError("factor_variance: all item columns are constant")
    reduced = [[r[j] for j in keep_idx] for r in rows]
    return stats.first_pc_variance(reduced), dropped
