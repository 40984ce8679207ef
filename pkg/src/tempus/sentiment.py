"""Aspect-sentiment scoring and aggregation.

Each context window gets a (negative, neutral, positive) score on the
probability simplex from a pluggable backend, cached by content hash so
re-runs issue no backend calls.  Scores aggregate to expression means,
category means (unweighted by default, occurrence-weighted behind a flag),
two-group Welch comparisons per polarity, and IQR outlier screening.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import stats
from .backends import Backend, ScoreCache, validate_simplex
from .context import ContextWindow
from .errors import ValidationError
from .lexicon import CATEGORIES, Occurrence

__all__ = [
    "PolaritySimplex",
    "ExpressionSentiment",
    "score_window",
    "score_windows",
    "aggregate_expression",
    "aggregate_category",
    "compare_groups",
    "find_outliers",
]

POLARITIES = ("negative", "neutral", "positive")


@dataclass(frozen=True)
class PolaritySimplex:
    negative: float
    neutral: float
    positive: float

    def __post_init__(self):
        validate_simplex((self.negative, self.neutral, self.positive), "PolaritySimplex")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.negative, self.neutral, self.positive)


@dataclass(frozen=True)
class ExpressionSentiment:
    expression: str
    group: str  # lexicon | control
    category: str | None
    n_occurrences: int
    mean_negative: float
    mean_neutral: float
    mean_positive: float

    def mean(self, polarity: str) -> float:
        return getattr(self, f"mean_{polarity}")

    def as_record(self) -> dict:
        return {
            "expression": self.expression,
            "group": self.group,
            "category": self.category,
            "n_occurrences": self.n_occurrences,
            "mean_negative": self.mean_negative,
            "mean_neutral": self.mean_neutral,
            "mean_positive": self.mean_positive,
        }


def score_window(
    window: ContextWindow, backend: Backend, cache: ScoreCache | None = None
) -> PolaritySimplex:
    """Score one window, serving from the cache when possible."""
    key = None
    if cache is not None:
        key = cache.key(backend.model_id, window.text, list(window.aspect_char_span))
        hit = cache.get(key)
        if hit is not None:
            return PolaritySimplex(hit["negative"], hit["neutral"], hit["positive"])
    neg, neu, pos = backend.aspect_sentiment(
        window.text, window.aspect_surface, window.aspect_char_span
    )
    validate_simplex((neg, neu, pos), f"backend {backend.model_id}")
    simplex = PolaritySimplex(neg, neu, pos)
    if cache is not None and key is not None:
        cache.put(key, {"negative": neg, "neutral": neu, "positive": pos})
    return simplex


def score_windows(
    windows: Sequence[ContextWindow],
    backend: Backend,
    cache: ScoreCache | None = None,
    concurrency: int = 8,
) -> list[tuple[int, PolaritySimplex]]:
    """Score many windows with bounded concurrency.

    Results come back sorted by occurrence_id regardless of completion
    order, keeping downstream aggregation deterministic.
    """
    if concurrency < 1:
        raise ValidationError("score_windows: concurrency must be >= 1")
    results: list[tuple[int, PolaritySimplex]] = []
    if concurrency == 1:
        for w in windows:
            results.append((w.occurrence_id, score_window(w, backend, cache)))
    else:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            simplexes = pool.map(lambda w: score_window(w, backend, cache), windows)
            results = [(w.occurrence_id, s) for w, s in zip(windows, simplexes)]
    results.sort(key=lambda pair: pair[0])
    return results


def aggregate_expression(
    scores: Iterable[tuple[Occurrence, PolaritySimplex]],
) -> list[ExpressionSentiment]:
    """Per-expression arithmetic mean of each polarity over occurrences.

    Expressions with zero occurrences never appear here by construction;
    the lexicon module reports absent adverbs separately.
    """
    acc: dict[tuple[str, str], dict] = {}
    for occ, simplex in scores:
        group = "control" if occ.group == "time" else occ.group
        slot = acc.setdefault(
            (group, occ.expression),
            {"category": occ.category, "n": 0, "neg": 0.0, "neu": 0.0, "pos": 0.0},
        )
        slot["n"] += 1
        slot["neg"] += simplex.negative
        slot["neu"] += simplex.neutral
        slot["pos"] += simplex.positive
    out = []
    for (group, expression), slot in sorted(acc.items()):
        n = slot["n"]
        out.append(
            ExpressionSentiment(
                expression=expression,
                group=group,
                category=slot["category"],
                n_occurrences=n,
                mean_negative=slot["neg"] / n,
                mean_neutral=slot["neu"] / n,
                mean_positive=slot["pos"] / n,
            )
        )
    return out


def aggregate_category(
    expression_sentiments: Sequence[ExpressionSentiment],
    weighting: str = "unweighted",
) -> dict[str, dict]:
    """Category-level polarity means over lexicon expressions.

    "unweighted" averages expression means; "occurrence" weights each
    expression by its occurrence count.  Empty categories are reported
    with n_expressions = 0 rather than raising.
    """
    if weighting not in ("unweighted", "occurrence"):
        raise ValidationError(f"aggregate_category: unknown weighting '{weighting}'")
    result: dict[str, dict] = {}
    for category in CATEGORIES:
        members = [
            e for e in expression_sentiments if e.group == "lexicon" and e.category == category
        ]
        if not members:
            result[category] = {"n_expressions": 0, "n_occurrences": 0}
            continue
        if weighting == "unweighted":
            weights = [1.0] * len(members)
        else:
            weights = [float(e.n_occurrences) for e in members]
        wsum = sum(weights)
        result[category] = {
            "n_expressions": len(members),
            "n_occurrences": sum(e.n_occurrences for e in members),
            "mean_negative": sum(w * e.mean_negative for w, e in zip(weights, members)) / wsum,
            "mean_neutral": sum(w * e.mean_neutral for w, e in zip(weights, members)) / wsum,
            "mean_positive": sum(w * e.mean_positive for w, e in zip(weights, members)) / wsum,
        }
    return result


def compare_groups(
    lexicon_sentiments: Sequence[ExpressionSentiment],
    control_sentiments: Sequence[ExpressionSentiment],
) -> dict[str, stats.TestReport]:
    """Welch's t-test per polarity over expression-level means."""
    if len(lexicon_sentiments) < 2 or len(control_sentiments) < 2:
        raise ValidationError("compare_groups: both groups need at least 2 expressions")
    reports = {}
    for polarity in POLARITIES:
        a = [e.mean(polarity) for e in lexicon_sentiments]
        b = [e.mean(polarity) for e in control_sentiments]
        reports[polarity] = stats.welch_t(a, b)
    return reports


def find_outliers(
    expression_sentiments: Sequence[ExpressionSentiment], polarity: str
) -> list[tuple[str, float, str]]:
    """Expressions outside the IQR fences for one polarity.

    Returns (expression, value, side) sorted by value descending then by
    expression, so extreme highs list first.
    """
    if polarity not in POLARITIES:
        raise ValidationError(f"find_outliers: unknown polarity '{polarity}'")
    if len(expression_sentiments) < 4:
        raise ValidationError("find_outliers: need at least 4 expressions")
    values = [e.mean(polarity) for e in expression_sentiments]
    low, high = stats.iqr_fences(values)
    flagged = [
        (e.expression, v, "high" if v > high else "low")
        for e, v in zip(expression_sentiments, values)
        if v > high or v < low
    ]
    flagged.sort(key=lambda item: (-item[1], item[0]))
    return flagged
