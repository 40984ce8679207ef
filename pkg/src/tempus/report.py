"""Report bundle: CSV tables and the summary statistics file.

Emits data files sufficient to regenerate the analysis figures (category
sentiment, sentiment distributions, category frequency, outliers with one
sample window each) plus summary.json with every aggregate statistic.
Reports are data, not rendered images; every number in summary.json is
recomputable from the persisted JSONL artifacts alone.
"""

from __future__ import annotations

from pathlib import Path

from . import artifacts, sentiment, stats
from .lexicon import Occurrence, category_counts, load_lexicon
from .sentiment import ExpressionSentiment, PolaritySimplex

__all__ = ["emit_reports"]


def _describe_or_none(values: list[float]) -> dict | None:
    if not values:
        return None
    d = stats.describe(values)
    return {
        "n": d.n,
        "mean": d.mean,
        "sd": d.sd,
        "min": d.min,
        "q1": d.q1,
        "median": d.median,
        "q3": d.q3,
        "max": d.max,
        "iqr": d.iqr,
    }


def emit_reports(
    workspace: Path,
    occurrences: list[Occurrence],
    scores: dict[int, PolaritySimplex],
    expression_sentiments: list[ExpressionSentiment],
    window_texts: dict[int, str],
    weighting: str,
) -> dict:
    """Write report CSVs and summary.json; returns the summary dict."""
    report_dir = workspace / "report"
    lex = [e for e in expression_sentiments if e.group == "lexicon"]
    ctl = [e for e in expression_sentiments if e.group == "control"]

    artifacts.write_csv(
        report_dir / "expression_sentiments.csv",
        ["expression", "group", "category", "n_occurrences", "mean_negative", "mean_neutral", "mean_positive"],
        (
            [e.expression, e.group, e.category or "", e.n_occurrences,
             e.mean_negative, e.mean_neutral, e.mean_positive]
            for e in expression_sentiments
        ),
    )

    by_category = sentiment.aggregate_category(expression_sentiments, weighting)
    artifacts.write_csv(
        report_dir / "category_sentiment.csv",
        ["category", "n_expressions", "n_occurrences", "mean_negative", "mean_neutral", "mean_positive"],
        (
            [cat, row["n_expressions"], row["n_occurrences"],
             row.get("mean_negative", ""), row.get("mean_neutral", ""), row.get("mean_positive", "")]
            for cat, row in by_category.items()
            if row["n_expressions"] > 0
        ),
    )

    distribution_rows = []
    distributions: dict[str, dict] = {}
    for group_name, members in (("lexicon", lex), ("control", ctl)):
        distributions[group_name] = {}
        for polarity in sentiment.POLARITIES:
            desc = _describe_or_none([e.mean(polarity) for e in members])
            distributions[group_name][polarity] = desc
            if desc is not None:
                distribution_rows.append(
                    [group_name, polarity, desc["n"], desc["mean"], desc["sd"], desc["min"],
                     desc["q1"], desc["median"], desc["q3"], desc["max"], desc["iqr"]]
                )
    artifacts.write_csv(
        report_dir / "sentiment_distribution.csv",
        ["group", "polarity", "n", "mean", "sd", "min", "q1", "median", "q3", "max", "iqr"],
        distribution_rows,
    )

    lexicon = load_lexicon()
    lex_occurrences = [o for o in occurrences if o.group == "lexicon"]
    frequency = category_counts(lex_occurrences, lexicon)
    artifacts.write_csv(
        report_dir / "category_frequency.csv",
        ["category", "unique_adverbs", "total_mentions"],
        ([cat, row["unique_adverbs"], row["total_mentions"]]
         for cat, row in frequency["categories"].items()),
    )

    # first window per expression, for outlier examples
    first_window: dict[tuple[str, str], str] = {}
    for occ in sorted(occurrences, key=lambda o: o.occurrence_id):
        key = (occ.group, occ.expression)
        if key not in first_window and occ.occurrence_id in window_texts:
            first_window[key] = window_texts[occ.occurrence_id]

    outliers: dict[str, list] = {}
    outlier_rows = []
    for polarity in sentiment.POLARITIES:
        if len(lex) >= 4:
            flagged = sentiment.find_outliers(lex, polarity)
        else:
            flagged = []
        outliers[polarity] = [
            {"expression": expr, "value": value, "side": side} for expr, value, side in flagged
        ]
        for expr, value, side in flagged:
            outlier_rows.append(
                [polarity, expr, value, side, first_window.get(("lexicon", expr), "")]
            )
    artifacts.write_csv(
        report_dir / "outliers.csv",
        ["polarity", "expression", "value", "side", "example_window"],
        outlier_rows,
    )

    notes: list[str] = []
    comparisons = None
    if len(lex) >= 2 and len(ctl) >= 2:
        comparisons = {
            pol: rep.as_dict() for pol, rep in sentiment.compare_groups(lex, ctl).items()
        }
    else:
        notes.append("group comparison skipped: fewer than 2 expressions in a group")

    paired = None
    if len(lex) >= 2:
        # negative vs positive across lexicon expressions, paired by expression
        report = stats.paired_t(
            [e.mean_negative for e in lex], [e.mean_positive for e in lex]
        )
        paired = report.as_dict()
    else:
        notes.append("paired negative-vs-positive test skipped: fewer than 2 lexicon expressions")
    if len(lex) < 4:
        notes.append("outlier screening skipped: fewer than 4 lexicon expressions")

    summary = {
        "counts": {
            "occurrences": len(occurrences),
            "lexicon_occurrences": len(lex_occurrences),
            "control_occurrences": len(occurrences) - len(lex_occurrences),
            "windows": len(window_texts),
            "scores": len(scores),
            "lexicon_expressions": len(lex),
            "control_expressions": len(ctl),
        },
        "category_frequency": frequency,
        "category_sentiment": by_category,
        "weighting": weighting,
        "distributions": distributions,
        "group_comparison_welch": comparisons,
        "lexicon_paired_negative_vs_positive": paired,
        "outliers": outliers,
        "notes": notes,
    }
    artifacts.write_json(workspace / "summary.json", summary)
    return summary
