"""Shared fixtures: a small synthetic corpus workspace with planted
occurrences at known positions, duplicates, and boundary cases."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

# Per-book page lists for the synthetic corpus.  Books A6 and A7 are the
# planted duplicates (title+authors key and content hash respectively).
BOOK_PAGES = {
    "A1": [
        "FRONT MATTER\nIGNORE ME",
        "It ended abruptly.  The night was long.\n17\n"
        "She waited for three years until the fog sud-\ndenly lifted.",
        "He always came back.  Yesterday it rained in 1987.",
        "Next Monday we leave at 3:15 pm.\n18\nThe story never ends.",
        "BACK MATTER",
    ],
    "A2": [
        "Life moved quickly here. We often sat by the lake.",
        "Sometimes the winters dragged on endlessly. I still remember the frost.",
        "We met last summer. It was a quiet day and nothing happened.",
    ],
    "A3": [
        "The morning came suddenly. Snow fell for two hours before dawn.",
        "I waited briefly. Then the sun rose.",
    ],
    "A4": [
        "Suddenly it began [NEG]. The middle held steady. "
        "We walked on [POS]. It ended abruptly.",
    ],
    "A5": [
        "We drove for ten days across the plains. The radio played softly.",
        "Today I can still name every town. We arrived in 2001 before the rains.",
    ],
    "A6": ["Another text entirely. It does not matter."],
    "A7": [
        "The morning came suddenly. Snow fell for two hours before dawn.",
        "I waited briefly. Then the sun rose.",
    ],
}

METADATA = [
    {"source_id": "A1", "title": "First Light", "authors": ["Mo Hale"], "year": 1999,
     "main_page_range": [2, 4], "raw_path": "raw/A1.txt"},
    {"source_id": "A2", "title": "Common Ground", "authors": ["Pat Lee"], "year": 2004,
     "main_page_range": [1, 3], "raw_path": "raw/A2"},
    {"source_id": "A3", "title": "Winter Days", "authors": ["Sam Roe"], "year": 2010,
     "main_page_range": [1, 2], "raw_path": "raw/A3.txt"},
    {"source_id": "A4", "title": "Edges", "authors": ["Ann Po"], "year": 2015,
     "main_page_range": [1, 1], "raw_path": "raw/A4.txt"},
    {"source_id": "A5", "title": "Long Roads", "authors": ["Kim Day"], "year": 2018,
     "main_page_range": [1, 2], "raw_path": "raw/A5.txt"},
    # title duplicate of A2 modulo case and whitespace
    {"source_id": "A6", "title": "common  ground", "authors": ["pat lee"], "year": 2005,
     "main_page_range": [1, 1], "raw_path": "raw/A6.txt"},
    # content duplicate of A3 under a different title
    {"source_id": "A7", "title": "Other Winters", "authors": ["Lee Park"], "year": 2011,
     "main_page_range": [1, 2], "raw_path": "raw/A7.txt"},
]

# Planted ground truth, derived from the page texts above by construction.
EXPECTED = {
    "kept_books": ["A1", "A2", "A3", "A4", "A5"],
    "dropped": {"A6": "title_authors", "A7": "content"},
    # "Next Monday" yields both the lexicon token "next" and the control
    # phrase "next monday": the matcher is POS-blind by design.
    "lexicon_occurrences": 21,
    "time_occurrences_tagged": 10,
    # normalized control forms at min_count=1 (lexicon forms excluded)
    "control_forms": sorted(
        ["for three years", "1987", "next monday", "3:15 pm", "last summer",
         "for two hours", "for ten days", "2001"]
    ),
    "lexicon_expressions": sorted(
        ["abruptly", "suddenly", "always", "yesterday", "never", "next",
         "quickly", "often", "sometimes", "endlessly", "still", "last",
         "before", "briefly", "then", "today"]
    ),
    "windows": 29,
    "kinds": {"triplet": 19, "pair-trailing": 5, "pair-leading": 5},
}


def build_workspace(root: Path) -> Path:
    """Write the synthetic corpus workspace under root and return it."""
    ws = root / "ws"
    raw = ws / "raw"
    raw.mkdir(parents=True)
    for source_id, pages in BOOK_PAGES.items():
        if source_id == "A2":  # directory layout, one file per page
            book_dir = raw / "A2"
            book_dir.mkdir()
            for i, page in enumerate(pages, start=1):
                (book_dir / f"page_{i:03d}.txt").write_text(page, "utf-8")
        else:  # form-feed-delimited single file
            (raw / f"{source_id}.txt").write_text("\f".join(pages), "utf-8")
    (ws / "metadata.json").write_text(json.dumps(METADATA, indent=2), "utf-8")
    return ws


@pytest.fixture
def workspace(tmp_path: Path) -> Path:
    return build_workspace(tmp_path)


def write_tate_inputs(ws: Path) -> None:
    """Four participants: all-zero, all-seven, and two mixed; two groups."""
    from tempus.tate import load_items

    items = load_items()
    rows = ["participant_id,item_code,frequency,intensity,impairment"]
    for idx, item in enumerate(items):
        rows.append(f"p1,{item.code},0,0,0")
        rows.append(f"p2,{item.code},7,7,7")
        rows.append(f"p3,{item.code},{idx % 8},{(idx + 3) % 8},{(idx + 5) % 8}")
        rows.append(f"p4,{item.code},{(idx + 1) % 8},{(idx + 4) % 8},{(idx + 2) % 8}")
    (ws / "tate_responses.csv").write_text("\n".join(rows) + "\n", "utf-8")
    (ws / "tate_groups.csv").write_text(
        "participant_id,group\np1,study\np2,control\np3,study\np4,control\n", "utf-8"
    )
