"""Window extraction: triplet/pair mechanics, aspect span round-trips."""

from __future__ import annotations

import pytest

from conftest import EXPECTED
from tempus import context, ingest, lexicon
from tempus.errors import ValidationError
from tempus.segment import split_sentences


@pytest.fixture(scope="module")
def lex():
    return lexicon.load_lexicon()


def _occurrences(text: str, lex) -> tuple[list, list]:
    doc = ingest.BookDocument("b", text)
    sentences = split_sentences(doc.text, "b")
    occs = lexicon.assign_occurrence_ids(lexicon.match_occurrences(doc, lex, sentences))
    return occs, sentences


# Ten sentences; the adverb sits in sentence 5 (0-based).
TEN = " ".join(
    [
        "Zero zero.", "One one.", "Two two.", "Three three.", "Four four.",
        "It ended abruptly here.", "Six six.", "Seven seven.", "Eight eight.", "Nine nine.",
    ]
)


class TestExtractWindow:
    def test_middle_is_triplet(self, lex):
        occs, sentences = _occurrences(TEN, lex)
        window = context.extract_window(occs[0], sentences)
        assert window.kind == "triplet"
        assert window.text == "Four four. It ended abruptly here. Six six."

    def test_first_sentence_pair_trailing(self, lex):
        occs, sentences = _occurrences("Suddenly it began. Then what.", lex)
        window = context.extract_window(occs[0], sentences)
        assert window.kind == "pair-trailing"
        assert window.text == "Suddenly it began. Then what."

    def test_last_sentence_pair_leading(self, lex):
        occs, sentences = _occurrences("We waited. It ended abruptly.", lex)
        window = context.extract_window(occs[-1], sentences)
        assert window.kind == "pair-leading"

    def test_single_sentence_degenerate(self, lex):
        occs, sentences = _occurrences("It ended abruptly.", lex)
        window = context.extract_window(occs[0], sentences)
        assert window.kind == "single"
        assert window.text == "It ended abruptly."

    def test_aspect_span_round_trips(self, lex):
        occs, sentences = _occurrences(TEN, lex)
        window = context.extract_window(occs[0], sentences)
        lo, hi = window.aspect_char_span
        assert window.text[lo:hi] == window.aspect_surface == "abruptly"

    def test_same_sentence_two_occurrences(self, lex):
        occs, sentences = _occurrences("Pause. Now or never, they said. Go.", lex)
        assert len(occs) == 2
        w1, w2 = (context.extract_window(o, sentences) for o in occs)
        assert w1.text == w2.text
        assert w1.aspect_char_span != w2.aspect_char_span
        for w in (w1, w2):
            lo, hi = w.aspect_char_span
            assert w.text[lo:hi] == w.aspect_surface

    def test_out_of_range_sentence(self, lex):
        occs, sentences = _occurrences("It ended abruptly. More.", lex)
        import dataclasses

        broken = dataclasses.replace(occs[0], sentence_index=99)
        with pytest.raises(ValidationError, match="out of range"):
            context.extract_window(broken, sentences)


class TestExtractAll:
    def test_empty(self):
        assert list(context.extract_all([], {})) == []

    def test_one_window_per_occurrence_in_order(self, lex):
        occs, sentences = _occurrences(TEN + " It was sudden and never slow.", lex)
        windows = list(context.extract_all(occs, {"b": sentences}))
        assert len(windows) == len(occs)
        assert [w.occurrence_id for w in windows] == [o.occurrence_id for o in occs]

    def test_unsorted_input_rejected(self, lex):
        occs, sentences = _occurrences("Never now. Then later.", lex)
        with pytest.raises(ValidationError, match="sorted"):
            list(context.extract_all(list(reversed(occs)), {"b": sentences}))

    def test_dangling_reference(self, lex):
        occs, sentences = _occurrences("Never mind.", lex)
        with pytest.raises(ValidationError, match="dangling"):
            list(context.extract_all(occs, {"other": sentences}))

    def test_boundary_kind_counts_on_targeted_fixture(self, lex):
        # 12 planted adverbs: 2 in first sentences, 2 in last, 8 in middles
        text_a = (
            "Suddenly it began. It held always. We sat briefly. "
            "They spoke rarely. The end came abruptly."
        )  # first + 3 middle + last
        text_b = (
            "Never had it snowed. It fell constantly. We watched often. "
            "Days passed slowly and eventually. It melted instantly. Spring came promptly."
        )  # first + 5 middle + last
        occs_a, sents_a = _occurrences(text_a, lex)
        doc_b = ingest.BookDocument("c", text_b)
        sents_b = split_sentences(text_b, "c")
        occs_b = lexicon.assign_occurrence_ids(
            lexicon.match_occurrences(doc_b, lex, sents_b), start=len(occs_a)
        )
        windows = list(
            context.extract_all([*occs_a, *occs_b], {"b": sents_a, "c": sents_b})
        )
        kinds = {}
        for w in windows:
            kinds[w.kind] = kinds.get(w.kind, 0) + 1
        assert len(windows) == 12
        assert kinds == {"triplet": 8, "pair-trailing": 2, "pair-leading": 2}

    def test_fixture_corpus_window_census(self, workspace, lex):
        from test_ingest import _fixture_documents
        from tempus import timetag
        from tempus.segment import split_sentences as split

        books, metadata = _fixture_documents(workspace)
        kept, _ = ingest.deduplicate(books, metadata)
        sentences = {b.source_id: split(b.text, b.source_id) for b in kept}
        lex_occs = [o for b in kept for o in lexicon.match_occurrences(b, lex, sentences[b.source_id])]
        time_occs = [o for b in kept for o in timetag.tag_time_expressions(b, sentences=sentences[b.source_id])]
        control = {e.normalized for e in timetag.build_control_group(time_occs, lex, min_count=1)}
        merged = lexicon.assign_occurrence_ids(
            lex_occs + [o for o in time_occs if o.expression in control]
        )
        windows = list(context.extract_all(merged, sentences))
        assert len(windows) == EXPECTED["windows"]
        kinds = {}
        for w in windows:
            kinds[w.kind] = kinds.get(w.kind, 0) + 1
            lo, hi = w.aspect_char_span
            assert w.text[lo:hi] == w.aspect_surface
        assert kinds == EXPECTED["kinds"]
