from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, strategies as st

from evikit import (
    AttributionRecord,
    CorpusValidationError,
    DataError,
    Document,
    EvidenceAnnotation,
    ParseError,
    PredictionSet,
    annotation_span_count,
    contiguous_run_count,
    filter_multi_span_test_cases,
    generate,
    load_corpus,
    spans_to_token_ids,
    SimulatorParams,
)
from evikit.dataio import (
    Corpus,
    load_annotations,
    load_attributions,
    load_documents,
    load_predictions,
    load_thresholds,
    write_annotations,
    write_attributions,
    write_corpus,
    write_documents,
    write_predictions,
    write_thresholds,
)

from conftest import make_ann, make_doc


class TestRoundTrip:
    def test_documents(self, tmp_path):
        docs = [
            Document(doc_id="d1", tokens=("a", "b", "ü"), split="train", extra={"note": "x"}),
            make_doc(4, "d2", "test"),
        ]
        path = tmp_path / "documents.jsonl"
        write_documents(path, docs)
        assert load_documents(path) == docs

    def test_annotations_including_span_count(self, tmp_path):
        anns = [
            make_ann("d1", ids=(1, 2, 5)),
            EvidenceAnnotation(
                doc_id="d2", code="x", style="sufficient", evidence_ids=frozenset({0}), span_count=2,
                extra={"annotator": "a1"},
            ),
        ]
        path = tmp_path / "annotations.jsonl"
        write_annotations(path, anns)
        assert load_annotations(path) == anns

    def test_attributions(self, tmp_path):
        recs = [
            AttributionRecord(
                model_id="m1", regime="IGR", doc_id="d1", code="c", probability=0.125,
                attention=(0.5, 0.5), input_grad_l2=(3.0, 4.0),
            ),
            AttributionRecord(
                model_id="m2", regime="EGT", doc_id="d1", code="c", probability=1 / 3,
                scores=(0.25, 0.75), extra={"pooling": "mean"},
            ),
        ]
        path = tmp_path / "attributions.jsonl"
        write_attributions(path, recs)
        assert load_attributions(path) == recs

    def test_predictions(self, tmp_path):
        preds = [PredictionSet(source_id="ens", doc_id="d1", code="c", token_ids=frozenset({3, 1}))]
        path = tmp_path / "predictions.jsonl"
        write_predictions(path, preds)
        assert load_predictions(path) == preds

    def test_float_precision_survives(self, tmp_path):
        value = 0.1234567890123456789  # more digits than a double carries
        rec = AttributionRecord(
            model_id="m", regime="SIM", doc_id="d", code="c", probability=value, scores=(value, 1 - value)
        )
        path = tmp_path / "attributions.jsonl"
        write_attributions(path, [rec])
        assert load_attributions(path)[0].probability == rec.probability

    def test_simulator_corpus_round_trips_through_files(self, tmp_path):
        docs, anns, recs = generate(SimulatorParams(doc_count=4, tokens_per_doc=30, evidence_per_doc=3, seed=5))
        corpus = Corpus(documents=tuple(docs), annotations=tuple(anns), attributions=tuple(recs))
        paths = write_corpus(tmp_path, corpus)
        loaded = load_corpus(paths["documents"], paths["annotations"], paths["attributions"])
        assert loaded == corpus

    def test_thresholds(self, tmp_path):
        path = tmp_path / "thresholds.jsonl"
        write_thresholds(path, [{"model_id": "m1", "theta": 0.05}, {"model_id": "m2", "theta": 0.1}])
        assert load_thresholds(path) == {"m1": 0.05, "m2": 0.1}


class TestParsing:
    def test_truncated_line_cites_line_number(self, tmp_path):
        path = tmp_path / "documents.jsonl"
        lines = [json.dumps({"doc_id": f"d{i}", "tokens": ["a"], "split": "test"}) for i in range(6)]
        lines.append('{"doc_id": "d6", "tokens": ["a"')
        path.write_text("\n".join(lines), encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_documents(path)
        assert err.value.line_no == 7

    def test_missing_field_is_named(self, tmp_path):
        path = tmp_path / "documents.jsonl"
        path.write_text('{"doc_id": "d1", "split": "test"}\n', encoding="utf-8")
        with pytest.raises(ParseError, match="tokens"):
            load_documents(path)

    def test_unknown_extra_field_preserved(self, tmp_path):
        path = tmp_path / "annotations.jsonl"
        record = {"doc_id": "d1", "code": "c", "style": "complete", "evidence_token_ids": [1], "reviewer": "r7"}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        (ann,) = load_annotations(path)
        assert ann.extra == {"reviewer": "r7"}
        out = tmp_path / "out.jsonl"
        write_annotations(out, [ann])
        assert json.loads(out.read_text())["reviewer"] == "r7"

    def test_construction_error_carries_line(self, tmp_path):
        path = tmp_path / "documents.jsonl"
        path.write_text('{"doc_id": "d1", "tokens": [], "split": "test"}\n', encoding="utf-8")
        with pytest.raises(ParseError, match="nonempty"):
            load_documents(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "documents.jsonl"
        path.write_text('\n{"doc_id": "d1", "tokens": ["a"], "split": "test"}\n\n', encoding="utf-8")
        assert len(load_documents(path)) == 1

    def test_annotations_from_char_spans(self, tmp_path):
        doc = make_doc(4, "d1")
        path = tmp_path / "annotations.jsonl"
        record = {
            "doc_id": "d1",
            "code": "c",
            "style": "complete",
            "evidence_char_spans": [[0, 3], [8, 11]],
            "token_offsets": [[0, 2], [3, 5], [6, 9], [10, 12]],
        }
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        (ann,) = load_annotations(path, [doc])
        assert ann.evidence_ids == {0, 2, 3}
        assert ann.span_count == 2

    def test_load_corpus_rejects_inconsistency(self, tmp_path):
        write_documents(tmp_path / "documents.jsonl", [make_doc(3, "d1")])
        write_annotations(tmp_path / "annotations.jsonl", [make_ann("ghost", ids=(0,))])
        with pytest.raises(CorpusValidationError, match="ghost"):
            load_corpus(tmp_path / "documents.jsonl", tmp_path / "annotations.jsonl")


class TestSpansToTokenIds:
    OFFSETS = [(0, 4), (5, 9), (10, 14), (15, 19), (20, 24), (25, 29)]

    def test_exact_cover(self):
        assert spans_to_token_ids(None, [(15, 29)], self.OFFSETS) == {3, 4, 5}

    def test_empty_span_list(self):
        assert spans_to_token_ids(None, [], self.OFFSETS) == frozenset()

    def test_partial_overlap_counts(self):
        # span covers half of token 2 only
        assert spans_to_token_ids(None, [(12, 14)], self.OFFSETS) == {2}

    def test_single_character_overlap_counts(self):
        assert spans_to_token_ids(None, [(8, 11)], self.OFFSETS) == {1, 2}

    def test_gap_between_tokens_matches_nothing(self):
        assert spans_to_token_ids(None, [(4, 5)], self.OFFSETS) == frozenset()

    def test_span_outside_bounds_rejected(self):
        with pytest.raises(DataError, match="outside"):
            spans_to_token_ids(None, [(10, 40)], self.OFFSETS)
        with pytest.raises(DataError, match="outside"):
            spans_to_token_ids(None, [(-1, 3)], self.OFFSETS)

    def test_offset_count_must_match_document(self):
        with pytest.raises(DataError, match="offsets"):
            spans_to_token_ids(make_doc(3), [(0, 2)], self.OFFSETS)

    def test_non_monotone_offsets_rejected(self):
        with pytest.raises(DataError, match="nondecreasing"):
            spans_to_token_ids(None, [(0, 2)], [(5, 9), (0, 4)])

    @given(
        start=st.integers(0, 20),
        width=st.integers(1, 8),
        grow=st.integers(0, 6),
    )
    def test_enlarging_a_span_never_removes_tokens(self, start, width, grow):
        offsets = [(i * 3, i * 3 + 2) for i in range(10)]
        text_end = offsets[-1][1]
        span = (start, min(text_end, start + width))
        bigger = (max(0, start - grow), min(text_end, start + width + grow))
        small = spans_to_token_ids(None, [span], offsets)
        large = spans_to_token_ids(None, [bigger], offsets)
        assert small <= large


class TestRunCountingAndFiltering:
    def test_single_run_excluded(self):
        ann = make_ann(ids=(1, 2, 3))
        assert filter_multi_span_test_cases([ann]) == []

    def test_two_runs_kept(self):
        ann = make_ann(ids=(1, 2, 9, 10))
        assert filter_multi_span_test_cases([ann]) == [ann]

    def test_sufficient_style_ignored(self):
        ann = make_ann(ids=(1, 5), style="sufficient")
        assert filter_multi_span_test_cases([ann]) == []

    def test_explicit_span_count_takes_precedence(self):
        contiguous_but_two_spans = EvidenceAnnotation(
            doc_id="d", code="c", style="complete", evidence_ids=frozenset({1, 2, 3}), span_count=2
        )
        assert annotation_span_count(contiguous_but_two_spans) == 2
        assert filter_multi_span_test_cases([contiguous_but_two_spans]) == [contiguous_but_two_spans]

    def test_run_count_matches_scan_oracle(self):
        rng = random.Random(31)
        for _ in range(200):
            ids = sorted(rng.sample(range(40), rng.randint(1, 15)))
            runs = 0
            previous = None
            for t in ids:
                if previous is None or t != previous + 1:
                    runs += 1
                previous = t
            assert contiguous_run_count(ids) == runs

    def test_empty_set_has_zero_runs(self):
        assert contiguous_run_count([]) == 0

    def test_funnel_forty_four_to_seventeen(self):
        # 44 complete-style test cases, 17 of which have multi-span evidence
        rng = random.Random(17)
        anns = []
        for i in range(44):
            if i < 17:
                first = rng.randint(0, 10)
                ids = {first, first + 1} | {first + 5}
            else:
                first = rng.randint(0, 10)
                ids = set(range(first, first + rng.randint(1, 4)))
            anns.append(make_ann(f"d{i}", ids=frozenset(ids)))
        survivors = filter_multi_span_test_cases(anns, min_spans=2)
        assert len(survivors) == 17
