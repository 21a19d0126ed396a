from __future__ import annotations

import pytest

from evikit import (
    AttributionRecord,
    Document,
    EvidenceAnnotation,
    PredictionSet,
    SampleKey,
    validate_corpus,
)

from conftest import make_ann, make_doc, make_record


class TestConstruction:
    def test_document_rejects_empty_tokens(self):
        with pytest.raises(ValueError, match="tokens"):
            Document(doc_id="d", tokens=(), split="test")

    def test_document_rejects_bad_split(self):
        with pytest.raises(ValueError, match="split"):
            Document(doc_id="d", tokens=("a",), split="dev")

    def test_document_rejects_empty_id(self):
        with pytest.raises(ValueError, match="doc_id"):
            Document(doc_id="", tokens=("a",), split="test")

    def test_annotation_rejects_empty_evidence(self):
        with pytest.raises(ValueError, match="nonempty"):
            EvidenceAnnotation(doc_id="d", code="c", style="complete", evidence_ids=frozenset())

    def test_annotation_rejects_unknown_style(self):
        with pytest.raises(ValueError, match="style"):
            make_ann(style="partial")

    def test_record_needs_scores_or_signal_pair(self):
        with pytest.raises(ValueError, match="scores"):
            AttributionRecord(
                model_id="m", regime="IGR", doc_id="d", code="c", probability=0.5, attention=(0.5, 0.5)
            )

    def test_record_rejects_probability_outside_unit(self):
        with pytest.raises(ValueError, match="probability"):
            make_record(probability=1.5)

    def test_record_rejects_negative_attention(self):
        with pytest.raises(ValueError, match="non-negative"):
            AttributionRecord(
                model_id="m",
                regime="EGT",
                doc_id="d",
                code="c",
                probability=0.5,
                attention=(-0.1, 1.1),
                input_grad_l2=(1.0, 1.0),
            )

    def test_prediction_set_may_be_empty(self):
        p = PredictionSet(source_id="m", doc_id="d", code="c", token_ids=frozenset())
        assert p.token_ids == frozenset()

    def test_sample_key_orders_and_hashes(self):
        keys = {SampleKey("d2", "a"), SampleKey("d1", "b"), SampleKey("d1", "a")}
        assert sorted(keys)[0] == SampleKey("d1", "a")

    def test_types_are_immutable(self):
        doc = make_doc()
        with pytest.raises(AttributeError):
            doc.doc_id = "other"


class TestValidateCorpus:
    def test_consistent_corpus_yields_no_errors(self, tiny_corpus):
        docs, anns, recs = tiny_corpus
        assert validate_corpus(docs, anns, recs) == []

    def test_unknown_doc_id_is_named(self):
        docs = [make_doc()]
        anns = [make_ann(doc_id="X", ids=(0,))]
        errors = validate_corpus(docs, anns, [])
        assert len(errors) == 1
        assert "'X'" in errors[0]

    def test_vector_length_mismatch_is_single_error(self):
        docs = [make_doc(7)]
        rec = make_record(doc_len=5)  # 5-entry scores against a 7-token document
        errors = validate_corpus(docs, [], [rec])
        assert len(errors) == 1
        assert "length 5" in errors[0] and "7 tokens" in errors[0]

    def test_out_of_range_evidence_ids(self):
        docs = [make_doc(4)]
        anns = [make_ann(ids=(1, 9))]
        errors = validate_corpus(docs, anns, [])
        assert len(errors) == 1
        assert "[9]" in errors[0]

    def test_duplicate_detection(self):
        docs = [make_doc(), make_doc()]
        anns = [make_ann(), make_ann()]
        recs = [make_record(), make_record()]
        errors = validate_corpus(docs, anns, recs)
        assert sum("duplicate" in e for e in errors) == 3

    def test_order_independent_up_to_error_ordering(self, tiny_corpus):
        docs, anns, recs = tiny_corpus
        anns = anns + [make_ann(doc_id="missing", ids=(0,))]
        recs = recs + [make_record(doc_len=3, model_id="m9")]
        forward = validate_corpus(docs, anns, recs)
        backward = validate_corpus(list(reversed(docs)), list(reversed(anns)), list(reversed(recs)))
        assert sorted(forward) == sorted(backward)
