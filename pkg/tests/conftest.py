from __future__ import annotations

import pytest

from evikit import AttributionRecord, Document, EvidenceAnnotation


def make_doc(n_tokens: int = 7, doc_id: str = "d1", split: str = "test") -> Document:
    return Document(doc_id=doc_id, tokens=tuple(f"w{i}" for i in range(n_tokens)), split=split)


def make_ann(doc_id: str = "d1", code: str = "410.1", style: str = "complete", ids=(1, 2, 5)) -> EvidenceAnnotation:
    return EvidenceAnnotation(doc_id=doc_id, code=code, style=style, evidence_ids=frozenset(ids))


def make_record(
    doc_len: int = 7,
    model_id: str = "m1",
    doc_id: str = "d1",
    code: str = "410.1",
    probability: float = 0.9,
    scores=None,
) -> AttributionRecord:
    if scores is None:
        scores = [1.0 / doc_len] * doc_len
    return AttributionRecord(
        model_id=model_id,
        regime="SIM",
        doc_id=doc_id,
        code=code,
        probability=probability,
        scores=tuple(scores),
    )


@pytest.fixture
def tiny_corpus():
    """Two documents, annotations in both styles, two models."""
    docs = [make_doc(7, "d1"), make_doc(5, "d2")]
    anns = [
        make_ann("d1", ids=(1, 2, 5)),
        make_ann("d1", style="sufficient", ids=(1,)),
        make_ann("d2", ids=(0, 3)),
    ]
    recs = [
        make_record(7, "m1", "d1"),
        make_record(5, "m1", "d2"),
        make_record(7, "m2", "d1"),
        make_record(5, "m2", "d2"),
    ]
    return docs, anns, recs
