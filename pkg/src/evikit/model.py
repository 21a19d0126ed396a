"""Domain types: documents, annotations, attribution records, prediction sets.

Token ids are 0-based positions into a document's token sequence, so repeated
surface tokens stay distinct evidence items. All types are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

SPLITS = ("train", "validation", "test")
STYLES = ("sufficient", "complete")
REGIMES = ("IGR", "EGT", "SIM")

# A token id is a position into Document.tokens.
TokenId = int


def _freeze_extra(extra: Optional[Mapping[str, Any]]) -> dict[str, Any]:
    return dict(extra) if extra else {}


@dataclass(frozen=True, eq=True)
class Document:
    """A tokenized document; the universe all evidence sets index into."""

    doc_id: str
    tokens: tuple[str, ...]
    split: str
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "extra", _freeze_extra(self.extra))
        if not self.doc_id:
            raise ValueError("doc_id must be nonempty")
        if not self.tokens:
            raise ValueError(f"document {self.doc_id!r}: tokens must be nonempty")
        if self.split not in SPLITS:
            raise ValueError(f"document {self.doc_id!r}: split must be one of {SPLITS}, got {self.split!r}")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, eq=True)
class EvidenceAnnotation:
    """Human ground-truth token ids for one (document, code), sufficient or complete style.

    span_count, when present, carries the number of annotated character spans the
    evidence came from; otherwise span structure is derived from contiguous runs.
    """

    doc_id: str
    code: str
    style: str
    evidence_ids: frozenset[TokenId]
    span_count: Optional[int] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "evidence_ids", frozenset(int(t) for t in self.evidence_ids))
        object.__setattr__(self, "extra", _freeze_extra(self.extra))
        if not self.doc_id:
            raise ValueError("annotation doc_id must be nonempty")
        if self.style not in STYLES:
            raise ValueError(f"annotation {self.doc_id!r}/{self.code!r}: style must be one of {STYLES}")
        if not self.evidence_ids:
            raise ValueError(f"annotation {self.doc_id!r}/{self.code!r}: evidence_ids must be nonempty")
        if any(t < 0 for t in self.evidence_ids):
            raise ValueError(f"annotation {self.doc_id!r}/{self.code!r}: token ids must be non-negative")
        if self.span_count is not None and self.span_count < 1:
            raise ValueError(f"annotation {self.doc_id!r}/{self.code!r}: span_count must be >= 1")

    @property
    def key(self) -> "SampleKey":
        return SampleKey(self.doc_id, self.code)


@dataclass(frozen=True, eq=True)
class AttributionRecord:
    """One model's raw signals for one (document, code).

    Carries either raw AttInGrad inputs (attention + input_grad_l2) or
    precomputed scores, plus the model's prediction probability (certainty).
    """

    model_id: str
    regime: str
    doc_id: str
    code: str
    probability: float
    attention: Optional[tuple[float, ...]] = None
    input_grad_l2: Optional[tuple[float, ...]] = None
    scores: Optional[tuple[float, ...]] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("attention", "input_grad_l2", "scores"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(float(x) for x in v))
        object.__setattr__(self, "probability", float(self.probability))
        object.__setattr__(self, "extra", _freeze_extra(self.extra))
        if not self.model_id:
            raise ValueError("model_id must be nonempty")
        if self.regime not in REGIMES:
            raise ValueError(f"record {self._where()}: regime must be one of {REGIMES}, got {self.regime!r}")
        has_pair = self.attention is not None and self.input_grad_l2 is not None
        if not has_pair and self.scores is None:
            raise ValueError(f"record {self._where()}: needs (attention and input_grad_l2) or scores")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"record {self._where()}: probability {self.probability} outside [0, 1]")
        for name in ("attention", "input_grad_l2", "scores"):
            v = getattr(self, name)
            if v is not None and any(x < 0 for x in v):
                raise ValueError(f"record {self._where()}: {name} entries must be non-negative")

    def _where(self) -> str:
        return f"{self.model_id}/{self.doc_id}/{self.code}"

    @property
    def key(self) -> "SampleKey":
        return SampleKey(self.doc_id, self.code)


@dataclass(frozen=True, eq=True)
class PredictionSet:
    """Token ids extracted by a model or ensemble for one (document, code). May be empty."""

    source_id: str
    doc_id: str
    code: str
    token_ids: frozenset[TokenId]
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "token_ids", frozenset(int(t) for t in self.token_ids))
        object.__setattr__(self, "extra", _freeze_extra(self.extra))
        if not self.source_id:
            raise ValueError("prediction source_id must be nonempty")
        if any(t < 0 for t in self.token_ids):
            raise ValueError(f"prediction {self.source_id!r}/{self.doc_id!r}: token ids must be non-negative")

    @property
    def key(self) -> "SampleKey":
        return SampleKey(self.doc_id, self.code)


@dataclass(frozen=True, eq=True, order=True)
class SampleKey:
    """Identifies one (document, code) evaluation sample."""

    doc_id: str
    code: str

    def __str__(self) -> str:
        return f"{self.doc_id}:{self.code}"


def validate_corpus(
    documents: Sequence[Document],
    annotations: Sequence[EvidenceAnnotation],
    attributions: Sequence[AttributionRecord],
) -> list[str]:
    """Cross-check a corpus; returns one message per inconsistency (empty list if clean).

    Checks doc_id references, token-id bounds, vector lengths against token
    counts, and key uniqueness. Deterministic and order-independent up to the
    ordering of the returned messages.
    """
    errors: list[str] = []
    docs: dict[str, Document] = {}
    for doc in documents:
        if doc.doc_id in docs:
            errors.append(f"document {doc.doc_id!r}: duplicate doc_id")
        else:
            docs[doc.doc_id] = doc

    seen_ann: set[tuple[str, str, str]] = set()
    for ann in annotations:
        where = f"annotation {ann.doc_id!r}/{ann.code!r} ({ann.style})"
        ann_key = (ann.doc_id, ann.code, ann.style)
        if ann_key in seen_ann:
            errors.append(f"{where}: duplicate (doc_id, code, style)")
        seen_ann.add(ann_key)
        doc = docs.get(ann.doc_id)
        if doc is None:
            errors.append(f"{where}: unknown doc_id {ann.doc_id!r}")
            continue
        bad = sorted(t for t in ann.evidence_ids if t >= len(doc))
        if bad:
            errors.append(f"{where}: evidence_ids {bad} out of range for {len(doc)}-token document")

    seen_rec: set[tuple[str, str, str]] = set()
    for rec in attributions:
        where = f"attribution {rec.model_id!r}/{rec.doc_id!r}/{rec.code!r}"
        rec_key = (rec.model_id, rec.doc_id, rec.code)
        if rec_key in seen_rec:
            errors.append(f"{where}: duplicate (model_id, doc_id, code)")
        seen_rec.add(rec_key)
        doc = docs.get(rec.doc_id)
        if doc is None:
            errors.append(f"{where}: unknown doc_id {rec.doc_id!r}")
            continue
        for name in ("attention", "input_grad_l2", "scores"):
            vec = getattr(rec, name)
            if vec is not None and len(vec) != len(doc):
                errors.append(f"{where}: {name} has length {len(vec)}, document has {len(doc)} tokens")
    return errors


def index_documents(documents: Iterable[Document]) -> dict[str, Document]:
    """doc_id -> Document map (last duplicate wins; use validate_corpus to reject dupes)."""
    return {d.doc_id: d for d in documents}
