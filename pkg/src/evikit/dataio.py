"""Exchange-format parsing and writing, span-to-token conversion, test-case filtering.

All files are line-delimited JSON records, UTF-8, one record per line:

- documents:    {"doc_id", "tokens": [str], "split"}
- annotations:  {"doc_id", "code", "style", "evidence_token_ids": [int]}
                or {..., "evidence_char_spans": [[start, end]], "token_offsets": [[start, end]]}
- attributions: {"model_id", "regime", "doc_id", "code", "probability",
                 "attention"?: [float], "input_grad_l2"?: [float], "scores"?: [float]}
- predictions:  {"source_id", "doc_id", "code", "token_ids": [int]}

Unknown fields are accepted and preserved (round-tripped), so exporters can
attach their own metadata. Character offsets are half-open [start, end).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from .errors import CorpusValidationError, DataError, ParseError
from .model import (
    AttributionRecord,
    Document,
    EvidenceAnnotation,
    PredictionSet,
    SampleKey,
    TokenId,
    validate_corpus,
)

DOCUMENTS_FILE = "documents.jsonl"
ANNOTATIONS_FILE = "annotations.jsonl"
ATTRIBUTIONS_FILE = "attributions.jsonl"
PREDICTIONS_FILE = "predictions.jsonl"
THRESHOLDS_FILE = "thresholds.jsonl"


@dataclass(frozen=True)
class Corpus:
    """An immutable, validated in-memory corpus."""

    documents: tuple[Document, ...]
    annotations: tuple[EvidenceAnnotation, ...]
    attributions: tuple[AttributionRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        object.__setattr__(self, "annotations", tuple(self.annotations))
        object.__setattr__(self, "attributions", tuple(self.attributions))

    def doc_index(self) -> dict[str, Document]:
        return {d.doc_id: d for d in self.documents}

    def annotation_index(self, style: str) -> dict[SampleKey, EvidenceAnnotation]:
        return {a.key: a for a in self.annotations if a.style == style}

    def model_ids(self, regimes: Optional[Sequence[str]] = None) -> list[str]:
        wanted = set(regimes) if regimes is not None else None
        ids = {r.model_id for r in self.attributions if wanted is None or r.regime in wanted}
        return sorted(ids)

    def regime_of(self) -> dict[str, str]:
        return {r.model_id: r.regime for r in self.attributions}

    def record_index(self) -> dict[tuple[str, SampleKey], AttributionRecord]:
        return {(r.model_id, r.key): r for r in self.attributions}


def _iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(str(path), line_no, f"invalid JSON: {e.msg}") from None
            if not isinstance(obj, dict):
                raise ParseError(str(path), line_no, "record is not a JSON object")
            yield line_no, obj


def _take(obj: dict, key: str, path: str, line_no: int, kind: type, required: bool = True):
    if key not in obj:
        if required:
            raise ParseError(path, line_no, f"missing field {key!r}")
        return None
    value = obj.pop(key)
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ParseError(path, line_no, f"field {key!r} must be {kind.__name__}")
    return value


def _float_list(obj: dict, key: str, path: str, line_no: int, required: bool = True) -> Optional[list[float]]:
    raw = _take(obj, key, path, line_no, list, required)
    if raw is None:
        return None
    out = []
    for x in raw:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ParseError(path, line_no, f"field {key!r} must contain numbers")
        out.append(float(x))
    return out


def _int_list(obj: dict, key: str, path: str, line_no: int, required: bool = True) -> Optional[list[int]]:
    raw = _take(obj, key, path, line_no, list, required)
    if raw is None:
        return None
    out = []
    for x in raw:
        if isinstance(x, bool) or not isinstance(x, int):
            raise ParseError(path, line_no, f"field {key!r} must contain integers")
        out.append(x)
    return out


def _span_list(obj: dict, key: str, path: str, line_no: int, required: bool = True) -> Optional[list[tuple[int, int]]]:
    raw = _take(obj, key, path, line_no, list, required)
    if raw is None:
        return None
    spans = []
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) != 2 or not all(isinstance(v, int) for v in item):
            raise ParseError(path, line_no, f"field {key!r} must contain [start, end] integer pairs")
        spans.append((item[0], item[1]))
    return spans


def _build(factory: Callable, path: str, line_no: int, **kwargs):
    try:
        return factory(**kwargs)
    except ValueError as e:
        raise ParseError(path, line_no, str(e)) from None


def load_documents(path: str | Path) -> list[Document]:
    docs = []
    for line_no, obj in _iter_jsonl(path):
        doc_id = _take(obj, "doc_id", str(path), line_no, str)
        tokens = _take(obj, "tokens", str(path), line_no, list)
        if not all(isinstance(t, str) for t in tokens):
            raise ParseError(str(path), line_no, "field 'tokens' must contain strings")
        split = _take(obj, "split", str(path), line_no, str)
        docs.append(_build(Document, str(path), line_no, doc_id=doc_id, tokens=tuple(tokens), split=split, extra=obj))
    return docs


def load_annotations(path: str | Path, documents: Optional[Sequence[Document]] = None) -> list[EvidenceAnnotation]:
    """Parse annotations; char-span records need token_offsets and a matching document."""
    doc_map = {d.doc_id: d for d in documents} if documents is not None else {}
    anns = []
    for line_no, obj in _iter_jsonl(path):
        doc_id = _take(obj, "doc_id", str(path), line_no, str)
        code = _take(obj, "code", str(path), line_no, str)
        style = _take(obj, "style", str(path), line_no, str)
        span_count = _take(obj, "span_count", str(path), line_no, int, required=False)
        if "evidence_token_ids" in obj:
            ids = _int_list(obj, "evidence_token_ids", str(path), line_no)
        elif "evidence_char_spans" in obj:
            spans = _span_list(obj, "evidence_char_spans", str(path), line_no)
            offsets = _span_list(obj, "token_offsets", str(path), line_no)
            doc = doc_map.get(doc_id)
            try:
                ids = sorted(spans_to_token_ids(doc, spans, offsets))
            except DataError as e:
                raise ParseError(str(path), line_no, str(e)) from None
            if span_count is None:
                span_count = len(spans)
        else:
            raise ParseError(str(path), line_no, "missing field 'evidence_token_ids' (or 'evidence_char_spans')")
        anns.append(
            _build(
                EvidenceAnnotation,
                str(path),
                line_no,
                doc_id=doc_id,
                code=code,
                style=style,
                evidence_ids=frozenset(ids),
                span_count=span_count,
                extra=obj,
            )
        )
    return anns


def load_attributions(path: str | Path) -> list[AttributionRecord]:
    recs = []
    for line_no, obj in _iter_jsonl(path):
        kwargs = dict(
            model_id=_take(obj, "model_id", str(path), line_no, str),
            regime=_take(obj, "regime", str(path), line_no, str),
            doc_id=_take(obj, "doc_id", str(path), line_no, str),
            code=_take(obj, "code", str(path), line_no, str),
            probability=_take(obj, "probability", str(path), line_no, float),
            attention=_float_list(obj, "attention", str(path), line_no, required=False),
            input_grad_l2=_float_list(obj, "input_grad_l2", str(path), line_no, required=False),
            scores=_float_list(obj, "scores", str(path), line_no, required=False),
        )
        recs.append(_build(AttributionRecord, str(path), line_no, extra=obj, **kwargs))
    return recs


def load_predictions(path: str | Path) -> list[PredictionSet]:
    preds = []
    for line_no, obj in _iter_jsonl(path):
        preds.append(
            _build(
                PredictionSet,
                str(path),
                line_no,
                source_id=_take(obj, "source_id", str(path), line_no, str),
                doc_id=_take(obj, "doc_id", str(path), line_no, str),
                code=_take(obj, "code", str(path), line_no, str),
                token_ids=frozenset(_int_list(obj, "token_ids", str(path), line_no)),
                extra=obj,
            )
        )
    return preds


def load_corpus(
    documents_path: str | Path,
    annotations_path: str | Path,
    attributions_path: Optional[str | Path] = None,
    validate: bool = True,
) -> Corpus:
    """Load and cross-validate a corpus; raises CorpusValidationError on inconsistency."""
    documents = load_documents(documents_path)
    annotations = load_annotations(annotations_path, documents)
    attributions = load_attributions(attributions_path) if attributions_path else []
    if validate:
        errors = validate_corpus(documents, annotations, attributions)
        if errors:
            raise CorpusValidationError(errors)
    return Corpus(documents=tuple(documents), annotations=tuple(annotations), attributions=tuple(attributions))


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _with_extra(obj: dict, extra: dict) -> dict:
    for k in sorted(extra):
        obj[k] = extra[k]
    return obj


def write_documents(path: str | Path, documents: Iterable[Document]) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for d in documents:
            f.write(_dump(_with_extra({"doc_id": d.doc_id, "tokens": list(d.tokens), "split": d.split}, d.extra)))
            f.write("\n")


def write_annotations(path: str | Path, annotations: Iterable[EvidenceAnnotation]) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for a in annotations:
            obj = {
                "doc_id": a.doc_id,
                "code": a.code,
                "style": a.style,
                "evidence_token_ids": sorted(a.evidence_ids),
            }
            if a.span_count is not None:
                obj["span_count"] = a.span_count
            f.write(_dump(_with_extra(obj, a.extra)))
            f.write("\n")


def write_attributions(path: str | Path, attributions: Iterable[AttributionRecord]) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for r in attributions:
            obj: dict[str, Any] = {
                "model_id": r.model_id,
                "regime": r.regime,
                "doc_id": r.doc_id,
                "code": r.code,
                "probability": r.probability,
            }
            for name in ("attention", "input_grad_l2", "scores"):
                vec = getattr(r, name)
                if vec is not None:
                    obj[name] = list(vec)
            f.write(_dump(_with_extra(obj, r.extra)))
            f.write("\n")


def write_predictions(path: str | Path, predictions: Iterable[PredictionSet]) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for p in predictions:
            obj = {"source_id": p.source_id, "doc_id": p.doc_id, "code": p.code, "token_ids": sorted(p.token_ids)}
            f.write(_dump(_with_extra(obj, p.extra)))
            f.write("\n")


def write_corpus(out_dir: str | Path, corpus: Corpus) -> dict[str, Path]:
    """Write the three corpus files under out_dir with their standard names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "documents": out / DOCUMENTS_FILE,
        "annotations": out / ANNOTATIONS_FILE,
        "attributions": out / ATTRIBUTIONS_FILE,
    }
    write_documents(paths["documents"], corpus.documents)
    write_annotations(paths["annotations"], corpus.annotations)
    write_attributions(paths["attributions"], corpus.attributions)
    return paths


def write_thresholds(path: str | Path, rows: Iterable[dict]) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for row in rows:
            f.write(_dump(row))
            f.write("\n")


def load_thresholds(path: str | Path) -> dict[str, float]:
    """model_id -> theta from a thresholds record file."""
    out: dict[str, float] = {}
    for line_no, obj in _iter_jsonl(path):
        model_id = _take(obj, "model_id", str(path), line_no, str)
        theta = _take(obj, "theta", str(path), line_no, float)
        out[model_id] = theta
    return out


def spans_to_token_ids(
    document: Optional[Document],
    char_spans: Sequence[tuple[int, int]],
    token_offsets: Sequence[tuple[int, int]],
) -> frozenset[TokenId]:
    """Token ids whose half-open offset interval overlaps any evidence span by >= 1 char.

    The any-overlap rule keeps partially covered tokens (subword fragments)
    in the evidence set. token_offsets must be nondecreasing; when a document
    is given, one offset pair per token is required.
    """
    if document is not None and len(token_offsets) != len(document.tokens):
        raise DataError(
            f"document {document.doc_id!r}: {len(token_offsets)} token offsets for {len(document.tokens)} tokens"
        )
    prev_start = 0
    for i, (ts, te) in enumerate(token_offsets):
        if ts > te or ts < prev_start:
            raise DataError(f"token_offsets not nondecreasing at index {i}: ({ts}, {te})")
        prev_start = ts
    text_end = max((te for _, te in token_offsets), default=0)
    ids: set[TokenId] = set()
    for s, e in char_spans:
        if s < 0 or e > text_end or s >= e:
            raise DataError(f"char span ({s}, {e}) outside text bounds [0, {text_end})")
        for t, (ts, te) in enumerate(token_offsets):
            if max(ts, s) < min(te, e):
                ids.add(t)
    return frozenset(ids)


def contiguous_run_count(token_ids: Iterable[TokenId]) -> int:
    """Number of maximal runs of consecutive token ids (0 for the empty set)."""
    ids = sorted(set(token_ids))
    if not ids:
        return 0
    runs = 1
    for a, b in zip(ids, ids[1:]):
        if b != a + 1:
            runs += 1
    return runs


def annotation_span_count(annotation: EvidenceAnnotation) -> int:
    """Explicit span_count when recorded, else derived contiguous-run count."""
    if annotation.span_count is not None:
        return annotation.span_count
    return contiguous_run_count(annotation.evidence_ids)


def filter_multi_span_test_cases(
    annotations: Iterable[EvidenceAnnotation],
    min_spans: int = 2,
) -> list[EvidenceAnnotation]:
    """Keep complete-style annotations whose evidence comprises >= min_spans spans."""
    return [
        a
        for a in annotations
        if a.style == "complete" and annotation_span_count(a) >= min_spans
    ]
