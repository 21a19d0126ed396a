"""AttInGrad scoring, decision thresholds, and score-to-prediction extraction.

A score vector is the per-token product of an attention weight and the L2
norm of the token's input-times-gradient attribution, sum-normalized so the
entries form a distribution over token positions. Extraction keeps every
token whose normalized score clears a decision threshold calibrated on a
validation split.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .metrics import f1_score, precision, recall
from .model import AttributionRecord, EvidenceAnnotation, PredictionSet

_NORMALIZED_ATOL = 1e-9


@dataclass(frozen=True)
class ScoreVector:
    """Per-token scores for one (model, document, code).

    normalized=True means the entries sum to 1 within 1e-9, except that an
    all-zero vector stays all-zero and still counts as normalized.
    """

    doc_id: str
    code: str
    model_id: str
    values: tuple[float, ...]
    normalized: bool

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("ScoreVector values must be nonempty")
        if any(v < 0 for v in self.values):
            raise ValueError(f"ScoreVector {self.model_id}/{self.doc_id}: negative entry")
        if self.normalized:
            total = sum(self.values)
            if total != 0.0 and abs(total - 1.0) > _NORMALIZED_ATOL:
                raise ValueError(f"ScoreVector {self.model_id}/{self.doc_id}: flagged normalized but sums to {total}")


@dataclass(frozen=True)
class DecisionThreshold:
    """A calibrated score cutoff with the objective it was chosen to maximize."""

    theta: float
    objective: str = ""
    objective_value: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta {self.theta} outside [0, 1]")


def att_in_grad(
    attention: Sequence[float],
    input_grad_l2: Sequence[float],
    *,
    doc_id: str = "",
    code: str = "",
    model_id: str = "",
) -> ScoreVector:
    """Combine attention weights with input-gradient L2 norms into normalized scores.

    Raw score per token = attention[t] * input_grad_l2[t]; the result is
    normalized to sum to 1 unless all raw scores are zero, in which case the
    all-zero vector is returned (and extracts to the empty set at any
    threshold above zero).
    """
    a = np.asarray(attention, dtype=np.float64)
    g = np.asarray(input_grad_l2, dtype=np.float64)
    if a.shape != g.shape or a.ndim != 1:
        raise ValueError(f"attention and input_grad_l2 must be equal-length vectors, got {a.shape} vs {g.shape}")
    if a.size == 0:
        raise ValueError("att_in_grad: empty vectors")
    if (a < 0).any() or (g < 0).any():
        raise ValueError("att_in_grad: entries must be non-negative")
    raw = a * g
    total = raw.sum()
    values = raw / total if total > 0.0 else raw
    return ScoreVector(doc_id=doc_id, code=code, model_id=model_id, values=tuple(values), normalized=True)


def normalize(scores: ScoreVector) -> ScoreVector:
    """Sum-normalize a raw score vector; all-zero vectors pass through unchanged."""
    if scores.normalized:
        return scores
    arr = np.asarray(scores.values, dtype=np.float64)
    total = arr.sum()
    values = tuple(arr / total) if total > 0.0 else scores.values
    return ScoreVector(
        doc_id=scores.doc_id, code=scores.code, model_id=scores.model_id, values=values, normalized=True
    )


def record_score_vector(record: AttributionRecord) -> ScoreVector:
    """Normalized scores for a record: precomputed scores if present, else AttInGrad."""
    if record.scores is not None:
        raw = ScoreVector(
            doc_id=record.doc_id,
            code=record.code,
            model_id=record.model_id,
            values=record.scores,
            normalized=False,
        )
        return normalize(raw)
    return att_in_grad(
        record.attention,
        record.input_grad_l2,
        doc_id=record.doc_id,
        code=record.code,
        model_id=record.model_id,
    )


def extract_prediction(scores: ScoreVector, threshold: DecisionThreshold | float) -> PredictionSet:
    """Keep every token whose normalized score is >= theta; may be empty."""
    if not scores.normalized:
        raise ValueError("extract_prediction requires a normalized ScoreVector")
    theta = threshold.theta if isinstance(threshold, DecisionThreshold) else float(threshold)
    token_ids = frozenset(t for t, v in enumerate(scores.values) if v >= theta)
    return PredictionSet(
        source_id=scores.model_id or "scores",
        doc_id=scores.doc_id,
        code=scores.code,
        token_ids=token_ids,
    )


def threshold_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid start..stop; the endpoint is included when step divides the range."""
    if step <= 0:
        raise ConfigError(f"grid step must be > 0, got {step}")
    if not 0.0 <= start <= stop <= 1.0:
        raise ConfigError(f"grid bounds must satisfy 0 <= start <= stop <= 1, got {start}:{stop}")
    n = int(np.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(n + 1)]


_OBJECTIVES = ("f1", "recall", "precision")


def _objective_value(objective: str, gt: frozenset[int], pred: frozenset[int]) -> float:
    r = recall(gt, pred)
    if objective == "recall":
        return r
    p = precision(gt, pred)
    if objective == "precision":
        return p
    return f1_score(r, p)


def calibrate_threshold(
    records: Sequence[AttributionRecord],
    annotations: Sequence[EvidenceAnnotation],
    grid: tuple[float, float, float] = (0.0, 1.0, 0.05),
    objective: str = "f1",
) -> DecisionThreshold:
    """Pick the grid theta maximizing the macro-averaged token objective.

    Every record is paired with the annotation sharing its (doc_id, code);
    records without a matching annotation are skipped. Ties are broken toward
    the smaller theta, favoring recall. Raises ConfigError when no
    (record, annotation) pair exists.
    """
    if objective not in _OBJECTIVES:
        raise ConfigError(f"unknown calibration objective {objective!r}; expected one of {_OBJECTIVES}")
    by_key = {ann.key: ann for ann in annotations}
    pairs: list[tuple[np.ndarray, frozenset[int]]] = []
    for rec in records:
        ann = by_key.get(rec.key)
        if ann is None:
            continue
        sv = record_score_vector(rec)
        pairs.append((np.asarray(sv.values, dtype=np.float64), ann.evidence_ids))
    if not pairs:
        raise ConfigError("calibrate_threshold: empty validation set (no record has a matching annotation)")

    thetas = threshold_grid(*grid)
    best_theta = thetas[0]
    best_value = -1.0
    for theta in thetas:
        total = 0.0
        for values, gt in pairs:
            pred = frozenset(np.nonzero(values >= theta)[0].tolist())
            total += _objective_value(objective, gt, pred)
        mean = total / len(pairs)
        if mean > best_value:  # strict: ties keep the earlier (smaller) theta
            best_value = mean
            best_theta = theta
    return DecisionThreshold(theta=best_theta, objective=objective, objective_value=best_value)
