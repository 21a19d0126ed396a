"""Single-model baselines and ensemble prediction sets.

Ensembles aggregate member evidence by plain set union; the dynamic variant
first gates members on their prediction probability. Recall of a union never
drops below any member's recall, which is what makes aggregation the lever
for evidence completeness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import DataError
from .metrics import Aggregate, aggregate
from .model import PredictionSet, SampleKey, TokenId


@dataclass(frozen=True)
class EnsembleConfig:
    """Member list plus aggregation mode; certainty_threshold applies to dynamic mode."""

    member_model_ids: tuple[str, ...]
    mode: str = "standard"
    certainty_threshold: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "member_model_ids", tuple(self.member_model_ids))
        if not self.member_model_ids:
            raise ValueError("ensemble needs at least one member")
        if len(set(self.member_model_ids)) != len(self.member_model_ids):
            raise ValueError("member_model_ids must be distinct")
        if self.mode not in ("standard", "dynamic"):
            raise ValueError(f"mode must be standard or dynamic, got {self.mode!r}")
        if not 0.0 <= self.certainty_threshold <= 1.0:
            raise ValueError(f"certainty_threshold {self.certainty_threshold} outside [0, 1]")


@dataclass(frozen=True)
class RetainedCount:
    """How many members cleared the certainty gate for one sample."""

    sample: SampleKey
    threshold: float
    retained: int

    def __post_init__(self):
        if self.retained < 0:
            raise ValueError("retained must be >= 0")


def _check_same_sample(predictions: Sequence[PredictionSet]) -> SampleKey:
    if not predictions:
        raise ValueError("ensemble needs at least one member prediction")
    key = predictions[0].key
    for p in predictions[1:]:
        if p.key != key:
            raise ValueError(f"mismatched sample keys in ensemble: {key} vs {p.key}")
    return key


def union_ensemble(predictions: Sequence[PredictionSet], mode: str = "standard") -> PredictionSet:
    """Union of member token sets; source_id records the member list and mode."""
    key = _check_same_sample(predictions)
    union: set[TokenId] = set()
    for p in predictions:
        union |= p.token_ids
    members = "+".join(p.source_id for p in predictions)
    return PredictionSet(
        source_id=f"ensemble:{mode}[{members}]",
        doc_id=key.doc_id,
        code=key.code,
        token_ids=frozenset(union),
    )


def dynamic_ensemble(
    predictions: Sequence[PredictionSet],
    probabilities: Sequence[float],
    certainty_threshold: float,
) -> tuple[PredictionSet, RetainedCount]:
    """Union over members whose probability is >= the certainty threshold.

    The comparator is >= so a threshold of 0.0 retains every member and
    reproduces the standard ensemble exactly; a threshold above every
    probability yields the empty prediction with retained = 0.
    """
    key = _check_same_sample(predictions)
    if len(probabilities) != len(predictions):
        raise ValueError(f"{len(predictions)} predictions but {len(probabilities)} probabilities")
    kept = [p for p, prob in zip(predictions, probabilities) if prob >= certainty_threshold]
    union: set[TokenId] = set()
    for p in kept:
        union |= p.token_ids
    members = "+".join(p.source_id for p in kept)
    pred = PredictionSet(
        source_id=f"ensemble:dynamic@{certainty_threshold:g}[{members}]",
        doc_id=key.doc_id,
        code=key.code,
        token_ids=frozenset(union),
    )
    return pred, RetainedCount(sample=key, threshold=certainty_threshold, retained=len(kept))


def cross_regime_ensemble(
    predictions_a: Sequence[PredictionSet],
    predictions_b: Sequence[PredictionSet],
) -> PredictionSet:
    """Union over the concatenation of two member lists (e.g. two training regimes)."""
    return union_ensemble(list(predictions_a) + list(predictions_b), mode="cross")


PerModelValues = Mapping[str, Mapping[SampleKey, float]]


def _value(values: PerModelValues, model_id: str, sample: SampleKey) -> float:
    try:
        return values[model_id][sample]
    except KeyError:
        raise DataError(f"missing metric value for model {model_id!r}, sample {sample}") from None


def per_sample_max(
    values: PerModelValues,
    samples: Sequence[SampleKey],
    member_model_ids: Optional[Sequence[str]] = None,
) -> tuple[dict[SampleKey, float], Aggregate]:
    """Per-sample maximum over member models: the ceiling for any single model."""
    members = list(member_model_ids) if member_model_ids is not None else sorted(values)
    if not members or not samples:
        raise DataError("per_sample_max needs at least one model and one sample")
    maxima = {s: max(_value(values, m, s) for m in members) for s in samples}
    return maxima, aggregate(maxima.values())


@dataclass(frozen=True)
class BestModel:
    """Winner of the per-sample-wins vote with its aggregated metric."""

    model_id: str
    win_count: int
    score: Aggregate


def select_best_model(
    values: PerModelValues,
    samples: Sequence[SampleKey],
    member_model_ids: Optional[Sequence[str]] = None,
) -> BestModel:
    """Pick the member with the most per-sample wins.

    Every model tied for a sample's maximum gets a win for that sample. Vote
    ties are broken by higher mean metric, then by lexicographically smaller
    model_id.
    """
    members = list(member_model_ids) if member_model_ids is not None else sorted(values)
    if not members or not samples:
        raise DataError("select_best_model needs at least one model and one sample")
    wins = {m: 0 for m in members}
    for s in samples:
        sample_values = {m: _value(values, m, s) for m in members}
        top = max(sample_values.values())
        for m, v in sample_values.items():
            if v == top:
                wins[m] += 1
    means = {m: aggregate(_value(values, m, s) for s in samples) for m in members}
    best = min(members, key=lambda m: (-wins[m], -means[m].mean, m))
    return BestModel(model_id=best, win_count=wins[best], score=means[best])
