"""Token-set metrics: recall, precision, ensemble agreement, and aggregation.

Empty-prediction conventions (recall 0, precision 1) make thresholded
pipelines well-defined all the way to the degenerate endpoint where no model
clears the certainty gate.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Optional, Sequence

from .errors import ConfigError
from .model import SampleKey, TokenId


@dataclass(frozen=True)
class SampleMetrics:
    """Per-sample scores plus the set sizes they were computed from."""

    sample: SampleKey
    recall: float
    precision: float
    predicted_size: int
    gt_size: int


@dataclass(frozen=True)
class Aggregate:
    """Mean and population standard deviation across samples."""

    mean: float
    std: float
    count: int

    def __str__(self) -> str:
        return f"{self.mean:.3f} (±{self.std:.3f})"


@dataclass(frozen=True)
class AgreementInput:
    """Occurrence-count view of an ensemble's member token sets.

    counts maps each token id to how many members extracted it (1..M);
    total is the number of token occurrences across all members.
    """

    member_sets: tuple[frozenset[TokenId], ...]
    counts: dict[TokenId, int]
    total: int
    member_count: int

    def __post_init__(self):
        if self.total != sum(len(s) for s in self.member_sets):
            raise ValueError("total must equal the summed member set sizes")
        if any(not 1 <= c <= self.member_count for c in self.counts.values()):
            raise ValueError(f"occurrence counts must lie in [1, {self.member_count}]")

    @classmethod
    def from_member_sets(cls, member_sets: Sequence[AbstractSet[TokenId]]) -> "AgreementInput":
        counts = Counter()
        for s in member_sets:
            counts.update(s)
        return cls(
            member_sets=tuple(frozenset(s) for s in member_sets),
            counts=dict(counts),
            total=sum(counts.values()),
            member_count=len(member_sets),
        )


def recall(gt_ids: AbstractSet[TokenId], pred_ids: AbstractSet[TokenId]) -> float:
    """Fraction of ground-truth token ids present in the prediction.

    Empty prediction -> 0.0. Empty ground truth is invalid (annotations are
    nonempty by construction).
    """
    if not gt_ids:
        raise ValueError("recall: gt_ids must be nonempty")
    if not pred_ids:
        return 0.0
    return len(gt_ids & pred_ids) / len(gt_ids)


def precision(gt_ids: AbstractSet[TokenId], pred_ids: AbstractSet[TokenId]) -> float:
    """Fraction of predicted token ids that are ground truth; empty prediction -> 1.0."""
    if not pred_ids:
        return 1.0
    return len(gt_ids & pred_ids) / len(pred_ids)


def agreement(member_sets: Sequence[AbstractSet[TokenId]]) -> Optional[float]:
    """Overlap of member token sets: ((sum_t c_t^2) / T - 1) / (M - 1).

    c_t is the occurrence count of token id t across members and T the total
    number of token occurrences. 1.0 iff all members are identical and
    nonempty, 0.0 iff pairwise disjoint. Returns None when every member set
    is empty (T = 0); callers exclude such samples from aggregates.
    """
    if len(member_sets) < 2:
        raise ConfigError(f"agreement needs at least 2 member sets, got {len(member_sets)}")
    inp = AgreementInput.from_member_sets(member_sets)
    if inp.total == 0:
        return None
    sum_sq = sum(c * c for c in inp.counts.values())
    return (sum_sq / inp.total - 1.0) / (inp.member_count - 1)


def unique_token_count(member_sets: Iterable[AbstractSet[TokenId]]) -> int:
    """Size of the union of member token sets."""
    union: set[TokenId] = set()
    for s in member_sets:
        union |= s
    return len(union)


def sample_metrics(sample: SampleKey, gt_ids: AbstractSet[TokenId], pred_ids: AbstractSet[TokenId]) -> SampleMetrics:
    return SampleMetrics(
        sample=sample,
        recall=recall(gt_ids, pred_ids),
        precision=precision(gt_ids, pred_ids),
        predicted_size=len(pred_ids),
        gt_size=len(gt_ids),
    )


def aggregate(values: Iterable[Optional[float]]) -> Aggregate:
    """Mean ± population std across samples; None values (undefined) are excluded."""
    kept = [v for v in values if v is not None]
    if not kept:
        raise ConfigError("aggregate needs at least one defined value")
    n = len(kept)
    mean = sum(kept) / n
    var = sum((v - mean) ** 2 for v in kept) / n
    return Aggregate(mean=mean, std=math.sqrt(var), count=n)


def f1_score(recall_value: float, precision_value: float) -> float:
    """Harmonic mean; 0.0 when both are 0 (empty prediction: r=0, p=1 -> f1=0)."""
    if recall_value + precision_value == 0.0:
        return 0.0
    return 2.0 * recall_value * precision_value / (recall_value + precision_value)
