"""Synthetic multi-model evidence corpora with closed-form expectations.

The generative model captures why ensembling helps: independently trained
models detect each evidence token only with probability p (distinct solution
strategies), so their union covers far more than any single member, while a
per-document blind-spot set no model can see caps the union below 1. Every
quantity the generator produces has an exact expectation, so full-pipeline
claims can be tested without any real dataset.

Per document (all sampled from a per-document seed, so output is identical
under any worker parallelism):

- E evidence token positions are drawn; each is blind with probability b,
  and the blind subset is shared by all models.
- Each of the M models detects each non-blind evidence token with
  probability p and picks up each non-evidence token with probability q.
- Scores place 1.0 (raw) on selected tokens and 1/(20*D) elsewhere, then
  sum-normalize; extraction at the planted threshold 1/(2*D) recovers the
  selected set exactly, with no values near the boundary. A model that
  selected nothing gets the all-zero vector.
- The model certainty is normal(certainty_mean, certainty_spread) clipped
  to [0, 1 - 1e-6], so a certainty threshold of 1.0 always empties the
  ensemble.

Expectations: single-model recall (1-b)*p, union recall (1-b)*(1-(1-p)^M).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .model import AttributionRecord, Document, EvidenceAnnotation
from .util import worker_count

_MAX_CERTAINTY = 1.0 - 1e-6
_MC_BLOCK = 4096
_SEED_MASK = (1 << 64) - 1  # SeedSequence wants non-negative entropy


@dataclass(frozen=True)
class SimulatorParams:
    """Generative-model knobs; all randomness derives from seed."""

    doc_count: int = 30
    tokens_per_doc: int = 120
    evidence_per_doc: int = 6
    model_count: int = 10
    coverage_p: float = 0.6
    blind_spot_b: float = 0.1
    noise_q: float = 0.02
    certainty_mean: float = 0.75
    certainty_spread: float = 0.1
    seed: int = 12345

    def __post_init__(self):
        if self.doc_count < 1:
            raise ConfigError(f"doc_count must be >= 1, got {self.doc_count}")
        if self.tokens_per_doc < 1:
            raise ConfigError(f"tokens_per_doc must be >= 1, got {self.tokens_per_doc}")
        if not 2 <= self.evidence_per_doc <= self.tokens_per_doc:
            raise ConfigError(
                f"evidence_per_doc must be in [2, tokens_per_doc], got {self.evidence_per_doc}"
            )
        if self.model_count < 1:
            raise ConfigError(f"model_count must be >= 1, got {self.model_count}")
        for name in ("coverage_p", "blind_spot_b", "noise_q", "certainty_mean"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.certainty_spread < 0.0:
            raise ConfigError(f"certainty_spread must be >= 0, got {self.certainty_spread}")


def planted_threshold(params: SimulatorParams) -> float:
    """Decision threshold at which extraction recovers the sampled sets exactly."""
    return 1.0 / (2.0 * params.tokens_per_doc)


def expected_single_recall(params: SimulatorParams) -> float:
    """(1 - b) * p: a token must be visible and detected."""
    return (1.0 - params.blind_spot_b) * params.coverage_p


def expected_union_recall(params: SimulatorParams) -> float:
    """(1 - b) * (1 - (1 - p)^M): some member detects each visible token."""
    return (1.0 - params.blind_spot_b) * (1.0 - (1.0 - params.coverage_p) ** params.model_count)


def _regime_for(model_idx: int, model_count: int, regimes: Sequence[str]) -> str:
    return regimes[model_idx * len(regimes) // model_count]


def _scores_for_selection(selected: np.ndarray, n_tokens: int) -> tuple[float, ...]:
    if not selected.any():
        return tuple([0.0] * n_tokens)
    background = 1.0 / (20.0 * n_tokens)
    raw = np.full(n_tokens, background, dtype=np.float64)
    raw[selected] = 1.0
    return tuple(raw / raw.sum())


def _generate_doc(
    doc_idx: int,
    seed_seq: np.random.SeedSequence,
    params: SimulatorParams,
    regimes: Sequence[str],
    split_cycle: Sequence[str],
    code: str,
) -> tuple[Document, list[EvidenceAnnotation], list[AttributionRecord]]:
    rng = np.random.default_rng(seed_seq)
    d, e, m = params.tokens_per_doc, params.evidence_per_doc, params.model_count

    doc = Document(
        doc_id=f"doc{doc_idx:04d}",
        tokens=tuple(f"tok{j:04d}" for j in range(d)),
        split=split_cycle[doc_idx % len(split_cycle)],
    )
    evidence = np.sort(rng.choice(d, size=e, replace=False))
    blind = rng.random(e) < params.blind_spot_b
    sufficient_size = max(1, round(e / 3))
    sufficient = rng.choice(evidence, size=sufficient_size, replace=False)

    annotations = [
        EvidenceAnnotation(
            doc_id=doc.doc_id,
            code=code,
            style="complete",
            evidence_ids=frozenset(int(t) for t in evidence),
        ),
        EvidenceAnnotation(
            doc_id=doc.doc_id,
            code=code,
            style="sufficient",
            evidence_ids=frozenset(int(t) for t in sufficient),
        ),
    ]

    is_evidence = np.zeros(d, dtype=bool)
    is_evidence[evidence] = True
    records = []
    for j in range(m):
        detected = evidence[(rng.random(e) < params.coverage_p) & ~blind]
        noise_mask = rng.random(d) < params.noise_q
        noise_mask[evidence] = False
        selected = np.zeros(d, dtype=bool)
        selected[detected] = True
        selected |= noise_mask
        prob = float(np.clip(rng.normal(params.certainty_mean, params.certainty_spread), 0.0, _MAX_CERTAINTY))
        regime = _regime_for(j, m, regimes)
        records.append(
            AttributionRecord(
                model_id=f"{regime.lower()}-{j:02d}",
                regime=regime,
                doc_id=doc.doc_id,
                code=code,
                probability=prob,
                scores=_scores_for_selection(selected, d),
            )
        )
    return doc, annotations, records


def generate(
    params: SimulatorParams,
    *,
    regimes: Sequence[str] = ("SIM",),
    split_cycle: Sequence[str] = ("test", "validation", "train"),
    code: str = "c1",
) -> tuple[list[Document], list[EvidenceAnnotation], list[AttributionRecord]]:
    """Generate a corpus of documents, annotations (both styles), and model records.

    Deterministic given params.seed: every document draws from its own spawned
    seed, so results are byte-identical under any EVIKIT_THREADS setting.
    Models are assigned to regimes in contiguous blocks (regime labels beyond
    the default "SIM" let one generator play several training regimes).
    """
    if not regimes:
        raise ConfigError("regimes must be nonempty")
    if not split_cycle:
        raise ConfigError("split_cycle must be nonempty")
    seeds = np.random.SeedSequence(params.seed & _SEED_MASK).spawn(params.doc_count)
    args = [(i, seeds[i], params, regimes, split_cycle, code) for i in range(params.doc_count)]

    workers = worker_count()
    if workers > 1 and params.doc_count > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _generate_doc(*a), args))
    else:
        results = [_generate_doc(*a) for a in args]

    documents: list[Document] = []
    annotations: list[EvidenceAnnotation] = []
    attributions: list[AttributionRecord] = []
    for doc, anns, recs in results:
        documents.append(doc)
        annotations.extend(anns)
        attributions.extend(recs)
    return documents, annotations, attributions


@dataclass(frozen=True)
class Estimate:
    """Empirical mean with its standard error."""

    mean: float
    se: float


@dataclass(frozen=True)
class MonteCarloStats:
    """Empirical single-model and union metrics over independent trial documents."""

    trials: int
    single_recall: Estimate
    single_precision: Estimate
    union_recall: Estimate
    union_precision: Estimate


def monte_carlo_stats(params: SimulatorParams, trials: int, seed: Optional[int] = None) -> MonteCarloStats:
    """Sample per-trial documents and report mean recall/precision for members and union.

    Single-model numbers are the per-trial mean over the M members. Empty
    predictions use the precision-1/recall-0 conventions. Trials run in
    fixed-size blocks with spawned seeds, so results do not depend on block
    scheduling. Per-trial randomness is independent of generate()'s stream.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    d, e, m = params.tokens_per_doc, params.evidence_per_doc, params.model_count
    root = np.random.SeedSequence([(params.seed if seed is None else seed) & _SEED_MASK, 0x4D43])
    n_blocks = (trials + _MC_BLOCK - 1) // _MC_BLOCK
    block_seeds = root.spawn(n_blocks)

    per_trial = {name: [] for name in ("sr", "sp", "ur", "up")}
    remaining = trials
    for bs in block_seeds:
        n = min(_MC_BLOCK, remaining)
        remaining -= n
        rng = np.random.default_rng(bs)
        blind = rng.random((n, 1, e)) < params.blind_spot_b
        detected = (rng.random((n, m, e)) < params.coverage_p) & ~blind
        noise = rng.random((n, m, d - e)) < params.noise_q

        ev_counts = detected.sum(axis=2)
        noise_counts = noise.sum(axis=2)
        sizes = ev_counts + noise_counts
        single_recall = ev_counts / e
        single_precision = np.where(sizes > 0, ev_counts / np.maximum(sizes, 1), 1.0)
        per_trial["sr"].append(single_recall.mean(axis=1))
        per_trial["sp"].append(single_precision.mean(axis=1))

        u_ev = detected.any(axis=1).sum(axis=1)
        u_noise = noise.any(axis=1).sum(axis=1)
        u_size = u_ev + u_noise
        per_trial["ur"].append(u_ev / e)
        per_trial["up"].append(np.where(u_size > 0, u_ev / np.maximum(u_size, 1), 1.0))

    def estimate(chunks: list[np.ndarray]) -> Estimate:
        arr = np.concatenate(chunks)
        se = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
        return Estimate(mean=float(arr.mean()), se=se)

    return MonteCarloStats(
        trials=trials,
        single_recall=estimate(per_trial["sr"]),
        single_precision=estimate(per_trial["sp"]),
        union_recall=estimate(per_trial["ur"]),
        union_precision=estimate(per_trial["up"]),
    )
