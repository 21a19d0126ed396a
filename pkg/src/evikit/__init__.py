"""evikit: evidence-completeness evaluation for token-attribution records.

Turns per-model token attributions into prediction sets (AttInGrad scoring +
calibrated thresholds), aggregates them into ensembles, and scores everything
against human token annotations with recall/precision/agreement. A built-in
simulator with closed-form expectations makes every pipeline claim testable
without restricted data.
"""

from ._version import __version__
from .attribution import (
    DecisionThreshold,
    ScoreVector,
    att_in_grad,
    calibrate_threshold,
    extract_prediction,
    normalize,
    record_score_vector,
    threshold_grid,
)
from .dataio import (
    Corpus,
    annotation_span_count,
    contiguous_run_count,
    filter_multi_span_test_cases,
    load_corpus,
    spans_to_token_ids,
    write_corpus,
)
from .ensemble import (
    BestModel,
    EnsembleConfig,
    RetainedCount,
    cross_regime_ensemble,
    dynamic_ensemble,
    per_sample_max,
    select_best_model,
    union_ensemble,
)
from .errors import ConfigError, CorpusValidationError, DataError, EvikitError, ParseError
from .metrics import (
    Aggregate,
    AgreementInput,
    SampleMetrics,
    agreement,
    aggregate,
    f1_score,
    precision,
    recall,
    sample_metrics,
    unique_token_count,
)
from .model import (
    AttributionRecord,
    Document,
    EvidenceAnnotation,
    PredictionSet,
    SampleKey,
    TokenId,
    validate_corpus,
)
from .simulator import (
    Estimate,
    MonteCarloStats,
    SimulatorParams,
    expected_single_recall,
    expected_union_recall,
    generate,
    monte_carlo_stats,
    planted_threshold,
)

__all__ = [
    "__version__",
    "Aggregate",
    "AgreementInput",
    "AttributionRecord",
    "BestModel",
    "ConfigError",
    "Corpus",
    "CorpusValidationError",
    "DataError",
    "DecisionThreshold",
    "Document",
    "EnsembleConfig",
    "Estimate",
    "EvidenceAnnotation",
    "EvikitError",
    "MonteCarloStats",
    "ParseError",
    "PredictionSet",
    "RetainedCount",
    "SampleKey",
    "SampleMetrics",
    "ScoreVector",
    "SimulatorParams",
    "TokenId",
    "agreement",
    "aggregate",
    "annotation_span_count",
    "att_in_grad",
    "calibrate_threshold",
    "contiguous_run_count",
    "cross_regime_ensemble",
    "dynamic_ensemble",
    "expected_single_recall",
    "expected_union_recall",
    "extract_prediction",
    "f1_score",
    "filter_multi_span_test_cases",
    "generate",
    "load_corpus",
    "monte_carlo_stats",
    "normalize",
    "per_sample_max",
    "planted_threshold",
    "precision",
    "recall",
    "record_score_vector",
    "sample_metrics",
    "select_best_model",
    "spans_to_token_ids",
    "threshold_grid",
    "union_ensemble",
    "validate_corpus",
    "write_corpus",
]
