"""How much evidence coverage does a model ensemble buy?

Generates a synthetic corpus where each of ten models detects each evidence
token with probability 0.6 (and a shared 12% blind spot hides some tokens
from everyone), then compares single models, the per-sample ceiling, and the
union ensemble against the closed-form expectations.
"""

import evikit as ek

params = ek.SimulatorParams(
    doc_count=120,
    tokens_per_doc=300,
    evidence_per_doc=8,
    model_count=10,
    coverage_p=0.6,
    blind_spot_b=0.12,
    noise_q=0.02,
    seed=20240501,
)
documents, annotations, records = ek.generate(params, split_cycle=("test",))
theta = ek.planted_threshold(params)
gt = {a.key: a.evidence_ids for a in annotations if a.style == "complete"}

# extract one prediction set per (model, sample)
predictions = {}
for rec in records:
    predictions.setdefault(rec.key, []).append(ek.extract_prediction(ek.record_score_vector(rec), theta))

samples = sorted(gt)
model_recall = {}   # model -> per-sample recall
model_precision = {}
union_recall, union_precision = [], []
for key in samples:
    union = ek.union_ensemble(predictions[key])
    union_recall.append(ek.recall(gt[key], union.token_ids))
    union_precision.append(ek.precision(gt[key], union.token_ids))
    for pred in predictions[key]:
        model_recall.setdefault(pred.source_id, {})[key] = ek.recall(gt[key], pred.token_ids)
        model_precision.setdefault(pred.source_id, {})[key] = ek.precision(gt[key], pred.token_ids)

best = ek.select_best_model(model_recall, samples)
maxima, max_agg = ek.per_sample_max(model_recall, samples)

print(f"samples: {len(samples)}   models: {params.model_count}   decision threshold: {theta:g}")
print()
print(f"best single model ({best.model_id}, {best.win_count} wins):")
print(f"  recall    {best.score}")
print(f"  precision {ek.aggregate(model_precision[best.model_id].values())}")
print(f"per-sample max (single-model ceiling): recall {max_agg}")
print(f"union ensemble:")
print(f"  recall    {ek.aggregate(union_recall)}")
print(f"  precision {ek.aggregate(union_precision)}")
print()
print("closed-form expectations:")
print(f"  single-model recall (1-b)*p          = {ek.expected_single_recall(params):.4f}")
print(f"  union recall (1-b)*(1-(1-p)^M)       = {ek.expected_union_recall(params):.4f}")
print()
print("the union recovers most of what any model can see, at a precision cost;")
print("the shared blind spot keeps even the ensemble below full coverage.")
