"""Command-line front end: simulate, calibrate, evaluate, sweep, agreement.

Exit codes: 0 success, 1 data/configuration errors, 2 usage errors. All
outputs are deterministic given inputs and seed flags; CSV files start with a
'#' metadata line carrying the tool version and a config hash. EVIKIT_THREADS
caps worker parallelism without affecting any output byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path
from typing import Optional, Sequence

from . import dataio, reports
from ._version import __version__
from .attribution import calibrate_threshold, extract_prediction, record_score_vector, threshold_grid
from .dataio import Corpus
from .ensemble import dynamic_ensemble, per_sample_max, select_best_model, union_ensemble
from .errors import ConfigError, DataError, EvikitError
from .metrics import Aggregate, agreement, aggregate, precision, recall, unique_token_count
from .model import REGIMES, SPLITS, PredictionSet, SampleKey
from .simulator import SimulatorParams, generate, planted_threshold
from .util import format_table


def _parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric grid component in {text!r}") from None
    if step <= 0:
        raise argparse.ArgumentTypeError(f"grid step must be > 0, got {step}")
    if not 0.0 <= start <= stop <= 1.0:
        raise argparse.ArgumentTypeError(f"grid bounds must satisfy 0 <= start <= stop <= 1, got {text!r}")
    return start, stop, step


def _parse_csv_list(text: str) -> list[str]:
    items = [p.strip() for p in text.split(",") if p.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _unit_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {x}")
    return x


def _add_corpus_flags(sp: argparse.ArgumentParser, attributions_required: bool = True) -> None:
    sp.add_argument("--documents", required=True, help="documents JSONL file")
    sp.add_argument("--annotations", required=True, help="annotations JSONL file")
    sp.add_argument("--attributions", required=attributions_required, help="attributions JSONL file")


def _add_threshold_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--thresholds-file", help="per-model decision thresholds (calibrate output)")
    sp.add_argument("--theta", type=_unit_float, help="uniform decision threshold overriding --thresholds-file")


# ---------------------------------------------------------------------------
# shared evaluation context


@dataclass
class EvalContext:
    corpus: Corpus
    samples: list[SampleKey]
    gt: dict[SampleKey, frozenset[int]]
    regime_order: list[str]
    members: list[str]
    members_by_regime: dict[str, list[str]]
    preds: dict[str, dict[SampleKey, PredictionSet]]
    probs: dict[str, dict[SampleKey, float]]


def _load_corpus_from_args(args) -> Corpus:
    return dataio.load_corpus(args.documents, args.annotations, getattr(args, "attributions", None))


def _member_thresholds(args, parser: argparse.ArgumentParser, members: Sequence[str]) -> dict[str, float]:
    if args.theta is not None:
        return {m: args.theta for m in members}
    if args.thresholds_file:
        table = dataio.load_thresholds(args.thresholds_file)
        missing = [m for m in members if m not in table]
        if missing:
            raise DataError(f"thresholds file has no entry for model(s): {', '.join(missing)}")
        return {m: table[m] for m in members}
    parser.error("one of --theta or --thresholds-file is required to extract predictions")


def _build_context(args, parser: argparse.ArgumentParser, need_probs: bool = True) -> EvalContext:
    corpus = _load_corpus_from_args(args)
    split_docs = {d.doc_id for d in corpus.documents if d.split == args.split}
    if not split_docs:
        raise ConfigError(f"no documents in split {args.split!r}")

    style = args.style
    if style == "all":
        keys = {a.key for a in corpus.annotations if a.doc_id in split_docs}
        gt = {}
    else:
        selected = [a for a in corpus.annotations if a.style == style and a.doc_id in split_docs]
        min_spans = getattr(args, "min_spans", 0)
        if min_spans > 1:
            if style == "complete":
                selected = dataio.filter_multi_span_test_cases(selected, min_spans)
            else:
                selected = [a for a in selected if dataio.annotation_span_count(a) >= min_spans]
        keys = {a.key for a in selected}
        gt = {a.key: a.evidence_ids for a in selected}
    samples = sorted(keys)
    if not samples:
        raise ConfigError(f"no samples with style {style!r} in split {args.split!r}")

    predictions_path = getattr(args, "predictions", None)
    record_index = corpus.record_index()
    regime_of = corpus.regime_of()

    if predictions_path:
        loaded = dataio.load_predictions(predictions_path)
        preds_all: dict[str, dict[SampleKey, PredictionSet]] = {}
        for p in loaded:
            preds_all.setdefault(p.source_id, {})[p.key] = p
        # sources not covered by the attributions (e.g. precomputed ensembles)
        # fall into the pseudo-regime "all"
        member_regime = {m: regime_of.get(m, "all") for m in preds_all}
        available = sorted(set(member_regime.values()))
    else:
        if not corpus.attributions:
            parser.error("one of --attributions or --predictions is required")
        preds_all = None
        member_regime = regime_of
        available = sorted(set(regime_of.values()))

    regime_order = args.regime if args.regime else available
    unknown = [r for r in regime_order if r not in available]
    if unknown:
        hint = (
            "; pass --attributions alongside --predictions to label sources with regimes"
            if predictions_path
            else ""
        )
        raise DataError(f"regime(s) {', '.join(unknown)} not present (have: {', '.join(available)}){hint}")

    members_by_regime = {
        r: sorted(m for m, reg in member_regime.items() if reg == r) for r in regime_order
    }
    members = [m for r in regime_order for m in members_by_regime[r]]

    preds: dict[str, dict[SampleKey, PredictionSet]] = {m: {} for m in members}
    probs: dict[str, dict[SampleKey, float]] = {m: {} for m in members}
    if predictions_path:
        for m in members:
            for s in samples:
                p = preds_all[m].get(s)
                if p is None:
                    raise DataError(f"predictions file has no entry for source {m!r}, sample {s}")
                preds[m][s] = p
                rec = record_index.get((m, s))
                if rec is not None:
                    probs[m][s] = rec.probability
                elif need_probs:
                    raise DataError(
                        f"certainty gating needs a probability for {m!r}, sample {s}; "
                        "pass --attributions alongside --predictions"
                    )
    else:
        thetas = _member_thresholds(args, parser, members)
        for m in members:
            for s in samples:
                rec = record_index.get((m, s))
                if rec is None:
                    raise DataError(f"no attribution record for model {m!r}, sample {s}")
                preds[m][s] = extract_prediction(record_score_vector(rec), thetas[m])
                probs[m][s] = rec.probability
    return EvalContext(
        corpus=corpus,
        samples=samples,
        gt=gt,
        regime_order=regime_order,
        members=members,
        members_by_regime=members_by_regime,
        preds=preds,
        probs=probs,
    )


def _metric_tables(ctx: EvalContext) -> dict[str, dict[str, dict[SampleKey, float]]]:
    """metric -> model -> sample -> value for both metrics."""
    tables = {"recall": {}, "precision": {}}
    for m in ctx.members:
        r_vals, p_vals = {}, {}
        for s in ctx.samples:
            ids = ctx.preds[m][s].token_ids
            r_vals[s] = recall(ctx.gt[s], ids)
            p_vals[s] = precision(ctx.gt[s], ids)
        tables["recall"][m] = r_vals
        tables["precision"][m] = p_vals
    return tables


def _set_metrics(ctx: EvalContext, sets: dict[SampleKey, frozenset[int]]) -> dict[str, dict[SampleKey, float]]:
    return {
        "recall": {s: recall(ctx.gt[s], sets[s]) for s in ctx.samples},
        "precision": {s: precision(ctx.gt[s], sets[s]) for s in ctx.samples},
    }


# ---------------------------------------------------------------------------
# evaluate

_EVAL_MODES = ("single", "best", "max", "ensemble", "dynamic", "cross")


@dataclass
class ApproachColumn:
    name: str
    csv_values: dict[SampleKey, float]
    agg: dict[str, Aggregate]  # metric -> aggregate


def _evaluate_columns(ctx: EvalContext, args, parser) -> list[ApproachColumn]:
    tables = _metric_tables(ctx)
    metric = args.metric
    columns: list[ApproachColumn] = []

    def union_column(name: str, members: Sequence[str]) -> ApproachColumn:
        sets = {
            s: union_ensemble([ctx.preds[m][s] for m in members]).token_ids
            for s in ctx.samples
        }
        per_metric = _set_metrics(ctx, sets)
        return ApproachColumn(
            name=name,
            csv_values=per_metric[metric],
            agg={k: aggregate(v.values()) for k, v in per_metric.items()},
        )

    for mode in args.mode:
        if mode == "single":
            if not args.model:
                parser.error("--mode single requires --model")
            for m in args.model:
                if m not in ctx.preds:
                    raise DataError(f"model {m!r} not among selected members")
                columns.append(
                    ApproachColumn(
                        name=f"model_{m}",
                        csv_values=tables[metric][m],
                        agg={k: aggregate(tables[k][m].values()) for k in tables},
                    )
                )
        elif mode == "best":
            for r in ctx.regime_order:
                members = ctx.members_by_regime[r]
                if not members:
                    raise DataError(f"no members in regime {r!r}")
                best = select_best_model(tables[metric], ctx.samples, members)
                columns.append(
                    ApproachColumn(
                        name=f"best_{r.lower()}",
                        csv_values=tables[metric][best.model_id],
                        agg={k: aggregate(tables[k][best.model_id].values()) for k in tables},
                    )
                )
        elif mode == "max":
            agg = {}
            csv_values = None
            for k in tables:
                maxima, agg_k = per_sample_max(tables[k], ctx.samples, ctx.members)
                agg[k] = agg_k
                if k == metric:
                    csv_values = maxima
            columns.append(ApproachColumn(name="max_value", csv_values=csv_values, agg=agg))
        elif mode == "ensemble":
            for r in ctx.regime_order:
                columns.append(union_column(f"ens_{r.lower()}", ctx.members_by_regime[r]))
        elif mode == "dynamic":
            if args.certainty_threshold is None:
                parser.error("--mode dynamic requires --certainty-threshold")
            for r in ctx.regime_order:
                members = ctx.members_by_regime[r]
                sets = {}
                for s in ctx.samples:
                    pred, _ = dynamic_ensemble(
                        [ctx.preds[m][s] for m in members],
                        [ctx.probs[m][s] for m in members],
                        args.certainty_threshold,
                    )
                    sets[s] = pred.token_ids
                per_metric = _set_metrics(ctx, sets)
                columns.append(
                    ApproachColumn(
                        name=f"dyn_{r.lower()}",
                        csv_values=per_metric[metric],
                        agg={k: aggregate(v.values()) for k, v in per_metric.items()},
                    )
                )
        elif mode == "cross":
            columns.append(union_column("ens_cross", ctx.members))
        else:  # argparse choices should prevent this
            parser.error(f"unknown mode {mode!r}")
    return columns


def cmd_evaluate(args) -> int:
    parser = args.parser
    for mode in args.mode:
        if mode not in _EVAL_MODES:
            parser.error(f"unknown mode {mode!r} (choose from {', '.join(_EVAL_MODES)})")
    ctx = _build_context(args, parser, need_probs="dynamic" in args.mode)
    if args.dump_predictions:
        dataio.write_predictions(
            args.dump_predictions,
            [ctx.preds[m][s] for m in ctx.members for s in ctx.samples],
        )
    columns = _evaluate_columns(ctx, args, parser)

    col_names = [c.name for c in columns]
    rows = [
        reports.ReportRow(sample=i + 1, values=tuple(c.csv_values[s] for c in columns))
        for i, s in enumerate(ctx.samples)
    ]
    aggregates = {
        "mean": tuple(aggregate(c.csv_values.values()).mean for c in columns),
        "std": tuple(aggregate(c.csv_values.values()).std for c in columns),
    }
    config = {
        "mode": args.mode,
        "regime": ctx.regime_order,
        "style": args.style,
        "split": args.split,
        "metric": args.metric,
        "certainty_threshold": args.certainty_threshold,
        "min_spans": args.min_spans,
        "theta": args.theta,
        "model": args.model,
    }
    comments = [reports.metadata_line("evaluate", config).lstrip("# ")]
    comments += [f"sample {i + 1} = {s}" for i, s in enumerate(ctx.samples)]
    if args.out:
        reports.write_per_sample_report(args.out, col_names, rows, aggregates, comments)

    table_rows = [
        [str(i + 1)] + [f"{c.csv_values[s]:.4g}" for c in columns]
        for i, s in enumerate(ctx.samples)
    ]
    print(f"per-sample {args.metric} ({len(ctx.samples)} samples, style={args.style}, split={args.split})")
    print(format_table(["sample"] + col_names, table_rows))
    print()
    print("aggregates (mean ±population std)")
    agg_rows = [
        [c.name, str(c.agg["recall"]), str(c.agg["precision"])]
        for c in columns
    ]
    print(format_table(["approach", "recall", "precision"], agg_rows))
    if args.out:
        print(f"\nwrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(args) -> int:
    parser = args.parser
    ctx = _build_context(args, parser)
    if len(ctx.regime_order) != 1:
        parser.error("sweep works on exactly one regime; pass --regime with a single value")
    members = ctx.members
    start, stop, step = args.thresholds
    thetas = threshold_grid(start, stop, step)

    lines = [reports.metadata_line("sweep", {"thresholds": args.thresholds, "regime": ctx.regime_order,
                                             "style": args.style, "split": args.split, "theta": args.theta})]
    lines.append("threshold,recall_mean,precision_mean,retained_mean,retained_std")
    table_rows = []
    for t in thetas:
        recalls, precisions, retained = [], [], []
        for s in ctx.samples:
            pred, kept = dynamic_ensemble(
                [ctx.preds[m][s] for m in members],
                [ctx.probs[m][s] for m in members],
                t,
            )
            recalls.append(recall(ctx.gt[s], pred.token_ids))
            precisions.append(precision(ctx.gt[s], pred.token_ids))
            retained.append(float(kept.retained))
        r_agg, p_agg, k_agg = aggregate(recalls), aggregate(precisions), aggregate(retained)
        lines.append(f"{t!r},{r_agg.mean!r},{p_agg.mean!r},{k_agg.mean!r},{k_agg.std!r}")
        table_rows.append([f"{t:g}", f"{r_agg.mean:.4f}", f"{p_agg.mean:.4f}", f"{k_agg.mean:.2f}", f"{k_agg.std:.2f}"])

    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"certainty sweep over {len(members)} members, {len(ctx.samples)} samples")
    print(format_table(["threshold", "recall_mean", "precision_mean", "retained_mean", "retained_std"], table_rows))
    if args.out:
        print(f"\nwrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# agreement


def cmd_agreement(args) -> int:
    parser = args.parser
    ctx = _build_context(args, parser, need_probs=False)
    lines = [reports.metadata_line("agreement", {"regime": ctx.regime_order, "style": args.style,
                                                 "split": args.split, "theta": args.theta})]
    lines.append("regime,style,samples,agreement_mean,agreement_std,unique_tokens_mean,unique_tokens_std")
    table_rows = []
    for r in ctx.regime_order:
        members = ctx.members_by_regime[r]
        if len(members) < 2:
            raise ConfigError(f"agreement needs >= 2 members in regime {r!r}, found {len(members)}")
        ag_values, uniq_values = [], []
        for s in ctx.samples:
            sets = [ctx.preds[m][s].token_ids for m in members]
            ag_values.append(agreement(sets))
            uniq_values.append(float(unique_token_count(sets)))
        ag = aggregate(ag_values)
        uniq = aggregate(uniq_values)
        lines.append(f"{r},{args.style},{len(ctx.samples)},{ag.mean!r},{ag.std!r},{uniq.mean!r},{uniq.std!r}")
        table_rows.append([r, args.style, str(len(ctx.samples)), str(ag), str(uniq)])

    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(format_table(["regime", "style", "samples", "agreement", "unique tokens"], table_rows))
    if args.out:
        print(f"\nwrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# calibrate


def cmd_calibrate(args) -> int:
    corpus = _load_corpus_from_args(args)
    split_docs = {d.doc_id for d in corpus.documents if d.split == args.split}
    annotations = [a for a in corpus.annotations if a.style == args.style and a.doc_id in split_docs]
    records = [r for r in corpus.attributions if r.doc_id in split_docs]
    if not annotations or not records:
        raise ConfigError(f"empty validation set: no {args.style!r} annotations or records in split {args.split!r}")

    regimes = sorted({r.regime for r in records})
    rows = []
    table_rows = []
    for regime in regimes:
        regime_records = [r for r in records if r.regime == regime]
        threshold = calibrate_threshold(regime_records, annotations, args.grid, args.objective)
        for model_id in sorted({r.model_id for r in regime_records}):
            rows.append(
                {
                    "model_id": model_id,
                    "regime": regime,
                    "theta": threshold.theta,
                    "objective": threshold.objective,
                    "objective_value": threshold.objective_value,
                }
            )
        table_rows.append(
            [regime, f"{threshold.theta:g}", threshold.objective, f"{threshold.objective_value:.4f}",
             str(len({r.model_id for r in regime_records}))]
        )
    rows.sort(key=lambda row: row["model_id"])
    dataio.write_thresholds(args.out, rows)
    print(f"calibrated on {len(annotations)} annotation(s), split={args.split}, style={args.style}")
    print(format_table(["regime", "theta", "objective", "value", "models"], table_rows))
    print(f"\nwrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# simulate


def _params_from_args(args, parser: argparse.ArgumentParser) -> SimulatorParams:
    base: dict = {}
    if args.params:
        try:
            base = json.loads(Path(args.params).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise DataError(f"{args.params}: invalid JSON: {e.msg}") from None
        if not isinstance(base, dict):
            raise DataError(f"{args.params}: expected a JSON object of simulator parameters")
        allowed = {f.name for f in dataclass_fields(SimulatorParams)}
        unknown = sorted(set(base) - allowed)
        if unknown:
            raise DataError(f"{args.params}: unknown parameter(s) {', '.join(unknown)}")
    for f in dataclass_fields(SimulatorParams):
        value = getattr(args, f.name, None)
        if value is not None:
            base[f.name] = value
    try:
        return SimulatorParams(**base)
    except ConfigError as e:
        parser.error(str(e))


def cmd_simulate(args) -> int:
    parser = args.parser
    params = _params_from_args(args, parser)
    bad_regimes = [r for r in args.regimes if r not in REGIMES]
    if bad_regimes:
        parser.error(f"unknown regime(s) {', '.join(bad_regimes)}; choose from {', '.join(REGIMES)}")
    bad_splits = [s for s in args.split_cycle if s not in SPLITS]
    if bad_splits:
        parser.error(f"unknown split(s) {', '.join(bad_splits)}; choose from {', '.join(SPLITS)}")
    documents, annotations, attributions = generate(
        params, regimes=tuple(args.regimes), split_cycle=tuple(args.split_cycle), code=args.code
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = Corpus(documents=tuple(documents), annotations=tuple(annotations), attributions=tuple(attributions))
    dataio.write_corpus(out, corpus)
    theta = planted_threshold(params)
    regime_of = corpus.regime_of()
    dataio.write_thresholds(
        out / dataio.THRESHOLDS_FILE,
        [
            {"model_id": m, "regime": regime_of[m], "theta": theta, "objective": "planted"}
            for m in corpus.model_ids()
        ],
    )
    splits = {}
    for d in documents:
        splits[d.split] = splits.get(d.split, 0) + 1
    split_summary = ", ".join(f"{k}={v}" for k, v in sorted(splits.items()))
    print(f"simulated {len(documents)} documents ({split_summary}), {len(corpus.model_ids())} models")
    print(f"planted decision threshold: {theta:g}")
    print(f"wrote {out / dataio.DOCUMENTS_FILE}, {out / dataio.ANNOTATIONS_FILE}, "
          f"{out / dataio.ATTRIBUTIONS_FILE}, {out / dataio.THRESHOLDS_FILE}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evikit",
        description="Evidence-completeness evaluation: threshold, ensemble, and score "
        "token-attribution records against human annotations.",
    )
    parser.add_argument("--version", action="version", version=f"evikit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="generate a synthetic corpus in the exchange format")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--params", help="JSON file of simulator parameters (flags override)")
    sp.add_argument("--doc-count", type=_positive_int)
    sp.add_argument("--tokens-per-doc", type=_positive_int)
    sp.add_argument("--evidence-per-doc", type=_positive_int)
    sp.add_argument("--model-count", type=_positive_int)
    sp.add_argument("--coverage-p", type=_unit_float)
    sp.add_argument("--blind-spot-b", type=_unit_float)
    sp.add_argument("--noise-q", type=_unit_float)
    sp.add_argument("--certainty-mean", type=_unit_float)
    sp.add_argument("--certainty-spread", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--regimes", type=_parse_csv_list, default=["SIM"],
                    help="regime labels assigned to contiguous model blocks (default: SIM)")
    sp.add_argument("--split-cycle", type=_parse_csv_list, default=["test", "validation", "train"],
                    help="split assignment cycle over documents")
    sp.add_argument("--code", default="c1", help="code attached to every generated sample")
    sp.set_defaults(func=cmd_simulate, parser=sp)

    sp = sub.add_parser("calibrate", help="calibrate decision thresholds on a validation split")
    _add_corpus_flags(sp)
    sp.add_argument("--grid", type=_parse_grid, default=(0.0, 1.0, 0.05),
                    help="theta grid start:stop:step, both endpoints included when step divides the range")
    sp.add_argument("--objective", choices=("f1", "recall", "precision"), default="f1")
    sp.add_argument("--split", default="validation", choices=("train", "validation", "test"))
    sp.add_argument("--style", default="sufficient", choices=("sufficient", "complete"))
    sp.add_argument("--out", required=True, help="thresholds JSONL output path")
    sp.set_defaults(func=cmd_calibrate, parser=sp)

    sp = sub.add_parser("evaluate", help="score approaches per sample and in aggregate")
    _add_corpus_flags(sp, attributions_required=False)
    _add_threshold_flags(sp)
    sp.add_argument("--predictions", help="precomputed predictions JSONL (alternative to --attributions)")
    sp.add_argument("--dump-predictions", help="write the per-member extracted predictions JSONL here")
    sp.add_argument("--mode", type=_parse_csv_list, default=["ensemble"],
                    help=f"comma-separated list from: {', '.join(_EVAL_MODES)}")
    sp.add_argument("--regime", type=_parse_csv_list, default=None,
                    help="regimes to evaluate, in column order (default: all present)")
    sp.add_argument("--model", type=_parse_csv_list, default=None, help="model ids for --mode single")
    sp.add_argument("--certainty-threshold", type=_unit_float, default=None)
    sp.add_argument("--style", default="complete", choices=("sufficient", "complete"))
    sp.add_argument("--split", default="test", choices=("train", "validation", "test"))
    sp.add_argument("--metric", choices=("recall", "precision"), default="recall",
                    help="metric reported in the per-sample CSV")
    sp.add_argument("--min-spans", type=int, default=0,
                    help="keep only samples whose evidence has at least this many spans")
    sp.add_argument("--out", help="per-sample CSV output path")
    sp.set_defaults(func=cmd_evaluate, parser=sp)

    sp = sub.add_parser("sweep", help="dynamic-ensemble metrics across certainty thresholds")
    _add_corpus_flags(sp)
    _add_threshold_flags(sp)
    sp.add_argument("--thresholds", type=_parse_grid, default=(0.0, 1.0, 0.1),
                    help="certainty threshold grid start:stop:step")
    sp.add_argument("--regime", type=_parse_csv_list, default=None)
    sp.add_argument("--style", default="complete", choices=("sufficient", "complete"))
    sp.add_argument("--split", default="test", choices=("train", "validation", "test"))
    sp.add_argument("--min-spans", type=int, default=0)
    sp.add_argument("--out", help="sweep CSV output path")
    sp.set_defaults(func=cmd_sweep, parser=sp)

    sp = sub.add_parser("agreement", help="member agreement and unique-token counts")
    _add_corpus_flags(sp, attributions_required=False)
    _add_threshold_flags(sp)
    sp.add_argument("--predictions", help="precomputed predictions JSONL (alternative to --attributions)")
    sp.add_argument("--regime", type=_parse_csv_list, default=None)
    sp.add_argument("--style", default="all", choices=("all", "sufficient", "complete"),
                    help="'all' uses every sample in the split regardless of annotation style")
    sp.add_argument("--split", default="test", choices=("train", "validation", "test"))
    sp.add_argument("--out", help="agreement CSV output path")
    sp.set_defaults(func=cmd_agreement, parser=sp)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EvikitError, OSError) as e:
        print(f"evikit {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
