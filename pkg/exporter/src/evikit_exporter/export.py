"""Run a checkpoint over a documents file and write attribution records.

Consumes and produces the evikit exchange formats directly (line-delimited
JSON); the evaluation toolkit is not imported. One record is written per
(document, code):

    {"model_id", "regime", "doc_id", "code", "probability",
     "attention": [...], "input_grad_l2": [...],
     "attention_pooling": ..., "subword_alignment": ...}

Vectors are aligned to the document's token positions: the model scores
subword pieces, and a token's attribution is the max over its pieces (so a
strongly attributed fragment keeps its word visible). Documents whose tokens
cannot be aligned produce an error record in a `.errors.jsonl` sidecar and
the export continues.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import torch

from .model import CoderConfig, TinyCoder, pool_to_words
from .tokenizer import AlignmentError, HashPieceTokenizer

ATTENTION_POOLING = "label_query_softmax;max_over_subwords"
SUBWORD_ALIGNMENT = "max_over_subwords"


def save_checkpoint(path: str | Path, model: TinyCoder) -> None:
    torch.save({"config": asdict(model.config), "state_dict": model.state_dict()}, path)


def load_checkpoint(path: str | Path) -> TinyCoder:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = TinyCoder(CoderConfig(**payload["config"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model


def new_checkpoint(path: str | Path, codes: list[str], seed: int = 0, **config_overrides) -> TinyCoder:
    """Create and save a randomly initialized checkpoint (useful for smoke tests)."""
    torch.manual_seed(seed)
    model = TinyCoder(CoderConfig(codes=list(codes), **config_overrides))
    model.eval()
    save_checkpoint(path, model)
    return model


def read_documents(path: str | Path) -> list[dict]:
    docs = []
    with Path(path).open("r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {e.msg}") from None
            for key in ("doc_id", "tokens"):
                if key not in obj:
                    raise ValueError(f"{path}:{line_no}: missing field {key!r}")
            docs.append(obj)
    return docs


@dataclass
class ExportSummary:
    records_written: int
    documents_exported: int
    errors: list[dict]


def export(
    checkpoint: str | Path | TinyCoder,
    documents_path: str | Path,
    out_path: str | Path,
    model_id: str,
    regime: str = "IGR",
    codes: list[str] | None = None,
) -> ExportSummary:
    """Write one attribution record per (document, code) for a checkpoint.

    codes defaults to every code the checkpoint was built with. Inference is
    deterministic: eval mode, no sampling, gradients only for attributions.
    """
    model = checkpoint if isinstance(checkpoint, TinyCoder) else load_checkpoint(checkpoint)
    model.eval()
    wanted = list(codes) if codes is not None else list(model.config.codes)
    unknown = sorted(set(wanted) - set(model.config.codes))
    if unknown:
        raise ValueError(f"checkpoint has no head for code(s): {', '.join(unknown)}")
    code_index = {c: i for i, c in enumerate(model.config.codes)}
    tokenizer = HashPieceTokenizer(vocab_size=model.config.vocab_size, max_piece_len=model.config.max_piece_len)

    documents = read_documents(documents_path)
    out_path = Path(out_path)
    errors: list[dict] = []
    written = 0
    exported_docs = 0
    with out_path.open("w", encoding="utf-8") as f:
        for doc in documents:
            words = list(doc["tokens"])
            try:
                encoding = tokenizer.encode_words(words)
            except AlignmentError as e:
                errors.append({"doc_id": doc["doc_id"], "error": str(e)})
                continue
            probs, attention, ixg = model.attribute(encoding.piece_ids)
            attn_words = pool_to_words(attention, encoding.word_index, len(words))
            ixg_words = pool_to_words(ixg, encoding.word_index, len(words))
            if attn_words.shape[-1] != len(words) or ixg_words.shape[-1] != len(words):
                errors.append({"doc_id": doc["doc_id"], "error": "pooled vector length mismatch"})
                continue
            exported_docs += 1
            for code in wanted:
                c = code_index[code]
                record = {
                    "model_id": model_id,
                    "regime": regime,
                    "doc_id": doc["doc_id"],
                    "code": code,
                    "probability": float(probs[c]),
                    "attention": [float(v) for v in attn_words[c]],
                    "input_grad_l2": [float(v) for v in ixg_words[c]],
                    "attention_pooling": ATTENTION_POOLING,
                    "subword_alignment": SUBWORD_ALIGNMENT,
                }
                f.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
                f.write("\n")
                written += 1
    if errors:
        errors_path = out_path.with_suffix(out_path.suffix + ".errors.jsonl")
        with errors_path.open("w", encoding="utf-8") as f:
            for err in errors:
                f.write(json.dumps(err, ensure_ascii=False, separators=(",", ":")))
                f.write("\n")
    return ExportSummary(records_written=written, documents_exported=exported_docs, errors=errors)
