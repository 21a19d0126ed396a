"""Exporter tests.

The evaluation toolkit is exercised only through its external interfaces:
the JSONL exchange files and the `evikit` CLI run as a subprocess.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest
import torch

from evikit_exporter import HashPieceTokenizer, export, load_checkpoint, new_checkpoint

CODES = ["410.1", "428.0"]

TOY_DOCS = [
    {"doc_id": "note-1", "tokens": ["acute", "pulmonary", "hypertension", "noted", "today"], "split": "test"},
    {"doc_id": "note-2", "tokens": ["chronic", "heart", "failure"], "split": "test"},
    {"doc_id": "note-3", "tokens": ["paraganglioma", "of", "the", "vagus"], "split": "test"},
]

TOY_ANNOTATIONS = [
    {"doc_id": "note-1", "code": "410.1", "style": "complete", "evidence_token_ids": [1, 2]},
    {"doc_id": "note-2", "code": "410.1", "style": "complete", "evidence_token_ids": [0, 2]},
    {"doc_id": "note-3", "code": "410.1", "style": "complete", "evidence_token_ids": [0, 3]},
    {"doc_id": "note-1", "code": "428.0", "style": "complete", "evidence_token_ids": [0, 3]},
    {"doc_id": "note-2", "code": "428.0", "style": "complete", "evidence_token_ids": [1]},
    {"doc_id": "note-3", "code": "428.0", "style": "complete", "evidence_token_ids": [2]},
]


def write_jsonl(path: Path, rows) -> Path:
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "tiny.pt"
    new_checkpoint(path, CODES, seed=7)
    return path


class TestTokenizer:
    def test_pieces_cover_word_and_align(self):
        tok = HashPieceTokenizer(max_piece_len=4)
        enc = tok.encode_words(["hypertension", "of"])
        assert "".join(tok.pieces("hypertension")) == "hypertension"
        assert enc.word_index == [0, 0, 0, 1]

    def test_ids_are_stable_across_instances(self):
        a = HashPieceTokenizer().encode_words(["tumor"])
        b = HashPieceTokenizer().encode_words(["tumor"])
        assert a.piece_ids == b.piece_ids


class TestExport:
    def test_two_token_doc_shapes(self, checkpoint, tmp_path):
        docs = write_jsonl(tmp_path / "documents.jsonl", [{"doc_id": "d", "tokens": ["aa", "bb"], "split": "test"}])
        out = tmp_path / "attributions.jsonl"
        summary = export(checkpoint, docs, out, model_id="tiny-0")
        assert summary.records_written == len(CODES)
        for line in out.read_text().splitlines():
            rec = json.loads(line)
            assert len(rec["attention"]) == 2
            assert len(rec["input_grad_l2"]) == 2
            assert 0.0 <= rec["probability"] <= 1.0
            assert all(v >= 0 for v in rec["attention"])
            assert all(v >= 0 for v in rec["input_grad_l2"])

    def test_zero_input_embedding_zeroes_input_grad(self, checkpoint, tmp_path):
        model = load_checkpoint(checkpoint)
        tok = HashPieceTokenizer(vocab_size=model.config.vocab_size, max_piece_len=model.config.max_piece_len)
        bucket = tok.piece_id("aa")  # single-piece word
        with torch.no_grad():
            model.embedding.weight[bucket] = 0.0
        docs = write_jsonl(tmp_path / "documents.jsonl", [{"doc_id": "d", "tokens": ["aa", "word"], "split": "test"}])
        out = tmp_path / "attributions.jsonl"
        export(model, docs, out, model_id="tiny-0")
        rec = json.loads(out.read_text().splitlines()[0])
        assert rec["input_grad_l2"][0] == 0.0
        assert rec["input_grad_l2"][1] > 0.0

    def test_alignment_failure_skips_document_and_continues(self, checkpoint, tmp_path):
        docs = write_jsonl(
            tmp_path / "documents.jsonl",
            [
                {"doc_id": "good", "tokens": ["fine"], "split": "test"},
                {"doc_id": "bad", "tokens": [""], "split": "test"},  # no subword pieces
                {"doc_id": "also-good", "tokens": ["ok", "too"], "split": "test"},
            ],
        )
        out = tmp_path / "attributions.jsonl"
        summary = export(checkpoint, docs, out, model_id="tiny-0")
        assert summary.documents_exported == 2
        assert [e["doc_id"] for e in summary.errors] == ["bad"]
        sidecar = tmp_path / "attributions.jsonl.errors.jsonl"
        assert sidecar.exists()
        assert json.loads(sidecar.read_text().splitlines()[0])["doc_id"] == "bad"
        exported_ids = {json.loads(l)["doc_id"] for l in out.read_text().splitlines()}
        assert exported_ids == {"good", "also-good"}

    def test_export_is_deterministic(self, checkpoint, tmp_path):
        docs = write_jsonl(tmp_path / "documents.jsonl", TOY_DOCS)
        outs = []
        for name in ("a.jsonl", "b.jsonl"):
            out = tmp_path / name
            export(checkpoint, out_path=out, documents_path=docs, model_id="tiny-0")
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_unknown_code_rejected(self, checkpoint, tmp_path):
        docs = write_jsonl(tmp_path / "documents.jsonl", TOY_DOCS[:1])
        with pytest.raises(ValueError, match="no head"):
            export(checkpoint, docs, tmp_path / "out.jsonl", model_id="m", codes=["999.9"])


class TestPipelineAcceptance:
    def test_export_feeds_evaluation_cli_end_to_end(self, checkpoint, tmp_path):
        """Exported records validate cleanly and drive cmd_evaluate to completion."""
        docs = write_jsonl(tmp_path / "documents.jsonl", TOY_DOCS)
        anns = write_jsonl(tmp_path / "annotations.jsonl", TOY_ANNOTATIONS)
        attributions = tmp_path / "attributions.jsonl"
        summary = export(checkpoint, docs, attributions, model_id="tiny-0", regime="IGR")
        assert not summary.errors

        token_counts = {d["doc_id"]: len(d["tokens"]) for d in TOY_DOCS}
        records = [json.loads(l) for l in attributions.read_text().splitlines()]
        assert len(records) == len(TOY_DOCS) * len(CODES)
        for rec in records:
            assert len(rec["attention"]) == token_counts[rec["doc_id"]]
            assert len(rec["input_grad_l2"]) == token_counts[rec["doc_id"]]

        # loading inside the CLI runs full corpus validation; a nonzero exit
        # would mean the export produced an inconsistent record
        report = tmp_path / "report.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "evikit", "evaluate",
             "--documents", str(docs), "--annotations", str(anns),
             "--attributions", str(attributions), "--theta", "0.2",
             "--mode", "ensemble,max", "--out", str(report)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        lines = report.read_text().splitlines()
        header = next(l for l in lines if not l.startswith("#"))
        assert header == "sample,ens_igr,max_value"
        assert sum(1 for l in lines if l[:1].isdigit()) == len(TOY_ANNOTATIONS)
        print("[PASS] exporter shape contract + cmd_evaluate end-to-end")
