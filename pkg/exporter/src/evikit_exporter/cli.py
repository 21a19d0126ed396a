"""evikit-export: create toy checkpoints and export attribution records."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .export import export, new_checkpoint


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="evikit-export")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("init", help="create a randomly initialized checkpoint")
    sp.add_argument("--checkpoint", required=True, help="output .pt path")
    sp.add_argument("--codes", required=True, help="comma-separated code list")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--d-model", type=int, default=32)
    sp.add_argument("--vocab-size", type=int, default=512)

    sp = sub.add_parser("run", help="export attribution records for a documents file")
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--documents", required=True)
    sp.add_argument("--out", required=True, help="attributions JSONL output path")
    sp.add_argument("--model-id", required=True)
    sp.add_argument("--regime", default="IGR", choices=("IGR", "EGT", "SIM"))
    sp.add_argument("--codes", help="comma-separated subset of the checkpoint's codes")

    args = parser.parse_args(argv)
    try:
        if args.command == "init":
            codes = [c.strip() for c in args.codes.split(",") if c.strip()]
            new_checkpoint(args.checkpoint, codes, seed=args.seed, d_model=args.d_model,
                           vocab_size=args.vocab_size)
            print(f"wrote checkpoint {args.checkpoint} ({len(codes)} codes)")
        else:
            codes = [c.strip() for c in args.codes.split(",")] if args.codes else None
            summary = export(args.checkpoint, args.documents, args.out,
                             model_id=args.model_id, regime=args.regime, codes=codes)
            print(f"wrote {summary.records_written} records for {summary.documents_exported} documents "
                  f"to {args.out}")
            if summary.errors:
                print(f"{len(summary.errors)} document(s) skipped; see errors sidecar", file=sys.stderr)
        return 0
    except (ValueError, OSError) as e:
        print(f"evikit-export: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
