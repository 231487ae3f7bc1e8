"""Command-line entry point: ``extract-attn``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .extract import AGGREGATIONS, Extractor
from .writer import write_atnd


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="extract-attn",
        description="Extract per-head transformer attention into an ATND file.",
    )
    p.add_argument("--input", required=True,
                   help="word-tokenized text: one sentence per line, space-separated")
    p.add_argument("--model", required=True, help="checkpoint id or local path")
    p.add_argument("--out", required=True, help="output ATND path")
    p.add_argument("--hidden", action="store_true", help="also store hidden states")
    p.add_argument("--batch", type=int, default=16, help="inference batch size")
    p.add_argument("--device", default="cpu", help="torch device (default: cpu)")
    p.add_argument("--agg", choices=AGGREGATIONS, default="row-mean-col-sum",
                   help="subword-to-word aggregation rule")
    p.add_argument("--language", default="en",
                   help="language code recorded in the manifest")
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return 1
    sentences = [line.split() for line in lines if line.strip()]
    if not sentences:
        print(f"error: no sentences in {args.input}", file=sys.stderr)
        return 1
    try:
        ex = Extractor(args.model, device=args.device)
        extracted = ex.extract(
            sentences,
            with_hidden=args.hidden,
            batch_size=args.batch,
            aggregation=args.agg,
        )
        write_atnd(
            args.out,
            model=args.model,
            language=args.language,
            sentences=[(s.words, s.attn, s.hidden) for s in extracted],
            layers=ex.layers,
            heads=ex.heads,
            hidden_dim=ex.hidden_dim if args.hidden else 0,
        )
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(extracted)} of {len(sentences)} sentences to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
