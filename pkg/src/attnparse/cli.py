"""Command-line front end.

Subcommands:
    rank-heads  score every attention head on a validation corpus
    parse       parse a test corpus with a saved head ranking (top-K ensemble)
    evaluate    unlabeled span F1 (and optional per-label recall) report
    baseline    left/right/random branching trees for a gold corpus
    analyze     overlap: compare top-K head sets across languages

Exit codes: 0 ok, 2 usage, 3 data error, 4 I/O error. `--threads`
(fallback: env ATND_THREADS) only changes wall time, never output bytes.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import analysis, atnd, ensemble, evaluation, treebank
from .distances import Metric
from .ensemble import HeadRanking, Method
from .errors import AttnparseError, DataError, UsageError
from .trees import gold_words

K_GRID = (5, 10, 20, 30)
DEFAULT_K = 20

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("ATND_THREADS")
    return max(1, int(env)) if env else 1


def _punct_tags(args) -> frozenset[str]:
    if getattr(args, "keep_punct", False):
        return frozenset()
    if getattr(args, "punct_tags", None):
        return frozenset(t for t in args.punct_tags.split(",") if t)
    return treebank.DEFAULT_PUNCT_TAGS


def _load_gold(path, tags: frozenset[str]):
    trees = treebank.read_corpus(path)
    if tags:
        trees = [treebank.strip_punctuation(t, tags) for t in trees]
    return trees


def _load_attn(path):
    corpus = atnd.read_atnd(path)
    corpus.sentences = [atnd.with_average_head(t) for t in corpus.sentences]
    return corpus


def cmd_rank_heads(args) -> int:
    corpus = _load_attn(args.attn)
    golds = _load_gold(args.gold, _punct_tags(args))
    method = Method(args.method)
    metrics = (
        [Metric.JSD, Metric.HEL] if args.metric == "both" else [Metric(args.metric)]
    )
    date = os.environ.get(
        "ATND_RANKING_DATE", datetime.date.today().isoformat()
    )
    best = None
    for metric in metrics:
        ranking = ensemble.rank_heads(
            corpus.sentences,
            golds,
            method,
            metric,
            metadata={
                "validation_corpus": str(args.gold),
                "model": corpus.model,
                "language": corpus.language,
                "date": date,
                "metric_search": args.metric,
            },
            threads=_threads(args),
        )
        if best is None or ranking.entries[0].f1 > best.entries[0].f1:
            best = ranking
    best.save(args.out)
    print(
        f"ranked {len(best.entries)} heads "
        f"(best {best.metric.value} F1 {100 * best.entries[0].f1:.1f})"
    )
    return EXIT_OK


def cmd_parse(args) -> int:
    if args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    corpus = _load_attn(args.attn)
    ranking = HeadRanking.load(args.heads)
    if args.method is not None:
        ranking.method = Method(args.method)
    k = min(args.k, len(ranking.entries))
    if k < args.k:
        print(
            f"note: only {k} heads available, using K={k}", file=sys.stderr
        )

    def one(t):
        tree = ensemble.ensemble_parse(t, ranking, k, normalize=args.normalize)
        return treebank.write_tree(tree, list(t.words.words))

    threads = _threads(args)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            lines = list(ex.map(one, corpus.sentences))
    else:
        lines = [one(t) for t in corpus.sentences]
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"parsed {len(lines)} sentences -> {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    preds = treebank.read_corpus(args.pred)
    golds = _load_gold(args.gold, _punct_tags(args))
    labels = (
        [s for s in args.label_recall.split(",") if s] if args.label_recall else None
    )
    report = evaluation.evaluate_corpus(preds, golds, labels=labels)
    doc = report.to_json()
    if args.heads and Path(args.heads).exists():
        doc["ranking_metadata"] = HeadRanking.load(args.heads).metadata
    if args.report:
        Path(args.report).write_text(
            json.dumps(doc, indent=2) + "\n", encoding="utf-8"
        )
    print(f"corpus F1: {report.corpus_f1:.1f}")
    for lab, rec in report.label_recall.items():
        print(f"{lab} recall: {100 * rec:.1f}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    golds = _load_gold(args.gold, _punct_tags(args))
    words = [gold_words(t) for t in golds]
    trees = evaluation.baseline_corpus(
        [len(w) for w in words], args.strategy, seed=args.seed
    )
    lines = [treebank.write_tree(t, w) for t, w in zip(trees, words)]
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} {args.strategy}-branching trees -> {args.out}")
    return EXIT_OK


def cmd_analyze_overlap(args) -> int:
    rankings = [HeadRanking.load(p) for p in args.heads]
    report = analysis.head_overlap(rankings, args.k)
    csv_path = args.csv
    if csv_path is None and args.out.endswith(".json"):
        csv_path = args.out[: -len(".json")] + ".csv"
    report.save(args.out, csv_path)
    print(
        f"{len(report.languages)} languages, "
        f"{len(report.universal)} universal heads at K={args.k}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="attnparse",
        description="Constituency trees from transformer attention heads",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--punct-tags", default=None,
                       help="comma-separated POS tags stripped from gold trees")
        p.add_argument("--keep-punct", action="store_true",
                       help="do not strip punctuation from gold trees")

    p = sub.add_parser("rank-heads", help="score every head on a validation set")
    p.add_argument("--attn", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--method", choices=[m.value for m in Method], required=True)
    p.add_argument("--metric", choices=["jsd", "hel", "both"], default="both")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_rank_heads)

    p = sub.add_parser("parse", help="top-K ensemble parsing with a saved ranking")
    p.add_argument("--attn", required=True)
    p.add_argument("--heads", required=True)
    p.add_argument("--k", type=int, default=DEFAULT_K,
                   help=f"ensemble size (grid {list(K_GRID)}, default {DEFAULT_K})")
    p.add_argument("--method", choices=[m.value for m in Method], default=None,
                   help="override the ranking's parsing method")
    p.add_argument("--normalize", action="store_true",
                   help="min-max normalize each head's distances before averaging")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("evaluate", help="unlabeled span F1 report")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--label-recall", default=None,
                   help="comma-separated labels, e.g. NP,VP")
    p.add_argument("--report", default=None, help="write a JSON report here")
    p.add_argument("--heads", default=None,
                   help="ranking JSON whose metadata is copied into the report")
    common(p)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("baseline", help="naive branching baselines")
    p.add_argument("--gold", required=True)
    p.add_argument("--strategy", choices=["left", "right", "random"], required=True)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("analyze", help="cross-language analyses")
    asub = p.add_subparsers(dest="analysis", required=True)
    po = asub.add_parser("overlap", help="top-K head-set overlap across rankings")
    po.add_argument("--heads", nargs="+", required=True)
    po.add_argument("--k", type=int, default=DEFAULT_K)
    po.add_argument("--out", required=True)
    po.add_argument("--csv", default=None)
    po.add_argument("--threads", type=int, default=None)
    po.set_defaults(fn=cmd_analyze_overlap)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"error[{e.category}]: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AttnparseError as e:
        print(f"error[{e.category}]: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error[io]: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
