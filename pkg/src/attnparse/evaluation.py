"""Unlabeled span F1, per-label recall, and naive branching baselines.

Scoring follows the usual unsupervised-parsing protocol: per-sentence F1
over nontrivial span sets (whole-sentence and single-word spans dropped,
set semantics), averaged over the corpus. Empty-vs-empty comparisons
count as 1.0, so length-2 sentences score perfectly by convention.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import CorpusMismatch, DataError
from .trees import (
    BinaryTree,
    GoldTree,
    Leaf,
    Node,
    Span,
    gold_leaves,
    labeled_spans,
    n_leaves,
    tree_to_spans,
)


def spans_f1(pred: set[Span], gold: set[Span]) -> float:
    """F1 between two nontrivial span sets; 0/0 counts as 1."""
    hits = len(pred & gold)
    p = hits / len(pred) if pred else 1.0
    r = hits / len(gold) if gold else 1.0
    if p + r == 0.0:
        return 0.0
    if not pred and not gold:
        return 1.0
    return 2 * p * r / (p + r)


def sentence_f1(pred, gold: GoldTree) -> float:
    if n_leaves(pred) != n_leaves(gold):
        raise CorpusMismatch(
            f"prediction has {n_leaves(pred)} words, gold {n_leaves(gold)}"
        )
    return spans_f1(tree_to_spans(pred), tree_to_spans(gold))


def corpus_f1(preds: list[BinaryTree], golds: list[GoldTree]) -> float:
    """Mean sentence F1 as a percentage (0..100)."""
    if len(preds) != len(golds):
        raise CorpusMismatch(f"{len(preds)} predictions vs {len(golds)} gold trees")
    if not preds:
        raise CorpusMismatch("empty corpus")
    return 100.0 * sum(sentence_f1(p, g) for p, g in zip(preds, golds)) / len(preds)


class NoSuchLabel(DataError):
    """The requested constituent label never occurs in the gold corpus."""

    category = "no-such-label"


def label_recall(preds: list[BinaryTree], golds: list[GoldTree], label: str) -> float:
    """Fraction of nontrivial gold spans with `label` found in predictions."""
    if len(preds) != len(golds):
        raise CorpusMismatch(f"{len(preds)} predictions vs {len(golds)} gold trees")
    total = hits = 0
    seen_label = False
    for pred, gold in zip(preds, golds):
        n = len(gold_leaves(gold))
        pred_spans = tree_to_spans(pred)
        for lab, span in set(labeled_spans(gold)):
            if lab != label:
                continue
            seen_label = True
            if len(span) == 1 or (span.start == 1 and span.end == n):
                continue
            total += 1
            if span in pred_spans:
                hits += 1
    if not seen_label:
        raise NoSuchLabel(f"label {label!r} absent from the gold corpus")
    return hits / total if total else 1.0


def baseline_tree(n: int, strategy: str, seed: int = 0) -> BinaryTree:
    """Left-branching, right-branching, or seeded uniform-random binary tree."""
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    if strategy == "left":
        tree: BinaryTree = Leaf(1)
        for i in range(2, n + 1):
            tree = Node(tree, Leaf(i))
        return tree
    if strategy == "right":
        tree = Leaf(n)
        for i in range(n - 1, 0, -1):
            tree = Node(Leaf(i), tree)
        return tree
    if strategy == "random":
        rng = random.Random(seed)

        def build(lo: int, hi: int) -> BinaryTree:
            if lo == hi:
                return Leaf(lo)
            k = rng.randint(lo, hi - 1)  # uniform split after word k
            return Node(build(lo, k), build(k + 1, hi))

        return build(1, n)
    raise DataError(f"unknown baseline strategy {strategy!r}")


def baseline_corpus(lengths: list[int], strategy: str, seed: int = 0) -> list[BinaryTree]:
    """One baseline tree per sentence; random trees reseed per sentence index
    so reordering the corpus does not cascade."""
    return [
        baseline_tree(n, strategy, seed=seed * 1_000_003 + idx)
        for idx, n in enumerate(lengths)
    ]


@dataclass
class EvalReport:
    corpus_f1: float
    sentence_f1: list[float]
    label_recall: dict[str, float] = field(default_factory=dict)
    length_histogram: dict[int, int] = field(default_factory=dict)
    short_sentences: int = 0  # length <= 2, scored 1.0 by convention

    def to_json(self) -> dict:
        return {
            "corpus_f1": round(self.corpus_f1, 4),
            "sentence_f1": [round(f, 6) for f in self.sentence_f1],
            "label_recall": {k: round(v, 6) for k, v in self.label_recall.items()},
            "length_histogram": {str(k): v for k, v in sorted(self.length_histogram.items())},
            "short_sentences": self.short_sentences,
            "sentences": len(self.sentence_f1),
        }


def evaluate_corpus(
    preds: list[BinaryTree],
    golds: list[GoldTree],
    labels: list[str] | None = None,
) -> EvalReport:
    if len(preds) != len(golds) or not preds:
        raise CorpusMismatch(f"{len(preds)} predictions vs {len(golds)} gold trees")
    per_sent = [sentence_f1(p, g) for p, g in zip(preds, golds)]
    hist: dict[int, int] = {}
    short = 0
    for g in golds:
        n = len(gold_leaves(g))
        hist[n] = hist.get(n, 0) + 1
        if n <= 2:
            short += 1
    recalls = {lab: label_recall(preds, golds, lab) for lab in (labels or [])}
    return EvalReport(
        corpus_f1=100.0 * sum(per_sent) / len(per_sent),
        sentence_f1=per_sent,
        label_recall=recalls,
        length_histogram=hist,
        short_sentences=short,
    )
