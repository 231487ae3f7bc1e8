"""Head ranking and top-K ensemble parsing.

Every (layer, head) combination is scored on a validation corpus with the
same parsing method used at test time, sorted by F1 (ties broken toward
the lower (layer, head)). At test time the K best heads each yield a
syntactic distance vector; chart methods convert their chart through
`c2d`. The K vectors are averaged elementwise and replayed through the
top-down builder.

A ranking is a portable JSON artifact, so one produced on language X's
validation set can parse language Y directly (zero-shot transfer).
"""

from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .atnd import AttentionTensor, all_heads
from .chart import c2d, cky_parse_matrix, comp_matrix
from .distances import Metric
from .errors import CorpusMismatch, DataError, UsageError
from .evaluation import spans_f1
from .topdown import compute_distances, d2t
from .trees import BinaryTree, GoldTree, HeadId, Leaf, gold_leaves, tree_to_spans


class Method(enum.Enum):
    TD = "td"  # top-down, distances from adjacent attention rows
    CP = "cp"  # chart with the pair score
    CC = "cc"  # chart with the characteristic score

    @property
    def span_score(self) -> str:
        if self is Method.CP:
            return "pair"
        if self is Method.CC:
            return "characteristic"
        raise UsageError("the top-down method has no span score")


@dataclass(frozen=True)
class RankedHead:
    head: HeadId
    f1: float


@dataclass
class HeadRanking:
    method: Method
    metric: Metric
    entries: list[RankedHead]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.head in seen:
                raise DataError(f"duplicate head {e.head} in ranking")
            seen.add(e.head)
            if not 0.0 <= e.f1 <= 1.0:
                raise DataError(f"F1 {e.f1} outside [0, 1]")
        fs = [e.f1 for e in self.entries]
        if fs != sorted(fs, reverse=True):
            raise DataError("ranking entries are not sorted by F1 descending")

    def top(self, k: int) -> list[RankedHead]:
        if not 1 <= k <= len(self.entries):
            raise UsageError(f"K={k} outside 1..{len(self.entries)}")
        return self.entries[:k]

    def to_json(self) -> dict:
        return {
            "method": self.method.value,
            "metric": self.metric.value,
            "entries": [
                {"layer": e.head.layer, "head": e.head.head, "f1": e.f1}
                for e in self.entries
            ],
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HeadRanking":
        try:
            return cls(
                method=Method(doc["method"]),
                metric=Metric(doc["metric"]),
                entries=[
                    RankedHead(HeadId(int(e["layer"]), int(e["head"])), float(e["f1"]))
                    for e in doc["entries"]
                ],
                metadata=dict(doc.get("metadata", {})),
            )
        except (KeyError, ValueError) as e:
            raise DataError(f"bad head ranking document: {e}") from e

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "HeadRanking":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise DataError(f"{path}: invalid JSON: {e}") from e
        return cls.from_json(doc)


def parse_with_head(
    t: AttentionTensor, head: HeadId, metric: Metric, method: Method
) -> tuple[BinaryTree, np.ndarray]:
    """One head's tree and the distance vector it implies."""
    if t.n == 1:
        return Leaf(1), np.zeros(0)
    if method is Method.TD:
        d = compute_distances(t, head, metric)
        return d2t(t.n, d), d
    comp = comp_matrix(t, head, metric, method.span_score)
    tree, chart = cky_parse_matrix(comp)
    return tree, c2d(chart)


def check_aligned(corpus_sents: list[AttentionTensor], golds: list[GoldTree]) -> None:
    if len(corpus_sents) != len(golds):
        raise CorpusMismatch(
            f"{len(corpus_sents)} attention sentences vs {len(golds)} gold trees"
        )
    for i, (t, g) in enumerate(zip(corpus_sents, golds)):
        ng = len(gold_leaves(g))
        if t.n != ng:
            raise CorpusMismatch(f"sentence {i}: {t.n} words vs {ng} gold leaves")


def rank_heads(
    sentences: list[AttentionTensor],
    golds: list[GoldTree],
    method: Method,
    metric: Metric,
    metadata: dict | None = None,
    threads: int = 1,
) -> HeadRanking:
    """Score every head of the (averaged) tensors by validation F1."""
    if not sentences:
        raise CorpusMismatch("empty validation corpus")
    check_aligned(sentences, golds)
    layers, heads = sentences[0].layers, sentences[0].heads
    gold_spans = [tree_to_spans(g) for g in golds]
    candidates = all_heads(layers, heads)

    def score(head: HeadId) -> float:
        total = 0.0
        for t, gs in zip(sentences, gold_spans):
            tree, _ = parse_with_head(t, head, metric, method)
            total += spans_f1(tree_to_spans(tree), gs)
        return total / len(sentences)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            f1s = list(ex.map(score, candidates))
    else:
        f1s = [score(h) for h in candidates]
    order = sorted(
        zip(candidates, f1s), key=lambda hf: (-hf[1], hf[0].layer, hf[0].head)
    )
    return HeadRanking(
        method=method,
        metric=metric,
        entries=[RankedHead(h, f) for h, f in order],
        metadata=metadata or {},
    )


def ensemble_distances(
    t: AttentionTensor, ranking: HeadRanking, k: int, normalize: bool = False
) -> np.ndarray:
    """Average of the top-K heads' distance vectors for one sentence.

    Summation runs in sorted HeadId order so the result is independent of
    the ranking's internal order among the chosen K.
    """
    chosen = sorted((e.head for e in ranking.top(k)))
    acc = np.zeros(t.n - 1)
    for head in chosen:
        _, d = parse_with_head(t, head, ranking.metric, ranking.method)
        if normalize and d.size:
            span = d.max() - d.min()
            d = (d - d.min()) / span if span > 0 else np.zeros_like(d)
        acc += d
    return acc / len(chosen)


def ensemble_parse(
    t: AttentionTensor, ranking: HeadRanking, k: int, normalize: bool = False
) -> BinaryTree:
    """Final tree: top-down replay of the averaged distance vector."""
    if t.n == 1:
        return Leaf(1)
    ranking.top(k)  # validate K before any head evaluation
    return d2t(t.n, ensemble_distances(t, ranking, k, normalize=normalize))
