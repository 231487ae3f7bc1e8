#!/usr/bin/env python3
"""Generate the bundled synthetic fixtures.

planted.atnd / planted.trees: 20 sentences whose head (1,1) attention
rows encode the gold constituency (block-structured similarity that
decays with tree distance). The generator verifies that TD, CP and CC all
recover every gold tree from that head before writing anything, so the
fixture is usable as an end-to-end oracle.

rb.trees: 20 right-branching gold trees for baseline-ordering checks.
"""

import random
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from attnparse import atnd, chart, ensemble, treebank, trees
from attnparse.distances import Metric
from attnparse.ensemble import Method

VOCAB = (
    "time fruit flies like an arrow the dog cat ran fast over lazy river "
    "green ideas sleep furiously old men remember small towns quietly"
).split()

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def random_binary_gold(rng: random.Random, n: int) -> trees.GoldTree:
    words = [rng.choice(VOCAB) for _ in range(n)]

    def build(lo, hi, depth):
        if lo == hi:
            return trees.GoldLeaf(word=words[lo - 1], pos="NN")
        k = rng.randint(lo, hi - 1)
        label = "S" if depth == 0 else rng.choice(["NP", "VP"])
        return trees.GoldNode(
            label=label, children=(build(lo, k, depth + 1), build(k + 1, hi, depth + 1))
        )

    return build(1, n, 0)


def lca_depths(gold: trees.GoldTree, n: int) -> np.ndarray:
    """depth[i][j] = depth of the lowest tree node covering both leaves."""
    depth = np.zeros((n, n), dtype=np.int64)

    def walk(t, start, d):
        if isinstance(t, trees.GoldLeaf):
            depth[start - 1, start - 1] = d + 1
            return 1
        sizes, pos = [], start
        for c in t.children:
            k = walk(c, pos, d + 1)
            sizes.append((pos, pos + k - 1))
            pos += k
        lo, hi = start - 1, pos - 2
        for a0, a1 in sizes:
            for b0, b1 in sizes:
                if (a0, a1) < (b0, b1):
                    depth[a0 - 1 : a1, b0 - 1 : b1] = d
                    depth[b0 - 1 : b1, a0 - 1 : a1] = d
        return pos - start

    walk(gold, 1, 0)
    return depth


def planted_rows(gold: trees.GoldTree, n: int, beta: float = 2.0) -> np.ndarray:
    depth = lca_depths(gold, n)
    raw = np.exp(beta * depth.astype(np.float64))
    return raw / raw.sum(axis=1, keepdims=True)


def noise_rows(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n), size=n)


def recovers(t: atnd.AttentionTensor, gold: trees.GoldTree) -> bool:
    gold_spans = trees.tree_to_spans(gold)
    head = trees.HeadId(1, 1)
    for method in (Method.TD, Method.CP, Method.CC):
        for metric in (Metric.JSD, Metric.HEL):
            tree, _ = ensemble.parse_with_head(t, head, metric, method)
            if trees.tree_to_spans(tree) != gold_spans:
                return False
    return True


def make_planted(n_sentences=20, layers=2, heads=2, seed=7):
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    golds, tensors = [], []
    while len(golds) < n_sentences:
        n = rng.randint(5, 10)
        gold = random_binary_gold(rng, n)
        attn = np.empty((layers, heads, n, n))
        attn[0, 0] = planted_rows(gold, n)
        for j in range(layers):
            for k in range(heads):
                if (j, k) != (0, 0):
                    attn[j, k] = noise_rows(nrng, n)
        words = trees.Sentence(tuple(w.word for w in trees.gold_leaves(gold)))
        t = atnd.AttentionTensor(words=words, attn=attn)
        if not recovers(atnd.with_average_head(t), gold):
            continue  # resample; rng state advances so we will not loop
        golds.append(gold)
        tensors.append(t)
    corpus = atnd.AtndCorpus(
        model="synthetic-planted",
        language="xx",
        layers=layers,
        heads=heads,
        hidden_dim=0,
        sentences=tensors,
    )
    return corpus, golds


def make_right_branching(n_sentences=20, seed=11):
    rng = random.Random(seed)
    golds = []
    for _ in range(n_sentences):
        n = rng.randint(8, 12)
        words = [rng.choice(VOCAB) for _ in range(n)]

        def build(i, depth):
            if i == n:
                return trees.GoldLeaf(word=words[i - 1], pos="NN")
            label = "S" if depth == 0 else ("NP" if depth % 2 else "VP")
            return trees.GoldNode(
                label=label,
                children=(trees.GoldLeaf(word=words[i - 1], pos="NN"), build(i + 1, depth + 1)),
            )

        golds.append(build(1, 0))
    return golds


def main():
    OUT.mkdir(exist_ok=True)
    corpus, golds = make_planted()
    atnd.write_atnd(corpus, OUT / "planted.atnd")
    treebank.write_corpus(golds, OUT / "planted.trees")
    # re-read to confirm float32 storage did not disturb recovery
    reread = atnd.read_atnd(OUT / "planted.atnd")
    for t, gold in zip(reread.sentences, golds):
        assert recovers(atnd.with_average_head(t), gold), "float32 round trip broke recovery"
    treebank.write_corpus(make_right_branching(), OUT / "rb.trees")
    print(f"wrote {len(golds)} planted sentences and 20 right-branching trees to {OUT}")


if __name__ == "__main__":
    main()
