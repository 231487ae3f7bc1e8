import random
from pathlib import Path

import numpy as np
import pytest

from attnparse import atnd, trees
from attnparse.trees import Leaf, Node, Span

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def random_stochastic(rng: np.random.Generator, shape):
    """Random row-stochastic array; last axis sums to 1."""
    x = rng.dirichlet(np.ones(shape[-1]), size=shape[:-1])
    return x.reshape(shape)


def random_tensor(rng: np.random.Generator, n, layers=1, heads=1, words=None):
    attn = random_stochastic(rng, (layers, heads, n, n))
    words = words or tuple(f"w{i}" for i in range(1, n + 1))
    return atnd.AttentionTensor(words=trees.Sentence(tuple(words)), attn=attn)


def random_corpus(rng, n_sentences, layers=2, heads=2, n_range=(3, 8)):
    return [
        random_tensor(rng, int(rng.integers(n_range[0], n_range[1] + 1)), layers, heads)
        for _ in range(n_sentences)
    ]


def all_binary_trees(lo: int, hi: int):
    """Every binary tree over 1-based leaves lo..hi (Catalan many)."""
    if lo == hi:
        yield Leaf(lo)
        return
    for k in range(lo, hi):
        for left in all_binary_trees(lo, k):
            for right in all_binary_trees(k + 1, hi):
                yield Node(left, right)


def tree_cost(tree, comp):
    """Sum of comp[i-1][j-1] over internal-node spans (comp 0-based array)."""
    total = 0.0
    for span in trees.tree_to_spans(tree, include_trivial=True):
        total += comp[span.start - 1, span.end - 1]
    return total


def argmin_tree_oracle(comp, lo=1, hi=None):
    """Brute-force minimum-cost tree with smallest-split tie-breaking.

    Pure recursion independent of the chart code path.
    """
    n = comp.shape[0]
    if hi is None:
        hi = n
    if lo == hi:
        return 0.0, Leaf(lo)
    best = None
    for k in range(lo, hi):
        cl, tl = argmin_tree_oracle(comp, lo, k)
        cr, tr = argmin_tree_oracle(comp, k + 1, hi)
        cost = comp[lo - 1, hi - 1] + cl + cr
        if best is None or cost < best[0]:
            best = (cost, Node(tl, tr))
    return best


def random_gold_binary(rng: random.Random, n: int):
    words = [f"w{i}" for i in range(1, n + 1)]

    def build(lo, hi, depth):
        if lo == hi:
            return trees.GoldLeaf(word=words[lo - 1], pos="NN")
        k = rng.randint(lo, hi - 1)
        return trees.GoldNode(
            label="S" if depth == 0 else rng.choice(["NP", "VP", "PP"]),
            children=(build(lo, k, depth + 1), build(k + 1, hi, depth + 1)),
        )

    return build(1, n, 0)


def spans(*pairs):
    return {Span(a, b) for a, b in pairs}
