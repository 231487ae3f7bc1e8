"""Top-down tree induction from syntactic distances.

A distance vector holds one non-negative value per adjacent word pair;
the tree is built by recursively splitting at the largest distance
(leftmost on ties).
"""

from __future__ import annotations

import numpy as np

from .atnd import AttentionTensor
from .distances import Metric, rows_metric, distance
from .errors import DataError, UsageError
from .trees import BinaryTree, HeadId, Leaf, Node


def check_distance_vector(d, n: int) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (n - 1,):
        raise DataError(f"distance vector length {d.shape} for n={n}, want {n - 1}")
    if d.size and (not np.all(np.isfinite(d)) or np.any(d < 0)):
        raise DataError("distances must be finite and non-negative")
    return d


def compute_distances(t: AttentionTensor, head: HeadId, metric: Metric) -> np.ndarray:
    """Adjacent-row distances of one head's attention matrix (length n-1)."""
    if not metric.on_distributions:
        raise UsageError(f"{metric.value} needs hidden states, not attention rows")
    rows = t.head_matrix(head)
    if t.n == 1:
        return np.zeros(0)
    return rows_metric(metric)(rows[:-1], rows[1:])


def compute_distances_hidden(t: AttentionTensor, layer: int, metric: Metric) -> np.ndarray:
    """Adjacent-word distances over hidden vectors of one layer (COS/L1/L2)."""
    if metric.on_distributions:
        raise UsageError(f"{metric.value} applies to attention rows, not vectors")
    if t.hidden is None:
        raise DataError("tensor carries no hidden states")
    if not 1 <= layer <= t.layers:
        raise DataError(f"layer {layer} out of range 1..{t.layers}")
    vecs = t.hidden[layer - 1]
    return np.array(
        [distance(metric, vecs[i], vecs[i + 1]) for i in range(t.n - 1)]
    )


def d2t(n: int, d) -> BinaryTree:
    """Distance vector to binary tree: split recursively at the leftmost argmax."""
    d = check_distance_vector(d, n)

    def build(lo: int, hi: int) -> BinaryTree:  # 1-based inclusive word range
        if lo == hi:
            return Leaf(lo)
        # distances d[lo-1 .. hi-2] separate the words of this range
        seg = d[lo - 1 : hi - 1]
        i = lo + int(np.argmax(seg))  # split after word i; argmax is leftmost
        return Node(build(lo, i), build(i + 1, hi))

    return build(1, n)
