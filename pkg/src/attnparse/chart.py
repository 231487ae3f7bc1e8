"""Chart-based tree induction.

A span cost accumulates recursively:

    cost(i, j) = comp(i, j) + min_k [cost(i, k) + cost(k+1, j)]   for i < j
    cost(i, i) = 0

where comp(i, j) is one of two compositional scores over attention rows:
the pair score (mean pairwise distance inside the span) or the
characteristic score (mean distance of each row to the span's mean row).
CKY fills the chart bottom-up and the returned tree minimizes total cost;
split ties break toward the smallest split point.

The chart also converts back to a syntactic distance vector (`c2d`), which
is how chart parses enter the ensemble averaging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import xlogy

from .atnd import AttentionTensor
from .distances import Metric, rows_metric
from .errors import DataError, UsageError
from .trees import BinaryTree, HeadId, Leaf, Node, Span


@dataclass
class ScoreChart:
    """Filled CKY chart: span costs C and split points P.

    Arrays are 0-based internally; `cost` and `split` take 1-based word
    positions. P[i][j] = k means span (i, j) splits into (i, k), (k+1, j).
    """

    C: np.ndarray
    P: np.ndarray

    @property
    def n(self) -> int:
        return self.C.shape[0]

    def cost(self, i: int, j: int) -> float:
        return float(self.C[i - 1, j - 1])

    def split(self, i: int, j: int) -> int:
        return int(self.P[i - 1, j - 1]) + 1


def pairwise_matrix(t: AttentionTensor, head: HeadId, metric: Metric) -> np.ndarray:
    """Symmetric n x n matrix of row distances under one head."""
    if not metric.on_distributions:
        raise UsageError(f"{metric.value} is not a distribution metric")
    rows = t.head_matrix(head)
    kern = rows_metric(metric)
    d = kern(rows[:, None, :], rows[None, :, :])
    # enforce exact symmetry and a zero diagonal against float noise
    d = np.triu(d, 1)
    return d + d.T


def pair_score(D: np.ndarray, span: Span) -> float:
    """Mean of D over unordered word pairs inside the span; 0 for width 1."""
    i, j = span.start - 1, span.end - 1
    if i == j:
        return 0.0
    block = D[i : j + 1, i : j + 1]
    length = j - i + 1
    return float(block.sum() / 2.0 / (length * (length - 1) / 2.0))


def characteristic_score(
    t: AttentionTensor, head: HeadId, metric: Metric, span: Span
) -> float:
    """Mean distance of each member row to the span's mean row; 0 for width 1."""
    if not metric.on_distributions:
        raise UsageError(f"{metric.value} is not a distribution metric")
    if span.end > t.n:
        raise DataError(f"span {span} exceeds sentence length {t.n}")
    if span.start == span.end:
        return 0.0
    rows = t.head_matrix(head)[span.start - 1 : span.end]
    c = rows.mean(axis=0)
    return float(rows_metric(metric)(rows, c[None, :]).mean())


def pair_score_matrix(D: np.ndarray) -> np.ndarray:
    """All pair scores at once via 2-D prefix sums; [i-1, j-1] entries, j > i."""
    n = D.shape[0]
    pad = np.zeros((n + 1, n + 1))
    pad[1:, 1:] = D.cumsum(axis=0).cumsum(axis=1)
    diag = np.diag(pad)
    block = diag[1:][None, :] - pad[0:n, 1:] - pad[1:, 0:n].T + diag[:n][:, None]
    length = np.arange(n)[None, :] - np.arange(n)[:, None] + 1
    npairs = length * (length - 1) / 2.0
    comp = np.zeros((n, n))
    upper = npairs > 0
    comp[upper] = block[upper] / 2.0 / npairs[upper]
    return np.triu(comp, 1)


def characteristic_score_matrix(
    t: AttentionTensor, head: HeadId, metric: Metric
) -> np.ndarray:
    """All characteristic scores at once, batched per span length."""
    rows = t.head_matrix(head)
    n = t.n
    comp = np.zeros((n, n))
    csum = np.zeros((n + 1, n))
    np.cumsum(rows, axis=0, out=csum[1:])
    if metric is Metric.JSD:
        # JSD(p, q)^2 = S(p)/2 + S(q)/2 - S((p+q)/2) with S(x) = sum x ln x,
        # so the per-row entropies can be hoisted out of the length loop
        row_s = xlogy(rows, rows).sum(axis=-1)
        for length in range(2, n + 1):
            starts = np.arange(n - length + 1)
            centers = (csum[starts + length] - csum[starts]) / length
            cent_s = xlogy(centers, centers).sum(axis=-1)
            members = np.lib.stride_tricks.sliding_window_view(rows, length, axis=0)
            members = members.transpose(0, 2, 1)  # (starts, length, n)
            mid = 0.5 * (members + centers[:, None, :])
            div = (
                0.5 * np.lib.stride_tricks.sliding_window_view(row_s, length)
                + 0.5 * cent_s[:, None]
                - xlogy(mid, mid).sum(axis=-1)
            )
            comp[starts, starts + length - 1] = np.sqrt(
                np.clip(div, 0.0, None)
            ).mean(axis=1)
        return comp
    kern = rows_metric(metric)
    for length in range(2, n + 1):
        starts = np.arange(n - length + 1)
        centers = (csum[starts + length] - csum[starts]) / length
        members = np.lib.stride_tricks.sliding_window_view(rows, length, axis=0)
        members = members.transpose(0, 2, 1)  # (starts, length, n)
        comp[starts, starts + length - 1] = kern(
            members, centers[:, None, :]
        ).mean(axis=1)
    return comp


def comp_matrix(
    t: AttentionTensor, head: HeadId, metric: Metric, score: str
) -> np.ndarray:
    """Compositional score matrix for 'pair' or 'characteristic'."""
    if score == "pair":
        return pair_score_matrix(pairwise_matrix(t, head, metric))
    if score == "characteristic":
        return characteristic_score_matrix(t, head, metric)
    raise UsageError(f"unknown span score {score!r}")


def cky_parse(
    score_fn: Callable[[int, int], float], n: int
) -> tuple[BinaryTree, ScoreChart]:
    """Minimum-cost binary tree under an arbitrary span score.

    `score_fn(i, j)` (1-based, i < j) is called once per span and memoized.
    """
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    C = np.zeros((n, n))
    P = np.zeros((n, n), dtype=np.int64)
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length - 1
            best_k, best = i, np.inf
            for k in range(i, j):
                tot = C[i, k] + C[k + 1, j]
                if tot < best:
                    best, best_k = tot, k
            C[i, j] = float(score_fn(i + 1, j + 1)) + best
            P[i, j] = best_k
    chart = ScoreChart(C=C, P=P)
    return tree_from_chart(chart), chart


def cky_parse_matrix(comp: np.ndarray) -> tuple[BinaryTree, ScoreChart]:
    """Vectorized CKY over a precomputed compositional score matrix."""
    n = comp.shape[0]
    C = np.zeros((n, n))
    P = np.zeros((n, n), dtype=np.int64)
    for length in range(2, n + 1):
        s = np.arange(n - length + 1)
        k = np.arange(length - 1)
        left = C[s[:, None], s[:, None] + k[None, :]]
        right = C[s[:, None] + k[None, :] + 1, s[:, None] + length - 1]
        tot = left + right
        kbest = tot.argmin(axis=1)  # argmin takes the first min: smallest k
        C[s, s + length - 1] = comp[s, s + length - 1] + tot[s, kbest]
        P[s, s + length - 1] = s + kbest
    chart = ScoreChart(C=C, P=P)
    return tree_from_chart(chart), chart


def tree_from_chart(chart: ScoreChart) -> BinaryTree:
    def build(i: int, j: int) -> BinaryTree:  # 0-based inclusive
        if i == j:
            return Leaf(i + 1)
        k = int(chart.P[i, j])
        if not i <= k < j:
            raise DataError(f"split point {k} out of range for span ({i}, {j})")
        return Node(build(i, k), build(k + 1, j))

    return build(0, chart.n - 1)


def c2d(chart: ScoreChart, s: int = 1, e: int | None = None) -> np.ndarray:
    """Chart to syntactic distance vector (length e-s; empty when s = e).

    Each position's value is the accumulated cost of the smallest chart
    span whose split point falls there, so replaying the distances
    top-down reproduces the chart's tree whenever costs strictly grow.
    """
    if e is None:
        e = chart.n

    def rec(s: int, e: int) -> list[float]:  # 1-based inclusive
        if s == e:
            return []
        v = chart.cost(s, e)
        p = chart.split(s, e)
        if not s <= p < e:
            raise DataError(f"malformed chart: split {p} for span ({s}, {e})")
        return rec(s, p) + [v] + rec(p + 1, e)

    return np.array(rec(s, e), dtype=np.float64)
