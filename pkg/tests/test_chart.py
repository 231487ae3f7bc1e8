import math

import numpy as np
import pytest

from attnparse import atnd
from attnparse.chart import (
    c2d,
    characteristic_score,
    characteristic_score_matrix,
    cky_parse,
    cky_parse_matrix,
    comp_matrix,
    pair_score,
    pair_score_matrix,
    pairwise_matrix,
)
from attnparse.distances import Metric, distance
from attnparse.errors import DataError
from attnparse.topdown import d2t
from attnparse.trees import HeadId, Leaf, Node, Sentence, Span
from conftest import all_binary_trees, argmin_tree_oracle, random_tensor, tree_cost


def tensor_from_rows(rows):
    rows = np.asarray(rows, dtype=np.float64)
    return atnd.AttentionTensor(
        words=Sentence(tuple(f"w{i}" for i in range(rows.shape[0]))),
        attn=rows[None, None, :, :],
    )


HEAD = HeadId(1, 1)


def test_pairwise_matrix_identical_rows():
    t = tensor_from_rows([[0.3, 0.7]] * 3)
    np.testing.assert_allclose(pairwise_matrix(t, HEAD, Metric.JSD), 0.0, atol=1e-12)


def test_pairwise_matrix_onehot_rows():
    t = tensor_from_rows(np.eye(3))
    D = pairwise_matrix(t, HEAD, Metric.JSD)
    v = math.sqrt(math.log(2))
    expected = np.full((3, 3), v)
    np.fill_diagonal(expected, 0.0)
    np.testing.assert_allclose(D, expected, atol=1e-12)


def test_pairwise_matrix_symmetry_zero_diag():
    rng = np.random.default_rng(0)
    t = random_tensor(rng, 7)
    D = pairwise_matrix(t, HEAD, Metric.HEL)
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0)


def test_pair_score_hand_arithmetic():
    D = np.zeros((3, 3))
    D[0, 1] = D[1, 0] = 0.2
    D[0, 2] = D[2, 0] = 0.6
    D[1, 2] = D[2, 1] = 0.4
    assert pair_score(D, Span(1, 3)) == pytest.approx(0.4)
    assert pair_score(D, Span(2, 2)) == 0.0
    assert pair_score(D, Span(1, 2)) == pytest.approx(0.2)


def test_pair_score_matrix_matches_direct():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(2, 10))
        t = random_tensor(rng, n)
        D = pairwise_matrix(t, HEAD, Metric.JSD)
        fast = pair_score_matrix(D)
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                assert fast[i - 1, j - 1] == pytest.approx(
                    pair_score(D, Span(i, j)), abs=1e-9
                )


def test_characteristic_trivial_cases():
    t = tensor_from_rows([[0.5, 0.5], [0.5, 0.5]])
    assert characteristic_score(t, HEAD, Metric.JSD, Span(1, 2)) == pytest.approx(0.0, abs=1e-12)
    assert characteristic_score(t, HEAD, Metric.JSD, Span(1, 1)) == 0.0


def test_characteristic_analytic_two_words():
    t = tensor_from_rows([[1.0, 0.0], [0.0, 1.0]])
    # each row's JSD to the span mean [0.5, 0.5]
    expected = distance(Metric.JSD, [1.0, 0.0], [0.5, 0.5])
    got = characteristic_score(t, HEAD, Metric.JSD, Span(1, 2))
    assert got == pytest.approx(expected, abs=1e-12)
    # sqrt(0.5*KL([1,0]||[0.75,0.25]) + 0.5*KL([0.5,0.5]||[0.75,0.25]))
    # = sqrt(0.2157615...) = 0.4645014
    assert got == pytest.approx(0.4645014, abs=1e-6)


def test_characteristic_matrix_matches_direct():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        t = random_tensor(rng, n)
        for metric in (Metric.JSD, Metric.HEL):
            fast = characteristic_score_matrix(t, HEAD, metric)
            for i in range(1, n + 1):
                for j in range(i, n + 1):
                    assert fast[i - 1, j - 1] == pytest.approx(
                        characteristic_score(t, HEAD, metric, Span(i, j)), abs=1e-9
                    )


def test_scores_ignore_words_outside_span():
    rng = np.random.default_rng(3)
    t = random_tensor(rng, 6)
    span = Span(2, 4)
    base_pair = pair_score(pairwise_matrix(t, HEAD, Metric.JSD), span)
    base_char = characteristic_score(t, HEAD, Metric.JSD, span)
    shuffled = t.attn.copy()
    shuffled[0, 0, [0, 4, 5]] = shuffled[0, 0, [5, 0, 4]]
    t2 = atnd.AttentionTensor(words=t.words, attn=shuffled)
    assert pair_score(pairwise_matrix(t2, HEAD, Metric.JSD), span) == pytest.approx(base_pair)
    assert characteristic_score(t2, HEAD, Metric.JSD, span) == pytest.approx(base_char)


def comp_from_dict(n, scores):
    comp = np.zeros((n, n))
    for (i, j), v in scores.items():
        comp[i - 1, j - 1] = v
    return comp


def test_cky_three_word_example():
    comp = comp_from_dict(3, {(1, 2): 0.1, (2, 3): 0.5, (1, 3): 0.3})
    tree, chart = cky_parse(lambda i, j: comp[i - 1, j - 1], 3)
    assert tree == Node(Node(Leaf(1), Leaf(2)), Leaf(3))
    assert chart.cost(1, 3) == pytest.approx(0.4)


def test_cky_degenerate():
    tree, chart = cky_parse(lambda i, j: 1.0, 1)
    assert tree == Leaf(1)
    assert chart.C.shape == (1, 1) and chart.cost(1, 1) == 0.0
    tree, chart = cky_parse(lambda i, j: 0.25, 2)
    assert tree == Node(Leaf(1), Leaf(2))
    assert chart.cost(1, 2) == pytest.approx(0.25)


def test_cky_matches_exhaustive_minimum():
    rng = np.random.default_rng(4)
    for _ in range(40):
        n = int(rng.integers(2, 9))
        comp = np.triu(rng.random((n, n)), 1)
        tree, chart = cky_parse(lambda i, j: comp[i - 1, j - 1], n)
        best = min(tree_cost(t, comp) for t in all_binary_trees(1, n))
        assert chart.cost(1, n) == pytest.approx(best, abs=1e-9)
        assert tree_cost(tree, comp) == pytest.approx(best, abs=1e-9)
        # exact tree identity incl. smallest-split tie-breaking
        _, oracle_tree = argmin_tree_oracle(comp)
        assert tree == oracle_tree


def test_cky_matrix_path_agrees_with_generic():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(2, 10))
        comp = np.triu(rng.random((n, n)), 1)
        t1, c1 = cky_parse(lambda i, j: comp[i - 1, j - 1], n)
        t2, c2 = cky_parse_matrix(comp)
        assert t1 == t2
        np.testing.assert_allclose(c1.C, c2.C, atol=1e-12)
        np.testing.assert_array_equal(c1.P, c2.P)


def test_cky_score_fn_memoized():
    calls = []

    def score(i, j):
        calls.append((i, j))
        return 1.0

    cky_parse(score, 6)
    assert len(calls) == len(set(calls))


def test_chart_monotone_with_nonnegative_scores():
    rng = np.random.default_rng(6)
    n = 8
    comp = np.triu(rng.random((n, n)), 1)
    _, chart = cky_parse_matrix(comp)
    for i in range(n):
        for j in range(i + 1, n):
            k = chart.P[i, j]
            assert chart.C[i, j] >= chart.C[i, k] - 1e-12
            assert chart.C[i, j] >= chart.C[k + 1, j] - 1e-12


def test_c2d_base_and_hand_trace():
    _, chart = cky_parse(lambda i, j: 0.0, 1)
    assert c2d(chart).size == 0
    comp = comp_from_dict(3, {(1, 2): 0.1, (2, 3): 0.5, (1, 3): 0.3})
    tree, chart = cky_parse_matrix(comp)
    d = c2d(chart)
    np.testing.assert_allclose(d, [0.1, 0.4])
    assert d2t(3, d) == tree


def test_round_trip_positive_scores():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(3, 11))
        comp = np.triu(rng.random((n, n)) + 0.05, 1)
        tree, chart = cky_parse_matrix(comp)
        assert d2t(n, c2d(chart)) == tree


def test_c2d_rejects_malformed_chart():
    comp = comp_from_dict(3, {(1, 2): 0.1, (2, 3): 0.5, (1, 3): 0.3})
    _, chart = cky_parse_matrix(comp)
    chart.P[0, 2] = 5
    with pytest.raises(DataError):
        c2d(chart)


def test_comp_matrix_dispatch():
    rng = np.random.default_rng(8)
    t = random_tensor(rng, 5)
    np.testing.assert_allclose(
        comp_matrix(t, HEAD, Metric.JSD, "pair"),
        pair_score_matrix(pairwise_matrix(t, HEAD, Metric.JSD)),
    )
    np.testing.assert_allclose(
        comp_matrix(t, HEAD, Metric.JSD, "characteristic"),
        characteristic_score_matrix(t, HEAD, Metric.JSD),
    )
