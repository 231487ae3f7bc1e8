"""Constituency trees from transformer attention heads.

Induces binary parse trees from the attention distributions of frozen
language models (top-down and chart-based), ensembles the best heads,
and evaluates against gold treebanks with unlabeled span F1.
"""

from .atnd import AtndCorpus, AttentionTensor, read_atnd, with_average_head, write_atnd
from .chart import ScoreChart, c2d, cky_parse, cky_parse_matrix
from .distances import Metric, distance
from .ensemble import HeadRanking, Method, ensemble_parse, rank_heads
from .evaluation import baseline_tree, corpus_f1, label_recall, sentence_f1
from .topdown import compute_distances, d2t
from .treebank import parse_bracketed, strip_punctuation, write_tree
from .trees import (
    BinaryTree,
    GoldLeaf,
    GoldNode,
    HeadId,
    Leaf,
    Node,
    Sentence,
    Span,
    tree_to_spans,
)

__version__ = "0.1.0"

__all__ = [
    "AtndCorpus",
    "AttentionTensor",
    "BinaryTree",
    "GoldLeaf",
    "GoldNode",
    "HeadId",
    "HeadRanking",
    "Leaf",
    "Method",
    "Metric",
    "Node",
    "ScoreChart",
    "Sentence",
    "Span",
    "baseline_tree",
    "c2d",
    "cky_parse",
    "cky_parse_matrix",
    "compute_distances",
    "corpus_f1",
    "d2t",
    "distance",
    "ensemble_parse",
    "label_recall",
    "parse_bracketed",
    "rank_heads",
    "read_atnd",
    "sentence_f1",
    "strip_punctuation",
    "tree_to_spans",
    "with_average_head",
    "write_atnd",
    "write_tree",
]
