"""Core domain types: sentences, spans, binary trees, gold trees.

Word positions are 1-based everywhere, so a span (i, j) covers words
w_i..w_j inclusive, matching the usual bracketing notation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import TreeError


@dataclass(frozen=True)
class Sentence:
    """An ordered sequence of word strings, length >= 1."""

    words: tuple[str, ...]

    def __post_init__(self):
        if len(self.words) == 0:
            raise TreeError("a sentence must contain at least one word")
        if any(w == "" for w in self.words):
            raise TreeError("empty word string in sentence")

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True, order=True)
class Span:
    """1-based inclusive word span (start <= end)."""

    start: int
    end: int

    def __post_init__(self):
        if not 1 <= self.start <= self.end:
            raise TreeError(f"invalid span ({self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def as_tuple(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Leaf:
    """Terminal of a predicted binary tree: a 1-based word index."""

    index: int


@dataclass(frozen=True)
class Node:
    """Internal node of a predicted binary tree; always exactly two children."""

    left: BinaryTree
    right: BinaryTree


BinaryTree = Union[Leaf, Node]


@dataclass(frozen=True)
class GoldLeaf:
    """Terminal of a gold tree: the word and its part-of-speech tag."""

    word: str
    pos: str


@dataclass(frozen=True)
class GoldNode:
    """Labeled internal node of a gold n-ary tree (>= 1 child)."""

    label: str
    children: tuple[GoldTree, ...] = field(default=())

    def __post_init__(self):
        if len(self.children) == 0:
            raise TreeError(f"gold node {self.label!r} has no children")


GoldTree = Union[GoldLeaf, GoldNode]


@dataclass(frozen=True, order=True)
class HeadId:
    """Identifies one attention head: 1-based (layer, head).

    Head index A+1 addresses the synthetic layer-average head of a tensor
    that carries A real heads per layer.
    """

    layer: int
    head: int

    def __post_init__(self):
        if self.layer < 1 or self.head < 1:
            raise TreeError(f"head indices are 1-based, got {self}")


def tree_leaves(tree: BinaryTree) -> list[int]:
    """Word indices of the leaves, left to right."""
    out: list[int] = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            out.append(t.index)
        else:
            stack.append(t.right)
            stack.append(t.left)
    return out


def tree_size(tree: BinaryTree) -> int:
    """Number of leaves."""
    return len(tree_leaves(tree))


def check_binary_tree(tree: BinaryTree) -> int:
    """Validate that leaves read 1..n in order; returns n."""
    leaves = tree_leaves(tree)
    if leaves != list(range(1, len(leaves) + 1)):
        raise TreeError(f"leaves are not 1..n in order: {leaves}")
    return len(leaves)


def n_leaves(tree) -> int:
    """Leaf count of a binary or gold tree."""
    if isinstance(tree, (Leaf, Node)):
        return tree_size(tree)
    return len(gold_leaves(tree))


def gold_leaves(tree: GoldTree) -> list[GoldLeaf]:
    """Terminals of a gold tree, left to right."""
    if isinstance(tree, GoldLeaf):
        return [tree]
    out: list[GoldLeaf] = []
    for c in tree.children:
        out.extend(gold_leaves(c))
    return out


def gold_words(tree: GoldTree) -> list[str]:
    return [leaf.word for leaf in gold_leaves(tree)]


def _binary_spans(tree: BinaryTree, start: int, acc: set[Span]) -> int:
    """Collect internal-node spans; returns number of leaves under `tree`."""
    if isinstance(tree, Leaf):
        return 1
    nl = _binary_spans(tree.left, start, acc)
    nr = _binary_spans(tree.right, start + nl, acc)
    acc.add(Span(start, start + nl + nr - 1))
    return nl + nr


def _gold_spans(tree: GoldTree, start: int, acc: set[Span]) -> int:
    if isinstance(tree, GoldLeaf):
        return 1
    n = 0
    for c in tree.children:
        n += _gold_spans(c, start + n, acc)
    acc.add(Span(start, start + n - 1))
    return n


def tree_to_spans(tree, include_trivial: bool = False) -> set[Span]:
    """Spans covered by internal nodes of a binary or gold tree.

    With include_trivial=False, the whole-sentence span and all length-1
    spans are removed (the convention of unlabeled span F1). Duplicates
    from unary gold chains collapse under set semantics.
    """
    acc: set[Span] = set()
    if isinstance(tree, (Leaf, Node)):
        n = _binary_spans(tree, 1, acc)
    else:
        n = _gold_spans(tree, 1, acc)
    if not include_trivial:
        acc = {s for s in acc if len(s) > 1 and not (s.start == 1 and s.end == n)}
    return acc


def labeled_spans(tree: GoldTree, start: int = 1) -> Iterator[tuple[str, Span]]:
    """(label, span) for every internal node of a gold tree, duplicates kept."""
    if isinstance(tree, GoldLeaf):
        return
    n = 0
    pos = start
    for c in tree.children:
        k = len(gold_leaves(c))
        yield from labeled_spans(c, pos)
        pos += k
        n += k
    yield (tree.label, Span(start, start + n - 1))
