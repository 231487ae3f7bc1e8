"""Bracketed-tree (PTB-style) reading and writing.

Corpus files hold one tree per line, UTF-8, blank lines ignored. Leaves
are written "(POS word)" and internal nodes "(LABEL child ...)".
Predicted binary trees serialize with the placeholder label X.
"""

from __future__ import annotations

from pathlib import Path

from .errors import TreeError
from .trees import (
    BinaryTree,
    GoldLeaf,
    GoldNode,
    GoldTree,
    Leaf,
    Node,
    gold_leaves,
    tree_size,
)

# POS tags dropped by default when stripping punctuation; SPMRL treebanks
# tag punctuation differently, so the set is configurable per corpus.
DEFAULT_PUNCT_TAGS = frozenset(
    {",", ".", ":", "``", "''", "-LRB-", "-RRB-", "PU", "PUNC"}
)


def parse_bracketed(text: str) -> GoldTree:
    """Parse one bracketed tree; errors carry the failing character offset."""
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def token() -> str:
        nonlocal pos
        start = pos
        while pos < n and not text[pos].isspace() and text[pos] not in "()":
            pos += 1
        if pos == start:
            raise TreeError(f"expected a token at offset {pos}")
        return text[start:pos]

    def node() -> GoldTree:
        nonlocal pos
        skip_ws()
        if pos >= n or text[pos] != "(":
            raise TreeError(f"expected '(' at offset {pos}")
        pos += 1
        skip_ws()
        label = token()
        # items are sub-nodes "(...)" or bare word tokens
        items: list[GoldTree | str] = []
        while True:
            skip_ws()
            if pos >= n:
                raise TreeError(f"unbalanced brackets: ')' missing at offset {pos}")
            if text[pos] == ")":
                pos += 1
                break
            items.append(node() if text[pos] == "(" else token())
        if not items:
            raise TreeError(f"empty node {label!r} ending at offset {pos}")
        if len(items) == 1 and isinstance(items[0], str):
            # the classic "(POS word)" leaf
            return GoldLeaf(word=items[0], pos=label)
        # bare words inside a larger node (prediction format) get a dummy tag
        children = tuple(
            GoldLeaf(word=it, pos="X") if isinstance(it, str) else it for it in items
        )
        return GoldNode(label=label, children=children)

    tree = node()
    skip_ws()
    if pos != n:
        raise TreeError(f"trailing text at offset {pos}")
    return tree


def strip_punctuation(
    tree: GoldTree, punct_tags: frozenset[str] = DEFAULT_PUNCT_TAGS
) -> GoldTree:
    """Drop leaves whose POS tag is punctuation; prune emptied nodes.

    Unary chains are kept as-is. Raises if the whole sentence is removed.
    """

    def strip(t: GoldTree) -> GoldTree | None:
        if isinstance(t, GoldLeaf):
            return None if t.pos in punct_tags else t
        kept = tuple(c for c in (strip(c) for c in t.children) if c is not None)
        if not kept:
            return None
        return GoldNode(label=t.label, children=kept)

    out = strip(tree)
    if out is None:
        raise TreeError("stripping punctuation removed every word")
    return out


def write_tree(tree: BinaryTree, words: list[str]) -> str:
    """Serialize a predicted binary tree over its words with label X."""
    if tree_size(tree) != len(words):
        raise TreeError(f"tree has {tree_size(tree)} leaves for {len(words)} words")

    def fmt(t: BinaryTree) -> str:
        if isinstance(t, Leaf):
            return words[t.index - 1]
        return f"({fmt_node(t)})"

    def fmt_node(t: Node) -> str:
        return "X " + " ".join(
            fmt(c) if isinstance(c, Node) else words[c.index - 1]
            for c in (t.left, t.right)
        )

    if isinstance(tree, Leaf):
        return f"(X {words[0]})"
    return fmt(tree)


def write_gold_tree(tree: GoldTree) -> str:
    if isinstance(tree, GoldLeaf):
        return f"({tree.pos} {tree.word})"
    return f"({tree.label} " + " ".join(write_gold_tree(c) for c in tree.children) + ")"


def read_corpus(path) -> list[GoldTree]:
    """One tree per non-blank line."""
    trees = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            trees.append(parse_bracketed(line))
        except TreeError as e:
            raise TreeError(f"{path}:{lineno}: {e}") from e
    if not trees:
        raise TreeError(f"{path}: no trees")
    return trees


def write_corpus(trees, path) -> None:
    lines = []
    for t in trees:
        if isinstance(t, str):
            lines.append(t)
        else:
            lines.append(write_gold_tree(t))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def corpus_words(trees: list[GoldTree]) -> list[list[str]]:
    return [[leaf.word for leaf in gold_leaves(t)] for t in trees]
