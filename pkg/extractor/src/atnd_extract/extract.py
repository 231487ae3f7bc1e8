"""Pull per-head attention (and optional hidden states) out of a
pretrained transformer and aggregate subword tokens to words.

Aggregation rule (``row-mean-col-sum``, the default): for each word,
average its subword rows (a word looks where its pieces look, on
average) and sum its subword columns (mass received by any piece belongs
to the word); special tokens are dropped outright and each resulting row
is renormalized to sum 1. The alternative ``first-subword`` keeps only
the first subword's row per word (columns are still summed).

Hidden states, when requested, are the per-word average of the word's
subword vectors at each transformer layer (the embedding layer is not
stored).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

logger = logging.getLogger(__name__)

AGGREGATIONS = ("row-mean-col-sum", "first-subword")


@dataclass
class ExtractedSentence:
    """Word-level tensors for one sentence."""

    words: list[str]
    attn: np.ndarray  # [layers][heads][n][n], rows renormalized to sum 1
    hidden: np.ndarray | None  # [layers][n][dim] or None


class Extractor:
    def __init__(self, model_id: str, device: str = "cpu"):
        self.model_id = model_id
        self.device = torch.device(device)
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        if not self.tokenizer.is_fast:
            raise ValueError(
                f"model {model_id!r} has no fast tokenizer; "
                "subword-to-word alignment requires one"
            )
        # eager attention so the model can return attention probabilities
        self.model = AutoModel.from_pretrained(model_id, attn_implementation="eager")
        self.model.to(self.device)
        self.model.eval()

    @property
    def layers(self) -> int:
        return int(self.model.config.num_hidden_layers)

    @property
    def heads(self) -> int:
        return int(self.model.config.num_attention_heads)

    @property
    def hidden_dim(self) -> int:
        return int(self.model.config.hidden_size)

    @property
    def max_tokens(self) -> int:
        limit = int(getattr(self.model.config, "max_position_embeddings", 10**9))
        tok = self.tokenizer.model_max_length
        if tok and tok < 10**9:
            limit = min(limit, int(tok))
        return limit

    def extract(
        self,
        sentences: list[list[str]],
        *,
        with_hidden: bool = False,
        batch_size: int = 16,
        aggregation: str = "row-mean-col-sum",
    ) -> list[ExtractedSentence]:
        """Run the model over word-tokenized sentences.

        Sentences whose subword sequence exceeds the model's maximum
        length are skipped with a log message (the output list is
        correspondingly shorter).
        """
        if aggregation not in AGGREGATIONS:
            raise ValueError(f"unknown aggregation {aggregation!r}")
        kept: list[list[str]] = []
        for idx, words in enumerate(sentences):
            if not words:
                raise ValueError(f"sentence {idx} is empty")
            length = len(
                self.tokenizer(words, is_split_into_words=True)["input_ids"]
            )
            if length > self.max_tokens:
                logger.warning(
                    "skipping sentence %d: %d tokens exceed model limit %d",
                    idx, length, self.max_tokens,
                )
                continue
            kept.append(words)

        out: list[ExtractedSentence] = []
        for lo in range(0, len(kept), batch_size):
            out.extend(
                self._extract_batch(kept[lo : lo + batch_size], with_hidden, aggregation)
            )
        return out

    def _extract_batch(
        self, batch: list[list[str]], with_hidden: bool, aggregation: str
    ) -> list[ExtractedSentence]:
        enc = self.tokenizer(
            batch, is_split_into_words=True, padding=True, return_tensors="pt"
        )
        with torch.inference_mode():
            result = self.model(
                **{k: v.to(self.device) for k, v in enc.items()},
                output_attentions=True,
                output_hidden_states=with_hidden,
            )
        # [layers][batch][heads][T][T] -> numpy float64 for aggregation
        attn = np.stack(
            [a.to("cpu").double().numpy() for a in result.attentions]
        )
        hidden = None
        if with_hidden:
            # drop the embedding layer; keep the L transformer layer outputs
            hidden = np.stack(
                [h.to("cpu").double().numpy() for h in result.hidden_states[1:]]
            )

        out = []
        for b, words in enumerate(batch):
            groups = _word_groups(enc.word_ids(b), len(words))
            seq_len = int(enc["attention_mask"][b].sum())
            sent_attn = attn[:, b, :, :seq_len, :seq_len]
            sent_hidden = hidden[:, b, :seq_len] if with_hidden else None
            out.append(
                _aggregate(words, groups, sent_attn, sent_hidden, aggregation)
            )
        return out


def _word_groups(word_ids: list[int | None], n_words: int) -> list[list[int]]:
    """Token indices per word, in order; special tokens (None) excluded."""
    groups: list[list[int]] = [[] for _ in range(n_words)]
    for pos, wid in enumerate(word_ids):
        if wid is not None:
            groups[wid].append(pos)
    for w, g in enumerate(groups):
        if not g:
            raise ValueError(f"word {w} produced no subword tokens")
    return groups


def _aggregate(
    words: list[str],
    groups: list[list[int]],
    attn: np.ndarray,  # [L][A][T][T], specials still present
    hidden: np.ndarray | None,  # [L][T][dim] or None
    aggregation: str,
) -> ExtractedSentence:
    n = len(words)
    if aggregation == "first-subword":
        rows = attn[:, :, [g[0] for g in groups], :]  # [L][A][n][T]
    else:
        rows = np.stack(
            [attn[:, :, g, :].mean(axis=2) for g in groups], axis=2
        )  # [L][A][n][T]
    merged = np.stack(
        [rows[:, :, :, g].sum(axis=3) for g in groups], axis=3
    )  # [L][A][n][n]
    sums = merged.sum(axis=3, keepdims=True)
    if np.any(sums <= 0):
        raise ValueError("degenerate attention row: no mass on sentence words")
    merged = merged / sums

    word_hidden = None
    if hidden is not None:
        word_hidden = np.stack(
            [hidden[:, g, :].mean(axis=1) for g in groups], axis=1
        )  # [L][n][dim]
    return ExtractedSentence(words=list(words), attn=merged, hidden=word_hidden)
