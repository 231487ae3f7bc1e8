import sys
from pathlib import Path

import numpy as np
import pytest
import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

sys.path.insert(0, str(Path(__file__).parent))

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
WORDS = [
    "the", "cat", "sat", "on", "a", "mat", "dog", "ran", "big", "red",
    "bird", "flew", "over", "tree", "man", "saw", "new", "old", "fast", "slow",
]
PIECES = ["un", "##seen", "##ly", "##er", "play", "##ing"]
# words guaranteed to split into several subwords under the vocab above
SPLIT_WORDS = ["unseen", "unseenly", "playing", "player"]


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    """A tiny randomly initialized BERT checkpoint saved to disk."""
    d = tmp_path_factory.mktemp("tiny-bert")
    vocab = {t: i for i, t in enumerate(SPECIALS + WORDS + PIECES)}
    wp = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]"))
    wp.normalizer = normalizers.BertNormalizer(lowercase=True)
    wp.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    wp.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    PreTrainedTokenizerFast(
        tokenizer_object=wp, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]",
    ).save_pretrained(d)
    cfg = BertConfig(
        vocab_size=len(SPECIALS) + len(WORDS) + len(PIECES),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=37,
        max_position_embeddings=24,
    )
    torch.manual_seed(1234)
    BertModel(cfg).save_pretrained(d)
    return str(d)


def make_sentences(rng: np.random.Generator, count: int, max_len: int = 12):
    """Random word-tokenized sentences over the fixture vocabulary."""
    pool = WORDS + SPLIT_WORDS
    out = []
    for _ in range(count):
        n = int(rng.integers(2, max_len + 1))
        out.append([pool[i] for i in rng.integers(0, len(pool), size=n)])
    return out


def write_sentence_file(path, sentences):
    Path(path).write_text(
        "\n".join(" ".join(s) for s in sentences) + "\n", encoding="utf-8"
    )
