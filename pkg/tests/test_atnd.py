import json
import struct

import numpy as np
import pytest

from attnparse import atnd
from attnparse.errors import BadMagic, ShapeMismatch, Truncated, UnsupportedVersion
from attnparse.trees import HeadId, Sentence
from conftest import random_corpus, random_stochastic, random_tensor


def make_corpus(rng, n_sentences=4, layers=2, heads=3, hidden_dim=0):
    sents = random_corpus(rng, n_sentences, layers, heads)
    if hidden_dim:
        for t in sents:
            t.hidden = rng.normal(size=(layers, t.n, hidden_dim))
    return atnd.AtndCorpus(
        model="m", language="en", layers=layers, heads=heads,
        hidden_dim=hidden_dim, sentences=sents,
    )


def quantize(corpus):
    """What the float32 file round trip should reproduce exactly."""
    return [np.asarray(t.attn, dtype="<f4") for t in corpus.sentences]


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    corpus = make_corpus(rng, hidden_dim=5)
    path = tmp_path / "c.atnd"
    atnd.write_atnd(corpus, path)
    reread = atnd.read_atnd(path)
    assert reread.model == "m" and reread.language == "en"
    for orig32, t2, t1 in zip(quantize(corpus), reread.sentences, corpus.sentences):
        assert t2.words == t1.words
        assert np.array_equal(np.asarray(t2.attn, dtype="<f4"), orig32)
        assert np.array_equal(
            np.asarray(t2.hidden, dtype="<f4"), np.asarray(t1.hidden, dtype="<f4")
        )
    # writing the reread corpus reproduces the same bytes
    path2 = tmp_path / "c2.atnd"
    atnd.write_atnd(reread, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_degenerate_file_length(tmp_path):
    t = atnd.AttentionTensor(
        words=Sentence(("hi",)), attn=np.ones((1, 1, 1, 1))
    )
    corpus = atnd.AtndCorpus("m", "en", 1, 1, 0, [t])
    path = tmp_path / "one.atnd"
    atnd.write_atnd(corpus, path)
    manifest_len = len(
        json.dumps(
            {"model": "m", "language": "en", "layers": 1, "heads": 1,
             "hidden_dim": 0, "sentence_count": 1},
            ensure_ascii=False, sort_keys=True,
        ).encode()
    )
    expected = 4 + 4 + 4 + 4 + manifest_len + 4 + (4 + 2) + 4
    assert path.stat().st_size == expected


def test_row_sums_preserved(tmp_path):
    rng = np.random.default_rng(1)
    corpus = make_corpus(rng)
    path = tmp_path / "c.atnd"
    atnd.write_atnd(corpus, path)
    for t in atnd.read_atnd(path).sentences:
        np.testing.assert_allclose(t.attn.sum(axis=-1), 1.0, atol=1e-4)


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.atnd"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(BadMagic):
        atnd.read_atnd(path)


def test_unsupported_version(tmp_path):
    path = tmp_path / "v9.atnd"
    path.write_bytes(b"ATND" + struct.pack("<II", 9, 0) + b"\x00" * 8)
    with pytest.raises(UnsupportedVersion):
        atnd.read_atnd(path)


def test_truncated(tmp_path):
    rng = np.random.default_rng(2)
    corpus = make_corpus(rng)
    path = tmp_path / "c.atnd"
    atnd.write_atnd(corpus, path)
    data = path.read_bytes()
    clipped = tmp_path / "clipped.atnd"
    clipped.write_bytes(data[: len(data) - 7])
    with pytest.raises(Truncated):
        atnd.read_atnd(clipped)


def test_trailing_garbage_rejected(tmp_path):
    rng = np.random.default_rng(3)
    corpus = make_corpus(rng)
    path = tmp_path / "c.atnd"
    atnd.write_atnd(corpus, path)
    padded = tmp_path / "padded.atnd"
    padded.write_bytes(path.read_bytes() + b"\x00\x00")
    with pytest.raises(ShapeMismatch):
        atnd.read_atnd(padded)


def test_write_rejects_bad_rows(tmp_path):
    t = atnd.AttentionTensor(
        words=Sentence(("a", "b")), attn=np.full((1, 1, 2, 2), 0.7)
    )
    corpus = atnd.AtndCorpus("m", "en", 1, 1, 0, [t])
    with pytest.raises(ShapeMismatch):
        atnd.write_atnd(corpus, tmp_path / "bad.atnd")


def test_average_head_of_single_head():
    rng = np.random.default_rng(4)
    t = random_tensor(rng, 4, layers=2, heads=1)
    avg = atnd.with_average_head(t)
    assert avg.heads == 2
    np.testing.assert_array_equal(avg.attn[:, 0], avg.attn[:, 1])


def test_average_head_arithmetic():
    attn = np.zeros((1, 2, 2, 2))
    attn[0, 0] = [[1, 0], [1, 0]]
    attn[0, 1] = [[0, 1], [0, 1]]
    t = atnd.AttentionTensor(words=Sentence(("a", "b")), attn=attn)
    avg = atnd.with_average_head(t)
    np.testing.assert_array_equal(avg.attn[0, 2], [[0.5, 0.5], [0.5, 0.5]])


def test_average_head_rows_still_stochastic():
    rng = np.random.default_rng(5)
    t = random_tensor(rng, 6, layers=3, heads=4)
    avg = atnd.with_average_head(t)
    np.testing.assert_allclose(avg.attn.sum(axis=-1), 1.0, atol=1e-12)


def test_json_debug_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    corpus = make_corpus(rng, n_sentences=2)
    path = tmp_path / "c.json"
    atnd.write_atnd(corpus, path)
    reread = atnd.read_atnd(path)
    assert len(reread.sentences) == 2
    for t1, t2 in zip(corpus.sentences, reread.sentences):
        assert t1.words == t2.words
        np.testing.assert_allclose(t1.attn, t2.attn, atol=1e-6)


def test_json_hand_written_fixture(tmp_path):
    doc = {"words": ["a", "b"], "attn": [[[[1.0, 0.0], [0.5, 0.5]]]]}
    path = tmp_path / "hand.json"
    path.write_text(json.dumps(doc))
    corpus = atnd.read_atnd(path)
    assert corpus.layers == 1 and corpus.heads == 1
    assert corpus.sentences[0].words.words == ("a", "b")


def test_head_matrix_out_of_range():
    rng = np.random.default_rng(7)
    t = random_tensor(rng, 3, layers=2, heads=2)
    with pytest.raises(ShapeMismatch):
        t.head_matrix(HeadId(3, 1))
    with pytest.raises(ShapeMismatch):
        t.head_matrix(HeadId(1, 3))
