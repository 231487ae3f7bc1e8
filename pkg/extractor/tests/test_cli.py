import numpy as np

from atnd_extract.cli import main
from conftest import make_sentences, write_sentence_file


def test_cli_end_to_end(checkpoint, tmp_path, capsys):
    from attnparse import atnd

    rng = np.random.default_rng(3)
    sents = make_sentences(rng, 6)
    inp = tmp_path / "sents.txt"
    write_sentence_file(inp, sents)
    out = tmp_path / "c.atnd"
    assert main([
        "--input", str(inp), "--model", checkpoint, "--out", str(out),
        "--language", "xx", "--batch", "3",
    ]) == 0
    assert "wrote 6 of 6 sentences" in capsys.readouterr().out
    corpus = atnd.read_atnd(out)
    assert corpus.language == "xx"
    assert [list(t.words.words) for t in corpus.sentences] == sents


def test_cli_hidden_flag(checkpoint, tmp_path):
    from attnparse import atnd

    inp = tmp_path / "sents.txt"
    write_sentence_file(inp, [["the", "cat"], ["dog"]])
    out = tmp_path / "c.atnd"
    assert main([
        "--input", str(inp), "--model", checkpoint, "--out", str(out), "--hidden",
    ]) == 0
    corpus = atnd.read_atnd(out)
    assert corpus.hidden_dim == 32
    assert corpus.sentences[0].hidden.shape == (2, 2, 32)


def test_cli_missing_input(checkpoint, tmp_path, capsys):
    assert main([
        "--input", str(tmp_path / "nope.txt"), "--model", checkpoint,
        "--out", str(tmp_path / "c.atnd"),
    ]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_cli_empty_input(checkpoint, tmp_path, capsys):
    inp = tmp_path / "empty.txt"
    inp.write_text("\n\n")
    assert main([
        "--input", str(inp), "--model", checkpoint,
        "--out", str(tmp_path / "c.atnd"),
    ]) == 1
    assert "no sentences" in capsys.readouterr().err


def test_cli_unknown_model(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    inp = tmp_path / "sents.txt"
    write_sentence_file(inp, [["a", "b"]])
    assert main([
        "--input", str(inp), "--model", str(tmp_path / "no-such-model"),
        "--out", str(tmp_path / "c.atnd"),
    ]) == 1
    assert "error:" in capsys.readouterr().err
