"""ATND attention-tensor files: bit-exact binary format plus a JSON twin.

Layout (all integers and floats little-endian; see FORMAT.md):

    magic   "ATND" (4 bytes)
    version u32 = 1
    flags   u32, bit 0: hidden states present
    mlen    u32, manifest byte length
    manifest UTF-8 JSON: {"model", "language", "layers", "heads",
                          "hidden_dim", "sentence_count"}
    per sentence:
        n       u32
        words   n x (u32 byte length + UTF-8 bytes)
        attn    [layers][heads][n][n] float32, row-major
        hidden  [layers][n][hidden_dim] float32 (only if flag bit 0)

Files with extension .json are read/written as an equivalent JSON debug
document so test fixtures can be written by hand.

Storage is float32; everything is promoted to float64 on load.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .distances import renormalize_rows
from .errors import BadMagic, ShapeMismatch, Truncated, UnsupportedVersion
from .trees import HeadId, Sentence

log = logging.getLogger(__name__)

MAGIC = b"ATND"
VERSION = 1
FLAG_HIDDEN = 1

ROW_SUM_TOL = 1e-4  # float32 storage tolerance


@dataclass
class AttentionTensor:
    """Word-level attention for one sentence: [layers][heads][n][n].

    Row r of head (j, k) is word r's attention distribution over the
    sentence. `hidden`, when present, is [layers][n][dim].
    """

    words: Sentence
    attn: np.ndarray
    hidden: np.ndarray | None = None

    @property
    def layers(self) -> int:
        return self.attn.shape[0]

    @property
    def heads(self) -> int:
        return self.attn.shape[1]

    @property
    def n(self) -> int:
        return len(self.words)

    def validate(self, tol: float = ROW_SUM_TOL) -> None:
        n = self.n
        if self.attn.ndim != 4 or self.attn.shape[2:] != (n, n):
            raise ShapeMismatch(
                f"attention shape {self.attn.shape} does not match n={n}"
            )
        sums = self.attn.sum(axis=-1)
        if not np.all(np.abs(sums - 1.0) <= tol):
            worst = float(np.abs(sums - 1.0).max())
            raise ShapeMismatch(f"attention rows deviate from stochastic by {worst:.3g}")
        if self.hidden is not None:
            if self.hidden.ndim != 3 or self.hidden.shape[:2] != (self.layers, n):
                raise ShapeMismatch(f"hidden shape {self.hidden.shape} invalid")

    def row(self, head: HeadId, word: int) -> np.ndarray:
        """Attention distribution of 1-based `word` under 1-based `head`."""
        return self.head_matrix(head)[word - 1]

    def head_matrix(self, head: HeadId) -> np.ndarray:
        if not (1 <= head.layer <= self.layers and 1 <= head.head <= self.heads):
            raise ShapeMismatch(
                f"head {head} out of range for tensor with "
                f"{self.layers} layers x {self.heads} heads"
            )
        return self.attn[head.layer - 1, head.head - 1]


@dataclass
class AtndCorpus:
    """Sentences with attention tensors plus file-level metadata."""

    model: str
    language: str
    layers: int
    heads: int
    hidden_dim: int
    sentences: list[AttentionTensor] = field(default_factory=list)

    def validate(self) -> None:
        for i, t in enumerate(self.sentences):
            if t.attn.shape[:2] != (self.layers, self.heads):
                raise ShapeMismatch(
                    f"sentence {i}: tensor {t.attn.shape[:2]} does not match "
                    f"manifest ({self.layers}, {self.heads})"
                )
            if (t.hidden is not None) and t.hidden.shape[2] != self.hidden_dim:
                raise ShapeMismatch(f"sentence {i}: hidden dim mismatch")
            t.validate()

    @property
    def has_hidden(self) -> bool:
        return any(t.hidden is not None for t in self.sentences)


def with_average_head(t: AttentionTensor) -> AttentionTensor:
    """Append the layer-average head: head A+1 = mean of heads 1..A.

    The mean is accumulated in index order so repeated calls are
    bit-reproducible.
    """
    a = t.heads
    avg = np.add.reduce(t.attn, axis=1, keepdims=True) / a
    return replace(t, attn=np.concatenate([t.attn, avg], axis=1))


def all_heads(layers: int, heads_with_avg: int) -> list[HeadId]:
    """Every HeadId of an (already averaged) tensor, (layer, head) ascending."""
    return [
        HeadId(j, k)
        for j in range(1, layers + 1)
        for k in range(1, heads_with_avg + 1)
    ]


# --- binary writer -------------------------------------------------------


def _manifest(corpus: AtndCorpus) -> bytes:
    doc = {
        "model": corpus.model,
        "language": corpus.language,
        "layers": corpus.layers,
        "heads": corpus.heads,
        "hidden_dim": corpus.hidden_dim,
        "sentence_count": len(corpus.sentences),
    }
    return json.dumps(doc, ensure_ascii=False, sort_keys=True).encode("utf-8")


def write_atnd(corpus: AtndCorpus, path) -> None:
    """Write the corpus to `path`; .json extension selects the debug format."""
    path = Path(path)
    if path.suffix == ".json":
        write_json(corpus, path)
        return
    corpus.validate()
    hidden = corpus.has_hidden
    if hidden and not all(t.hidden is not None for t in corpus.sentences):
        raise ShapeMismatch("hidden states present for only part of the corpus")
    manifest = _manifest(corpus)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, FLAG_HIDDEN if hidden else 0))
        f.write(struct.pack("<I", len(manifest)))
        f.write(manifest)
        for t in corpus.sentences:
            f.write(struct.pack("<I", t.n))
            for w in t.words.words:
                wb = w.encode("utf-8")
                f.write(struct.pack("<I", len(wb)))
                f.write(wb)
            f.write(np.ascontiguousarray(t.attn, dtype="<f4").tobytes())
            if hidden:
                f.write(np.ascontiguousarray(t.hidden, dtype="<f4").tobytes())


# --- binary reader -------------------------------------------------------


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise Truncated(
                f"needed {k} bytes at offset {self.pos}, "
                f"file has {len(self.data)}"
            )
        out = self.data[self.pos : self.pos + k]
        self.pos += k
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def floats(self, shape: tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape))
        raw = self.take(4 * count)
        return np.frombuffer(raw, dtype="<f4").reshape(shape).astype(np.float64)

    @property
    def exhausted(self) -> bool:
        return self.pos == len(self.data)


def read_atnd(path) -> AtndCorpus:
    """Read an ATND (or .json debug) file; rows are renormalized to float64."""
    path = Path(path)
    if path.suffix == ".json":
        return read_json(path)
    r = _Reader(path.read_bytes())
    if r.take(4) != MAGIC:
        raise BadMagic(f"{path}: not an ATND file")
    version, flags = r.u32(), r.u32()
    if version != VERSION:
        raise UnsupportedVersion(f"{path}: version {version}, expected {VERSION}")
    hidden_present = bool(flags & FLAG_HIDDEN)
    try:
        manifest = json.loads(r.take(r.u32()).decode("utf-8"))
        layers = int(manifest["layers"])
        heads = int(manifest["heads"])
        hidden_dim = int(manifest["hidden_dim"])
        count = int(manifest["sentence_count"])
    except (ValueError, KeyError, UnicodeDecodeError) as e:
        raise ShapeMismatch(f"{path}: bad manifest: {e}") from e
    corpus = AtndCorpus(
        model=manifest.get("model", ""),
        language=manifest.get("language", ""),
        layers=layers,
        heads=heads,
        hidden_dim=hidden_dim,
    )
    for _ in range(count):
        n = r.u32()
        if n == 0:
            raise ShapeMismatch(f"{path}: zero-length sentence")
        words = Sentence(tuple(r.take(r.u32()).decode("utf-8") for _ in range(n)))
        attn = r.floats((layers, heads, n, n))
        hidden = r.floats((layers, n, hidden_dim)) if hidden_present else None
        corpus.sentences.append(_finish_tensor(words, attn, hidden, str(path)))
    if not r.exhausted:
        raise ShapeMismatch(
            f"{path}: {len(r.data) - r.pos} trailing bytes after "
            f"{count} declared sentences"
        )
    return corpus


def _finish_tensor(words, attn, hidden, origin: str) -> AttentionTensor:
    # Rows within the float32 storage tolerance are kept verbatim so the
    # write/read round trip stays bit-exact; only out-of-tolerance rows are
    # renormalized (with a warning) instead of being rejected.
    sums = attn.sum(axis=-1, keepdims=True)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOL
    if np.any(bad):
        log.warning("%s: %d attention rows beyond %g of stochastic; renormalized",
                    origin, int(bad.sum()), ROW_SUM_TOL)
        fixed, _ = renormalize_rows(attn, tol=ROW_SUM_TOL)
        attn = np.where(bad, fixed, attn)
    return AttentionTensor(words=words, attn=attn, hidden=hidden)


# --- JSON debug format ---------------------------------------------------


def write_json(corpus: AtndCorpus, path) -> None:
    corpus.validate()
    doc = {
        "model": corpus.model,
        "language": corpus.language,
        "layers": corpus.layers,
        "heads": corpus.heads,
        "hidden_dim": corpus.hidden_dim,
        "sentences": [
            {
                "words": list(t.words.words),
                "attn": np.asarray(t.attn, dtype=np.float32).tolist(),
                **(
                    {"hidden": np.asarray(t.hidden, dtype=np.float32).tolist()}
                    if t.hidden is not None
                    else {}
                ),
            }
            for t in corpus.sentences
        ],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def read_json(path) -> AtndCorpus:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ShapeMismatch(f"{path}: invalid JSON: {e}") from e
    if isinstance(doc, list):  # bare list of sentence objects
        doc = {"sentences": doc}
    elif "words" in doc:  # single sentence object
        doc = {"sentences": [doc]}
    sentences = []
    for i, s in enumerate(doc.get("sentences", [])):
        try:
            words = Sentence(tuple(s["words"]))
            attn = np.asarray(s["attn"], dtype=np.float64)
        except (KeyError, ValueError) as e:
            raise ShapeMismatch(f"{path}: sentence {i}: {e}") from e
        n = len(words)
        if attn.ndim != 4 or attn.shape[2:] != (n, n):
            raise ShapeMismatch(
                f"{path}: sentence {i}: attn shape {attn.shape} vs n={n}"
            )
        hidden = np.asarray(s["hidden"], dtype=np.float64) if "hidden" in s else None
        sentences.append(_finish_tensor(words, attn, hidden, f"{path}[{i}]"))
    if not sentences:
        raise ShapeMismatch(f"{path}: no sentences")
    layers, heads = sentences[0].attn.shape[:2]
    corpus = AtndCorpus(
        model=doc.get("model", ""),
        language=doc.get("language", ""),
        layers=int(doc.get("layers", layers)),
        heads=int(doc.get("heads", heads)),
        hidden_dim=int(
            doc.get(
                "hidden_dim",
                sentences[0].hidden.shape[2] if sentences[0].hidden is not None else 0,
            )
        ),
        sentences=sentences,
    )
    corpus.validate()
    return corpus
