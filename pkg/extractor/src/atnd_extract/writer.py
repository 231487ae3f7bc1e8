"""Standalone ATND writer.

Produces the binary attention container consumed by `attnparse` (layout
documented in the top-level FORMAT.md): magic ``ATND``, version 1, a
flags word (bit 0: hidden states present), a UTF-8 JSON manifest, then
one record per sentence. All integers are unsigned 32-bit little-endian;
all floats are IEEE 754 float32 little-endian.

This module deliberately shares no code with the consumer package: the
file format is the only contract between the two.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"ATND"
VERSION = 1
FLAG_HIDDEN = 1


def _u32(value: int) -> bytes:
    return struct.pack("<I", value)


def write_atnd(
    path: str | Path,
    *,
    model: str,
    language: str,
    sentences: Sequence[tuple[list[str], np.ndarray, np.ndarray | None]],
    layers: int,
    heads: int,
    hidden_dim: int = 0,
) -> None:
    """Write sentences as ATND.

    Each sentence is ``(words, attn, hidden)`` with ``attn`` shaped
    ``[layers][heads][n][n]`` and ``hidden`` either ``None`` (when
    ``hidden_dim`` is 0) or ``[layers][n][hidden_dim]``.
    """
    manifest = json.dumps(
        {
            "model": model,
            "language": language,
            "layers": layers,
            "heads": heads,
            "hidden_dim": hidden_dim,
            "sentence_count": len(sentences),
        },
        ensure_ascii=False,
    ).encode("utf-8")
    flags = FLAG_HIDDEN if hidden_dim else 0

    path = Path(path)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(_u32(VERSION))
        f.write(_u32(flags))
        f.write(_u32(len(manifest)))
        f.write(manifest)
        for words, attn, hidden in sentences:
            n = len(words)
            attn = np.asarray(attn)
            if attn.shape != (layers, heads, n, n):
                raise ValueError(
                    f"attention shape {attn.shape} != {(layers, heads, n, n)}"
                )
            f.write(_u32(n))
            for word in words:
                raw = word.encode("utf-8")
                f.write(_u32(len(raw)))
                f.write(raw)
            f.write(np.ascontiguousarray(attn, dtype="<f4").tobytes())
            if hidden_dim:
                hidden = np.asarray(hidden)
                if hidden.shape != (layers, n, hidden_dim):
                    raise ValueError(
                        f"hidden shape {hidden.shape} != {(layers, n, hidden_dim)}"
                    )
                f.write(np.ascontiguousarray(hidden, dtype="<f4").tobytes())
