"""Cross-language comparison of selected attention heads.

Given per-language head rankings, reports which languages pick each head
into their top K, pairwise Jaccard similarity between the languages' head
sets, and the heads every language agrees on.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .ensemble import HeadRanking
from .errors import DataError, UsageError
from .trees import HeadId


@dataclass
class OverlapReport:
    languages: list[str]
    k: int
    membership: dict[HeadId, list[str]]  # head -> languages selecting it
    jaccard: dict[tuple[str, str], float]
    universal: list[HeadId] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "languages": self.languages,
            "k": self.k,
            "membership": [
                {"layer": h.layer, "head": h.head, "languages": langs}
                for h, langs in sorted(self.membership.items())
            ],
            "jaccard": [
                {"a": a, "b": b, "jaccard": round(v, 6)}
                for (a, b), v in sorted(self.jaccard.items())
            ],
            "universal": [
                {"layer": h.layer, "head": h.head} for h in sorted(self.universal)
            ],
        }

    def save(self, json_path, csv_path=None) -> None:
        Path(json_path).write_text(
            json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8"
        )
        if csv_path is not None:
            with open(csv_path, "w", newline="", encoding="utf-8") as f:
                w = csv.writer(f)
                w.writerow(["layer", "head", "n_languages", "languages"])
                for h, langs in sorted(self.membership.items()):
                    w.writerow([h.layer, h.head, len(langs), ";".join(langs)])


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def head_overlap(rankings: list[HeadRanking], k: int) -> OverlapReport:
    """Top-K head overlap across languages; rankings must share model shape."""
    if len(rankings) < 2:
        raise UsageError("need at least two rankings to compare")
    shapes = {
        (max(e.head.layer for e in r.entries), max(e.head.head for e in r.entries))
        for r in rankings
    }
    if len(shapes) > 1:
        raise DataError(f"rankings cover incompatible head grids: {sorted(shapes)}")
    languages = []
    sets: dict[str, set[HeadId]] = {}
    for i, r in enumerate(rankings):
        lang = str(r.metadata.get("language") or r.metadata.get("corpus") or f"lang{i}")
        if lang in sets:
            lang = f"{lang}#{i}"
        languages.append(lang)
        sets[lang] = {e.head for e in r.top(k)}
    membership: dict[HeadId, list[str]] = {}
    for lang in languages:
        for h in sets[lang]:
            membership.setdefault(h, []).append(lang)
    pair_jaccard = {
        (a, b): jaccard(sets[a], sets[b])
        for ai, a in enumerate(languages)
        for b in languages[ai + 1 :]
    }
    universal = sorted(h for h, langs in membership.items() if len(langs) == len(languages))
    return OverlapReport(
        languages=languages,
        k=k,
        membership={h: sorted(v) for h, v in membership.items()},
        jaccard=pair_jaccard,
        universal=universal,
    )
