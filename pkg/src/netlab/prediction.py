"""Keyword interpretation and prediction over attributed graphs.

Communities are interpreted by the most frequent keywords of their annotated
members; those keywords are then predicted for un-annotated members and
confirmed when the keyword occurs as a whole phrase in the member's title or
abstract.  Matching is case-insensitive and token-boundary aware: text is
lowercased, split into word tokens (internal punctuation such as hyphens is
kept), and a keyword is confirmed only when its token sequence appears
contiguously, so "string" does not match inside "superstring".
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import InputError
from .graph import Graph

_TOKEN_RE = re.compile(r"[0-9a-z]+(?:[-'’./+][0-9a-z]+)*")


def tokenize(text: str) -> tuple[str, ...]:
    return tuple(_TOKEN_RE.findall(text.lower()))


@dataclass
class NodeDoc:
    title: str = ""
    abstract: str = ""
    keywords: list[str] = field(default_factory=list)

    @property
    def annotated(self) -> bool:
        return bool(self.keywords)


@dataclass
class AttributedGraph:
    graph: Graph
    docs: list[NodeDoc]

    def __post_init__(self):
        if len(self.docs) != self.graph.n:
            raise InputError("need exactly one document record per node")

    @classmethod
    def from_jsonl(cls, g: Graph, path: str | Path) -> "AttributedGraph":
        docs = [NodeDoc() for _ in range(g.n)]
        with Path(path).open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                i = int(rec["id"])
                if not 0 <= i < g.n:
                    raise InputError(f"metadata id {i} out of range")
                docs[i] = NodeDoc(
                    title=rec.get("title", "") or "",
                    abstract=rec.get("abstract", "") or "",
                    keywords=[str(k) for k in rec.get("keywords", []) or []],
                )
        return cls(graph=g, docs=docs)


@dataclass
class PredictionResult:
    k: int
    per_node_confirmed: dict[int, list[str]]
    histogram: dict[int, int]
    total_covered: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "per_node_confirmed": {str(i): kws for i, kws in sorted(self.per_node_confirmed.items())},
            "histogram": {str(r): c for r, c in sorted(self.histogram.items())},
            "total_covered": self.total_covered,
        }


def _canonical_keyword(kw: str) -> str:
    return " ".join(tokenize(kw))


def top_k_keywords(ag: AttributedGraph, community: Iterable[int], k: int) -> list[str]:
    """The k most frequent (canonicalized) keywords of annotated members.

    Frequency ties break lexicographically.  Empty when the community has no
    annotated member.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    counts: Counter[str] = Counter()
    for v in community:
        doc = ag.docs[int(v)]
        if not doc.annotated:
            continue
        for kw in set(_canonical_keyword(x) for x in doc.keywords):
            if kw:
                counts[kw] += 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [kw for kw, _ in ranked[:k]]


def confirm_keyword(doc: NodeDoc, keyword: str) -> bool:
    """Whole-phrase containment of the keyword in the title or abstract."""
    phrase = tokenize(keyword)
    if not phrase:
        return False
    return _contains(tokenize(doc.title), phrase) or _contains(tokenize(doc.abstract), phrase)


def _contains(tokens: tuple[str, ...], phrase: tuple[str, ...]) -> bool:
    k = len(phrase)
    if k == 0 or k > len(tokens):
        return False
    first = phrase[0]
    for i in range(len(tokens) - k + 1):
        if tokens[i] == first and tokens[i:i + k] == phrase:
            return True
    return False


def predict(
    ag: AttributedGraph,
    communities: Iterable[Iterable[int]],
    k: int,
) -> PredictionResult:
    """Predict the top-k community keywords for un-annotated members.

    A keyword counts as confirmed when it occurs in the member's title or
    abstract.  Nodes in several communities take the union of confirmations.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    confirmed: dict[int, set[str]] = {}
    token_cache: dict[int, tuple[tuple[str, ...], tuple[str, ...]]] = {}
    for comm in communities:
        comm = [int(v) for v in comm]
        top = [tokenize(kw) for kw in top_k_keywords(ag, comm, k)]
        if not top:
            continue
        for v in comm:
            doc = ag.docs[v]
            if doc.annotated:
                continue
            if v not in token_cache:
                token_cache[v] = (tokenize(doc.title), tokenize(doc.abstract))
            title_t, abs_t = token_cache[v]
            for phrase in top:
                if _contains(title_t, phrase) or _contains(abs_t, phrase):
                    confirmed.setdefault(v, set()).add(" ".join(phrase))
    per_node = {v: sorted(kws) for v, kws in confirmed.items()}
    histogram: dict[int, int] = {}
    for kws in per_node.values():
        histogram[len(kws)] = histogram.get(len(kws), 0) + 1
    return PredictionResult(
        k=k,
        per_node_confirmed=per_node,
        histogram=histogram,
        total_covered=len(per_node),
    )


def prediction_curve(
    ag: AttributedGraph,
    communities: Iterable[Iterable[int]],
    k_max: int,
) -> list[tuple[int, int]]:
    """(k, total_covered) for k = 1..k_max; non-decreasing in k.

    Single pass: for each un-annotated node, record the best (smallest) rank
    at which any community keyword is confirmed, then accumulate counts.
    """
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    best_rank: dict[int, int] = {}
    token_cache: dict[int, tuple[tuple[str, ...], tuple[str, ...]]] = {}
    for comm in communities:
        comm = [int(v) for v in comm]
        ranked = [tokenize(kw) for kw in top_k_keywords(ag, comm, k_max)]
        if not ranked:
            continue
        for v in comm:
            doc = ag.docs[v]
            if doc.annotated:
                continue
            cur = best_rank.get(v, k_max + 1)
            if v not in token_cache:
                token_cache[v] = (tokenize(doc.title), tokenize(doc.abstract))
            title_t, abs_t = token_cache[v]
            for rank, phrase in enumerate(ranked[:cur - 1], start=1):
                if _contains(title_t, phrase) or _contains(abs_t, phrase):
                    cur = rank
                    break
            if cur <= k_max:
                best_rank[v] = cur
    counts = np.bincount(np.array(list(best_rank.values()), dtype=np.int64), minlength=k_max + 1) \
        if best_rank else np.zeros(k_max + 1, dtype=np.int64)
    running = np.cumsum(counts)
    return [(k, int(running[k])) for k in range(1, k_max + 1)]


def label_dimension(obj) -> int:
    """Largest per-node label count: distinct keywords for attributed graphs,
    always 1 for colored graphs."""
    from .generators import ColoredGraph

    if isinstance(obj, ColoredGraph):
        return 1 if obj.color.size else 0
    if isinstance(obj, AttributedGraph):
        if not obj.docs:
            return 0
        return max(len(set(_canonical_keyword(k) for k in doc.keywords if _canonical_keyword(k)))
                   for doc in obj.docs)
    raise InputError("expected an AttributedGraph or ColoredGraph")
