"""Nearest-prompt retrieval baseline.

Indexes training prompts as TF-IDF vectors, ln(1 + tf) * ln(N / df), and
answers a request with the stored response of the most cosine-similar prompt.
All weights are nonnegative, so similarity lands in [0, 1]; ties go to the
earliest training pair.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus
from .generation import GenerationRequest, finalize_tokens

__all__ = [
    "EmptyIndex",
    "RetrievalIndex",
    "build_retrieval_index",
    "generate_retrieval",
    "RetrievalBackend",
]


class EmptyIndex(Exception):
    pass


@dataclass(frozen=True)
class RetrievalIndex:
    entries: tuple[tuple[dict[str, float], float, tuple[str, ...]], ...]
    # each entry: (prompt weight vector, its norm, paired response)
    df: dict[str, int]
    size: int

    def _idf(self, token: str) -> float:
        d = self.df.get(token, 0)
        return math.log(self.size / d) if d else 0.0


def _weigh(tf: Counter, idf) -> dict[str, float]:
    vec = {}
    for tok, n in tf.items():
        w = math.log(1 + n) * idf(tok)
        if w:
            vec[tok] = w
    return vec


def build_retrieval_index(corpus: Corpus | Sequence) -> RetrievalIndex:
    pairs = list(getattr(corpus, "train", corpus))
    if not pairs:
        raise EmptyIndex("training split is empty")
    n = len(pairs)
    df: Counter[str] = Counter()
    for ex in pairs:
        df.update(set(ex.prompt))
    def idf(tok: str) -> float:
        return math.log(n / df[tok]) if df.get(tok) else 0.0

    entries = []
    for ex in pairs:
        vec = _weigh(Counter(ex.prompt), idf)
        norm = math.sqrt(sum(w * w for w in vec.values()))
        entries.append((vec, norm, ex.response))
    return RetrievalIndex(entries=tuple(entries), df=dict(df), size=n)


def _similarity(query: dict[str, float], qnorm: float, entry) -> float:
    vec, norm, _ = entry
    if not qnorm or not norm:
        return 0.0
    dot = sum(w * vec[tok] for tok, w in query.items() if tok in vec)
    return dot / (qnorm * norm)


def generate_retrieval(index: RetrievalIndex, req: GenerationRequest) -> tuple[str, ...]:
    if not index.entries:
        raise EmptyIndex("index has no entries")
    query = _weigh(Counter(req.prompt), index._idf)
    qnorm = math.sqrt(sum(w * w for w in query.values()))
    best_i = 0
    best = _similarity(query, qnorm, index.entries[0])
    for i in range(1, len(index.entries)):
        sim = _similarity(query, qnorm, index.entries[i])
        if sim > best:
            best, best_i = sim, i
    return finalize_tokens(index.entries[best_i][2], req.max_tokens)


class RetrievalBackend:
    def __init__(self, index: RetrievalIndex):
        self.index = index

    def generate(self, req: GenerationRequest) -> tuple[str, ...]:
        return generate_retrieval(self.index, req)
