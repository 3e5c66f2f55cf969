"""Count-based n-gram generator with stupid backoff.

A desk-scale stand-in for a trained text generation model: exact k-gram
counts for every order up to n, scored with stupid backoff (factor alpha per
backoff step) grounded in add-one-smoothed unigrams, so every in-vocabulary
token always has positive probability.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Corpus, Vocabulary
from .generation import GenerationRequest, finalize_tokens
from .tokens import EOS, TURN

__all__ = [
    "EmptyCorpus",
    "NgramModel",
    "train_ngram",
    "train_ngram_streams",
    "ngram_score",
    "generate_ngram",
    "NgramBackend",
]


class EmptyCorpus(Exception):
    pass


@dataclass(frozen=True)
class NgramModel:
    order: int
    counts: dict[tuple[str, ...], int]  # every k-gram, 1 <= k <= order
    alpha: float
    vocab: Vocabulary
    total: int  # training tokens (unigram mass)


def train_ngram_streams(
    streams: Iterable[Sequence[str]],
    vocab: Vocabulary,
    n: int = 3,
    alpha: float = 0.4,
) -> NgramModel:
    if n < 1:
        raise ValueError("order must be >= 1")
    counts: dict[tuple[str, ...], int] = {}
    total = 0
    empty = True
    for stream in streams:
        empty = False
        toks = tuple(stream)
        total += len(toks)
        for k in range(1, n + 1):
            for i in range(len(toks) - k + 1):
                gram = toks[i: i + k]
                counts[gram] = counts.get(gram, 0) + 1
    if empty:
        raise EmptyCorpus("no training streams")
    return NgramModel(order=n, counts=counts, alpha=alpha, vocab=vocab, total=total)


def train_ngram(corpus: Corpus, n: int = 3, alpha: float = 0.4) -> NgramModel:
    """Train on one stream per training pair: prompt, TURN, response."""
    if not corpus.train:
        raise EmptyCorpus("training split is empty")
    streams = (ex.prompt + (TURN,) + ex.response for ex in corpus.train)
    return train_ngram_streams(streams, corpus.vocab, n, alpha)


def _step_prob(model: NgramModel, history: Sequence[str], token: str) -> float:
    h = tuple(history[-(model.order - 1):]) if model.order > 1 else ()
    mult = 1.0
    while h:
        den = model.counts.get(h, 0)
        if den:
            num = model.counts.get(h + (token,), 0)
            if num:
                return mult * num / den
        mult *= model.alpha
        h = h[1:]
    v = len(model.vocab.tokens)
    return mult * (model.counts.get((token,), 0) + 1) / (model.total + v)


def ngram_score(
    model: NgramModel,
    tokens: Sequence[str],
    context: Sequence[str] = (),
) -> float:
    """Total natural-log probability of tokens, each conditioned on the
    preceding context plus already-scored tokens."""
    history = list(context)
    score = 0.0
    for tok in tokens:
        score += math.log(_step_prob(model, history, tok))
        history.append(tok)
    return score


def _sample_token(
    model: NgramModel,
    history: Sequence[str],
    temperature: float,
    rng: random.Random,
) -> str:
    ordered = sorted(model.vocab.tokens, key=model.vocab.tokens.__getitem__)
    weights = [_step_prob(model, history, tok) for tok in ordered]
    if temperature == 0:
        best_i = 0
        for i in range(1, len(weights)):
            if weights[i] > weights[best_i]:
                best_i = i
        return ordered[best_i]
    powered = [w ** (1.0 / temperature) for w in weights]
    total = sum(powered)
    probs = [p / total for p in powered]
    drift = abs(sum(probs) - 1.0)
    if drift >= 1e-9:
        raise AssertionError(f"normalized sampling weights drifted by {drift}")
    r = rng.random()
    acc = 0.0
    for tok, p in zip(ordered, probs):
        acc += p
        if r < acc:
            return tok
    return ordered[-1]


def generate_ngram(model: NgramModel, req: GenerationRequest) -> tuple[str, ...]:
    """Sample up to max_tokens continuation tokens after prompt + TURN,
    stopping early if EOS is drawn."""
    history = list(req.prompt) + [TURN]
    rng = random.Random(req.seed)
    out: list[str] = []
    while len(out) < req.max_tokens:
        tok = _sample_token(model, history, req.temperature, rng)
        out.append(tok)
        history.append(tok)
        if tok == EOS:
            break
    return finalize_tokens(out, req.max_tokens)


class NgramBackend:
    def __init__(self, model: NgramModel):
        self.model = model

    def generate(self, req: GenerationRequest) -> tuple[str, ...]:
        return generate_ngram(self.model, req)
