"""Tokenization and the built-in entity-placeholder heuristic."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources

from .tokens import ENT

SENTENCE_END = {".", "!", "?"}


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    punctuation_is_token: bool = True


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str, cfg: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Whitespace tokenization; punctuation characters split off as
    single-character tokens when cfg.punctuation_is_token."""
    if cfg.lowercase:
        text = text.lower()
    tokens: list[str] = []
    for chunk in text.split():
        if not cfg.punctuation_is_token:
            tokens.append(chunk)
            continue
        buf: list[str] = []
        for ch in chunk:
            if _is_punctuation(ch):
                if buf:
                    tokens.append("".join(buf))
                    buf = []
                tokens.append(ch)
            else:
                buf.append(ch)
        if buf:
            tokens.append("".join(buf))
    return tokens


def load_default_wordlist() -> frozenset[str]:
    """The shipped 50 common English function words."""
    data = resources.files("debate_forge.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in data.split() if w)


def _is_capitalized(token: str) -> bool:
    return bool(token) and token[0].isalpha() and token[0].isupper()


def tag_entities(
    tokens: list[str], common_words: frozenset[str] | None = None
) -> list[str]:
    """Collapse each maximal run of capitalized tokens to one entity token.

    Runs before lowercasing (casing is the signal).  A lone capitalized
    token at a sentence start is kept as-is when it is a common function
    word ("The dog barked"); any other run, including sentence-initial
    names, becomes the placeholder.  Swap in an external tagger upstream
    for anything smarter.
    """
    if common_words is None:
        common_words = load_default_wordlist()
    out: list[str] = []
    i = 0
    sentence_start = True
    while i < len(tokens):
        tok = tokens[i]
        if _is_capitalized(tok):
            j = i
            while j < len(tokens) and _is_capitalized(tokens[j]):
                j += 1
            run_len = j - i
            if run_len == 1 and sentence_start and tok.lower() in common_words:
                out.append(tok)
            else:
                out.append(ENT)
            sentence_start = False
            i = j
        else:
            out.append(tok)
            sentence_start = tok in SENTENCE_END
            i += 1
    return out
