"""Turn debate paths into tokenized, vocabulary-constrained train/valid/test sets.

Pipeline: partition trees into splits, enumerate paths per tree, render each
path into a (prompt, response) token pair, optionally collapse entities,
build the vocabulary from the training split, encode everything against it,
and drop exact duplicates within each split.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

from .grammar import (
    DebatePath,
    ParsingStrategy,
    PathLimits,
    enumerate_debate_paths,
    path_stances,
    turn_blocks,
)
from .text import TokenizerConfig, tag_entities, tokenize
from .tokens import EOA, EOS, SPECIALS, TURN, UNK
from .tree import DebateTree

__all__ = [
    "TokenizerConfig",
    "tokenize",
    "tag_entities",
    "Vocabulary",
    "ExamplePair",
    "Corpus",
    "CorpusStats",
    "EmptyTraining",
    "build_vocabulary",
    "encode_tokens",
    "render_example",
    "partition_trees",
    "build_corpus",
    "corpus_statistics",
    "write_corpus",
    "load_corpus",
]


class EmptyTraining(Exception):
    pass


@dataclass(frozen=True)
class ExamplePair:
    prompt: tuple[str, ...]
    response: tuple[str, ...]  # always ends with EOS
    strategy: str
    tree_id: str
    node_ids: tuple[str, ...]
    split_index: int


@dataclass
class Vocabulary:
    """Token inventory: specials first, then tokens meeting min_count.

    counts is the full training census (pre-filter); tokens maps only the
    survivors plus specials to dense ids starting at 0.
    """

    tokens: dict[str, int]
    counts: dict[str, int]
    min_count: int

    @property
    def specials(self) -> tuple[str, ...]:
        return SPECIALS

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    def id_order(self) -> list[str]:
        return sorted(self.tokens, key=self.tokens.__getitem__)


def build_vocabulary(train_examples: list[ExamplePair], min_count: int = 10) -> Vocabulary:
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    if not train_examples:
        raise EmptyTraining("cannot build a vocabulary from an empty training split")
    census: Counter[str] = Counter()
    for ex in train_examples:
        census.update(ex.prompt)
        census.update(ex.response)
    tokens: dict[str, int] = {tok: i for i, tok in enumerate(SPECIALS)}
    kept = [
        tok
        for tok, n in census.items()
        if n >= min_count and tok not in tokens
    ]
    kept.sort(key=lambda tok: (-census[tok], tok))
    for tok in kept:
        tokens[tok] = len(tokens)
    return Vocabulary(tokens=tokens, counts=dict(census), min_count=min_count)


def encode_tokens(tokens, vocab: Vocabulary) -> tuple[str, ...]:
    return tuple(tok if tok in vocab.tokens else UNK for tok in tokens)


def render_example(
    path: DebatePath,
    tree: DebateTree,
    strategy: ParsingStrategy,
    cfg: TokenizerConfig = TokenizerConfig(),
) -> ExamplePair:
    """Render one path: arguments within a speaker block join on the
    end-of-argument token, prompt blocks join on the turn token, and the
    response ends with the end-of-sequence token."""
    texts = [tokenize(tree.nodes[nid].text, cfg) for nid in path.node_ids]
    stances = path_stances(tree, path.node_ids)
    split = path.split_index

    prompt: list[str] = []
    for bi, (lo, hi) in enumerate(turn_blocks(stances[:split])):
        if bi:
            prompt.append(TURN)
        for k in range(lo, hi):
            if k > lo:
                prompt.append(EOA)
            prompt.extend(texts[k])

    response: list[str] = []
    for k in range(split, len(texts)):
        if k > split:
            response.append(EOA)
        response.extend(texts[k])
    response.append(EOS)

    return ExamplePair(
        prompt=tuple(prompt),
        response=tuple(response),
        strategy=strategy.name.value,
        tree_id=path.tree_id,
        node_ids=path.node_ids,
        split_index=split,
    )


def partition_trees(
    trees: list[DebateTree],
    ratios: tuple[float, float, float] = (0.90, 0.05, 0.05),
    seed: int = 0,
) -> tuple[set[str], set[str], set[str]]:
    """Assign whole trees to train/valid/test, sized by largest-remainder
    rounding, shuffled deterministically by seed."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must sum to 1")
    if not trees:
        raise ValueError("need at least one tree")
    ids = sorted({t.tree_id for t in trees})
    if len(ids) != len(trees):
        raise ValueError("tree ids must be unique")
    rng = random.Random(seed)
    rng.shuffle(ids)

    n = len(ids)
    exact = [r * n for r in ratios]
    sizes = [int(x) for x in exact]
    leftover = n - sum(sizes)
    by_remainder = sorted(range(3), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in by_remainder[:leftover]:
        sizes[i] += 1

    train = set(ids[: sizes[0]])
    valid = set(ids[sizes[0]: sizes[0] + sizes[1]])
    test = set(ids[sizes[0] + sizes[1]:])
    return train, valid, test


@dataclass
class CorpusStats:
    train_examples: int
    valid_examples: int
    test_examples: int
    prompt_dictionary: int  # distinct train prompt tokens, pre min-count
    response_dictionary: int

    def to_dict(self) -> dict:
        return {
            "train_examples": self.train_examples,
            "valid_examples": self.valid_examples,
            "test_examples": self.test_examples,
            "prompt_dictionary": self.prompt_dictionary,
            "response_dictionary": self.response_dictionary,
        }


@dataclass
class Corpus:
    train: list[ExamplePair]
    valid: list[ExamplePair]
    test: list[ExamplePair]
    vocab: Vocabulary
    stats: CorpusStats


def _dedup(pairs: list[ExamplePair]) -> list[ExamplePair]:
    seen: set[tuple] = set()
    out = []
    for p in pairs:
        key = (p.prompt, p.response)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def build_corpus(
    trees: list[DebateTree],
    strategy: ParsingStrategy,
    cfg: TokenizerConfig = TokenizerConfig(),
    min_count: int = 10,
    seed: int = 0,
    ratios: tuple[float, float, float] = (0.90, 0.05, 0.05),
    ner: bool = False,
    limits: PathLimits = PathLimits(),
) -> Corpus:
    """Build the full corpus.  Trees must already be valid, reference-resolved,
    and language-filtered."""
    train_ids, valid_ids, test_ids = partition_trees(trees, ratios, seed)

    # Entity tagging needs original casing, so defer lowercasing past it.
    render_cfg = replace(cfg, lowercase=False) if (ner and cfg.lowercase) else cfg

    raw: dict[str, list[ExamplePair]] = {"train": [], "valid": [], "test": []}
    for tree in sorted(trees, key=lambda t: t.tree_id):
        if tree.tree_id in train_ids:
            bucket = raw["train"]
        elif tree.tree_id in valid_ids:
            bucket = raw["valid"]
        else:
            bucket = raw["test"]
        for path in enumerate_debate_paths(tree, strategy, limits):
            pair = render_example(path, tree, strategy, render_cfg)
            if ner:
                pair = replace(
                    pair,
                    prompt=tuple(tag_entities(list(pair.prompt))),
                    response=tuple(tag_entities(list(pair.response))),
                )
                if cfg.lowercase:
                    pair = replace(
                        pair,
                        prompt=tuple(t.lower() for t in pair.prompt),
                        response=tuple(t.lower() for t in pair.response),
                    )
            bucket.append(pair)

    if not raw["train"]:
        raise EmptyTraining("no training pairs were produced")

    prompt_dict = {tok for ex in raw["train"] for tok in ex.prompt}
    response_dict = {tok for ex in raw["train"] for tok in ex.response}

    vocab = build_vocabulary(raw["train"], min_count)
    encoded = {
        split: _dedup(
            [
                replace(
                    ex,
                    prompt=encode_tokens(ex.prompt, vocab),
                    response=encode_tokens(ex.response, vocab),
                )
                for ex in pairs
            ]
        )
        for split, pairs in raw.items()
    }

    stats = CorpusStats(
        train_examples=len(encoded["train"]),
        valid_examples=len(encoded["valid"]),
        test_examples=len(encoded["test"]),
        prompt_dictionary=len(prompt_dict),
        response_dictionary=len(response_dict),
    )
    return Corpus(
        train=encoded["train"],
        valid=encoded["valid"],
        test=encoded["test"],
        vocab=vocab,
        stats=stats,
    )


def corpus_statistics(corpus: Corpus) -> CorpusStats:
    """Recount the splits; dictionary sizes were fixed at build time
    (pre-encoding streams are not retained)."""
    return CorpusStats(
        train_examples=len(corpus.train),
        valid_examples=len(corpus.valid),
        test_examples=len(corpus.test),
        prompt_dictionary=corpus.stats.prompt_dictionary,
        response_dictionary=corpus.stats.response_dictionary,
    )


# --- on-disk formats ----------------------------------------------------------

SPLIT_NAMES = ("train", "valid", "test")


def _pair_to_json(pair: ExamplePair) -> str:
    return json.dumps(
        {
            "prompt": list(pair.prompt),
            "response": list(pair.response),
            "strategy": pair.strategy,
            "tree_id": pair.tree_id,
            "node_ids": list(pair.node_ids),
            "split_index": pair.split_index,
        },
        ensure_ascii=False,
    )


def _pair_from_json(line: str) -> ExamplePair:
    obj = json.loads(line)
    return ExamplePair(
        prompt=tuple(obj["prompt"]),
        response=tuple(obj["response"]),
        strategy=obj["strategy"],
        tree_id=obj["tree_id"],
        node_ids=tuple(obj["node_ids"]),
        split_index=obj["split_index"],
    )


def write_corpus(corpus: Corpus, out_dir: str | Path) -> None:
    """Write train/valid/test JSONL, vocab.txt, stats.json, and the
    parallel-text source/target files.  Byte-identical for equal corpora."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for split in SPLIT_NAMES:
        pairs: list[ExamplePair] = getattr(corpus, split)
        with open(out / f"{split}.jsonl", "w", encoding="utf-8") as fh:
            for pair in pairs:
                fh.write(_pair_to_json(pair) + "\n")
        with open(out / f"{split}.source", "w", encoding="utf-8") as src, open(
            out / f"{split}.target", "w", encoding="utf-8"
        ) as tgt:
            for pair in pairs:
                src.write(" ".join(pair.prompt) + "\n")
                tgt.write(" ".join(pair.response) + "\n")
    with open(out / "vocab.txt", "w", encoding="utf-8") as fh:
        for tok in corpus.vocab.id_order():
            fh.write(tok + "\n")
    with open(out / "stats.json", "w", encoding="utf-8") as fh:
        json.dump(corpus.stats.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_corpus(corpus_dir: str | Path) -> Corpus:
    """Read a corpus directory back.  Training token counts are not
    persisted, so the loaded vocabulary carries an empty census."""
    d = Path(corpus_dir)
    splits: dict[str, list[ExamplePair]] = {}
    for split in SPLIT_NAMES:
        path = d / f"{split}.jsonl"
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                splits[split] = [_pair_from_json(line) for line in fh if line.strip()]
        else:
            splits[split] = []
    vocab_tokens: dict[str, int] = {}
    with open(d / "vocab.txt", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            vocab_tokens[line.rstrip("\n")] = i
    with open(d / "stats.json", encoding="utf-8") as fh:
        s = json.load(fh)
    stats = CorpusStats(
        train_examples=s["train_examples"],
        valid_examples=s["valid_examples"],
        test_examples=s["test_examples"],
        prompt_dictionary=s["prompt_dictionary"],
        response_dictionary=s["response_dictionary"],
    )
    vocab = Vocabulary(tokens=vocab_tokens, counts={}, min_count=0)
    return Corpus(
        train=splits["train"],
        valid=splits["valid"],
        test=splits["test"],
        vocab=vocab,
        stats=stats,
    )
