"""Command-line entry points.

Pipeline commands mirror the data flow: ingest raw debate exports into
canonical JSON, extract paths, build a corpus, train and evaluate baselines,
run or serve debates, and package/aggregate human ratings.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import TokenizerConfig, build_corpus, load_corpus, tokenize, write_corpus
from .evaluation import (
    PerplexityReport,
    PerplexityRow,
    aggregate_ratings,
    make_rating_packets,
    perplexity,
    read_key_csv,
    read_ratings_csv,
    write_key_csv,
    write_packets,
)
from .generation import EchoBackend, GenerationRequest
from .grammar import Anchor, PathLimits, enumerate_debate_paths, get_strategy
from .ngram import NgramBackend, train_ngram
from .orchestrator import (
    advance_turn,
    display_text,
    load_transcript,
    new_debate,
    run_debate,
    save_transcript,
    DebateConfig,
)
from .retrieval import RetrievalBackend, build_retrieval_index
from .tokens import ENT, EOS
from .tree import (
    DEFAULT_ENGLISH_THRESHOLD,
    TreeError,
    TreeFormat,
    default_stopwords,
    english_score,
    load_tree,
    resolve_references,
    save_tree,
)


def _sniff_format(data: bytes) -> TreeFormat:
    head = data.lstrip(b"\xef\xbb\xbf \t\r\n")
    if head.startswith(b"Discussion Title:"):
        return TreeFormat.KIALO_EXPORT
    return TreeFormat.CANONICAL_JSON


def _read_tree(path: Path, fmt: str = "auto"):
    data = path.read_bytes()
    if fmt == "kialo":
        tree_fmt = TreeFormat.KIALO_EXPORT
    elif fmt == "json":
        tree_fmt = TreeFormat.CANONICAL_JSON
    else:
        tree_fmt = _sniff_format(data)
    return load_tree(data, tree_fmt)


def _load_trees(paths, fmt: str = "auto"):
    return [resolve_references(_read_tree(Path(p), fmt)) for p in paths]


def cmd_ingest(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stopwords = default_stopwords()
    kept = failed = skipped = 0
    for p in args.paths:
        path = Path(p)
        try:
            tree = resolve_references(_read_tree(path, args.format))
        except TreeError as exc:
            print(f"{path}: error: {exc}", file=sys.stderr)
            failed += 1
            continue
        if not args.keep_all:
            score = english_score(tree, stopwords)
            if score < args.english_threshold:
                print(f"{path}: skipped (english score {score:.3f} < {args.english_threshold})")
                skipped += 1
                continue
        target = out / f"{tree.tree_id}.json"
        target.write_bytes(save_tree(tree, TreeFormat.CANONICAL_JSON))
        print(f"{path}: kept -> {target} ({len(tree.nodes)} nodes)")
        kept += 1
    print(f"ingested {kept} tree(s), skipped {skipped}, failed {failed}")
    return 1 if failed else 0


def cmd_extract(args) -> int:
    strategy = get_strategy(args.strategy)
    limits = PathLimits(max_len=args.max_len, anchor=Anchor(args.anchor))
    rows = []
    total = 0
    for tree in _load_trees(args.paths):
        paths = enumerate_debate_paths(tree, strategy, limits)
        total += len(paths)
        print(f"{tree.tree_id}: {len(paths)} path(s) [{strategy.name.value}]")
        for dp in paths:
            rows.append(
                {
                    "tree_id": dp.tree_id,
                    "node_ids": list(dp.node_ids),
                    "split_index": dp.split_index,
                    "turn_starts": list(dp.turn_starts),
                    "strategy": strategy.name.value,
                }
            )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        print(f"wrote {total} path(s) to {args.out}")
    return 0


def _parse_ratios(text: str) -> tuple[float, float, float]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("ratios must be three comma-separated numbers")
    return parts[0], parts[1], parts[2]


def cmd_corpus(args) -> int:
    trees = _load_trees(args.paths)
    corpus = build_corpus(
        trees,
        get_strategy(args.strategy),
        TokenizerConfig(),
        min_count=args.min_count,
        seed=args.seed,
        ratios=args.ratios,
        ner=args.ner,
        limits=PathLimits(max_len=args.max_len, anchor=Anchor(args.anchor)),
    )
    write_corpus(corpus, args.out)
    s = corpus.stats
    print(f"wrote corpus to {args.out}")
    print(f"train={s.train_examples} valid={s.valid_examples} test={s.test_examples}")
    print(f"prompt dictionary={s.prompt_dictionary} response dictionary={s.response_dictionary}")
    print(f"vocabulary={len(corpus.vocab.tokens)} (min_count={args.min_count})")
    return 0


def cmd_stats(args) -> int:
    with open(Path(args.corpus_dir) / "stats.json", encoding="utf-8") as fh:
        s = json.load(fh)
    rows = [
        ("train examples", s["train_examples"]),
        ("valid examples", s["valid_examples"]),
        ("test examples", s["test_examples"]),
        ("prompt dictionary", s["prompt_dictionary"]),
        ("response dictionary", s["response_dictionary"]),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name.ljust(width)}  {value}")
    return 0


def cmd_train(args) -> int:
    corpus = load_corpus(args.corpus_dir)
    model = train_ngram(corpus, n=args.order, alpha=args.alpha)
    strategy = corpus.train[0].strategy if corpus.train else "unknown"
    ner = any(
        ENT in ex.prompt or ENT in ex.response for ex in corpus.train
    )
    rows = []
    for split in ("train", "valid", "test"):
        examples = getattr(corpus, split)
        if not examples:
            continue
        rows.append(
            PerplexityRow(
                model=f"ngram{args.order}/{split}",
                strategy=strategy,
                ner=ner,
                perplexity=perplexity(model, examples),
            )
        )
    print(PerplexityReport(rows=tuple(rows)).format_text())
    return 0


def _build_backend(args, need_corpus: bool = True):
    name = args.backend
    if name == "echo":
        return EchoBackend()
    if name.startswith("remote:"):
        from .remote import RemoteBackend

        _, host, port = name.split(":", 2)
        return RemoteBackend.connect(host, int(port))
    corpus = load_corpus(args.corpus_dir)
    if name == "ngram":
        model = train_ngram(corpus, n=args.order, alpha=args.alpha)
        return NgramBackend(model)
    if name == "retrieval":
        return RetrievalBackend(build_retrieval_index(corpus))
    raise SystemExit(f"unknown backend {name!r}")


def cmd_generate(args) -> int:
    backend = _build_backend(args)
    prompt = tuple(tokenize(args.prompt, TokenizerConfig()))
    if not prompt:
        raise SystemExit("prompt must contain at least one token")
    req = GenerationRequest(
        prompt=prompt,
        max_tokens=args.max_tokens,
        temperature=args.temperature,
        seed=args.seed,
    )
    tokens = backend.generate(req)
    print(display_text(t for t in tokens if t != EOS))
    return 0


def cmd_debate(args) -> int:
    backend = _build_backend(args)
    config = DebateConfig(
        max_turns=args.turns,
        backend=args.backend,
        seed=args.seed,
        max_tokens=args.max_tokens,
        temperature=args.temperature,
        paper_protocol=args.paper_protocol,
    )
    if not args.interactive:
        t = run_debate(args.subject, backend, turns=args.turns, seed=args.seed, config=config)
        for turn in t.turns:
            print(f"{turn.speaker.value}: {turn.display_text}")
    else:
        t = new_debate(args.subject, backend, config)
        print(f"{t.turns[-1].speaker.value}: {t.turns[-1].display_text}")
        while not t.full:
            try:
                line = input("you> ").strip()
            except EOFError:
                break
            if line == "/quit":
                break
            if line == "/auto":
                t = advance_turn(t, backend)
                print(f"{t.turns[-1].speaker.value}: {t.turns[-1].display_text}")
                continue
            if not line:
                continue
            t = advance_turn(t, backend, human_text=line)
            if not t.full:
                t = advance_turn(t, backend)
                print(f"{t.turns[-1].speaker.value}: {t.turns[-1].display_text}")
        print("(debate closed)")
    if args.out:
        save_transcript(t, args.out)
        print(f"saved transcript to {args.out}")
    return 0


def cmd_serve(args) -> int:
    from .service import run_service

    run_service(args.config)
    return 0


def _load_transcripts(directory: str):
    paths = sorted(Path(directory).glob("*.json"))
    return [load_transcript(p) for p in paths]


def cmd_eval_pack(args) -> int:
    human = _load_transcripts(args.human)
    generated = _load_transcripts(args.generated)
    packets, key = make_rating_packets(
        human, generated, target_len=args.target_len, seed=args.seed
    )
    write_packets(packets, args.out_packets)
    write_key_csv(key, args.out_key)
    print(
        f"packed {len(packets)} packet(s) "
        f"({len(human)} human, {len(generated)} generated) -> {args.out_packets}"
    )
    return 0


def cmd_eval_aggregate(args) -> int:
    records = read_ratings_csv(args.ratings)
    key = read_key_csv(args.key)
    report = aggregate_ratings(records, key, population_std=args.population_std)
    print(report.format_text())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="debate-forge",
        description="Build debate corpora from argument trees and run debate agents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate raw trees and write canonical JSON")
    p.add_argument("paths", nargs="+")
    p.add_argument("--out", default="trees")
    p.add_argument("--format", choices=["auto", "kialo", "json"], default="auto")
    p.add_argument("--english-threshold", type=float, default=DEFAULT_ENGLISH_THRESHOLD)
    p.add_argument("--keep-all", action="store_true", help="skip the language filter")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="enumerate debate paths for a strategy")
    p.add_argument("paths", nargs="+")
    p.add_argument("--strategy", default="complex")
    p.add_argument("--anchor", choices=[a.value for a in Anchor], default=Anchor.ANY_NODE.value)
    p.add_argument("--max-len", type=int, default=20)
    p.add_argument("--out", help="write paths as JSONL")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("corpus", help="build train/valid/test sets from trees")
    p.add_argument("paths", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--strategy", default="complex")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--ner", action="store_true")
    p.add_argument("--ratios", type=_parse_ratios, default=(0.90, 0.05, 0.05))
    p.add_argument("--anchor", choices=[a.value for a in Anchor], default=Anchor.ANY_NODE.value)
    p.add_argument("--max-len", type=int, default=20)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("stats", help="print corpus statistics")
    p.add_argument("corpus_dir")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train the n-gram baseline and report perplexity")
    p.add_argument("corpus_dir")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.4)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="one-shot generation from a prompt")
    p.add_argument("corpus_dir")
    p.add_argument("--prompt", required=True)
    p.add_argument("--backend", default="ngram")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-tokens", type=int, default=60)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.4)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("debate", help="run a scripted or interactive debate")
    p.add_argument("corpus_dir", nargs="?", default=".")
    p.add_argument("--subject", required=True)
    p.add_argument("--backend", default="retrieval")
    p.add_argument("--turns", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-tokens", type=int, default=60)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--interactive", action="store_true")
    p.add_argument("--paper-protocol", action="store_true")
    p.add_argument("--out", help="write the transcript JSON here")
    p.set_defaults(func=cmd_debate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="TOML config (port, backends, data dir)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("eval-pack", help="build blinded rating packets")
    p.add_argument("--human", required=True, help="directory of human transcript JSON files")
    p.add_argument("--generated", required=True, help="directory of generated transcripts")
    p.add_argument("--target-len", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-packets", default="packets.json")
    p.add_argument("--out-key", default="key.csv")
    p.set_defaults(func=cmd_eval_pack)

    p = sub.add_parser("eval-aggregate", help="aggregate rating CSVs into a report")
    p.add_argument("--ratings", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--population-std", action="store_true")
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_eval_aggregate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
