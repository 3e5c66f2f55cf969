"""Perplexity reports, blinded human-rating packets, and rating aggregation.

Perplexity is token-level with natural logs, over responses only; the prompt
(plus the TURN separator) is conditioning context. Rating packets strip every
source-correlated field so raters cannot tell human from generated; only the
key file keeps the mapping.
"""

from __future__ import annotations

import csv
import json
import math
import random
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import ExamplePair
from .ngram import NgramModel, ngram_score
from .orchestrator import DebateTranscript
from .tokens import TURN

__all__ = [
    "EmptySet",
    "LengthMismatch",
    "UnknownPacket",
    "CRITERIA",
    "UNDERLINE_NOTE",
    "perplexity",
    "PerplexityRow",
    "PerplexityReport",
    "RatingRecord",
    "CriterionStats",
    "AggregateReport",
    "make_rating_packets",
    "aggregate_ratings",
    "write_packets",
    "write_key_csv",
    "read_key_csv",
    "append_rating",
    "read_ratings_csv",
    "write_ratings_csv",
]


class EmptySet(Exception):
    pass


class LengthMismatch(Exception):
    pass


class UnknownPacket(Exception):
    pass


CRITERIA = ("style", "content", "strategy", "overall")

UNDERLINE_NOTE = (
    "Blanks shown as ___ stand for words the system left out; "
    "please rate the argument around them."
)


# --- perplexity -----------------------------------------------------------------


def perplexity(model: NgramModel, examples: Sequence[ExamplePair]) -> float:
    """exp of mean negative log-probability per response token, prompts as
    conditioning context."""
    if not examples:
        raise EmptySet("perplexity needs at least one example")
    total_logp = 0.0
    total_len = 0
    for ex in examples:
        total_logp += ngram_score(model, ex.response, context=ex.prompt + (TURN,))
        total_len += len(ex.response)
    if total_len == 0:
        raise EmptySet("examples contain no response tokens")
    return math.exp(-total_logp / total_len)


@dataclass(frozen=True)
class PerplexityRow:
    model: str
    strategy: str
    ner: bool
    perplexity: float


@dataclass(frozen=True)
class PerplexityReport:
    rows: tuple[PerplexityRow, ...]

    def __post_init__(self) -> None:
        keys = [(r.model, r.strategy, r.ner) for r in self.rows]
        if len(keys) != len(set(keys)):
            raise ValueError("report rows must be uniquely keyed")

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "model": r.model,
                    "strategy": r.strategy,
                    "ner": r.ner,
                    "perplexity": r.perplexity,
                }
                for r in self.rows
            ]
        }

    def format_text(self) -> str:
        header = ("model", "strategy", "ner", "perplexity")
        cells = [header] + [
            (r.model, r.strategy, "yes" if r.ner else "no", f"{r.perplexity:.3f}")
            for r in self.rows
        ]
        widths = [max(len(row[i]) for row in cells) for i in range(4)]
        lines = [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in cells
        ]
        return "\n".join(lines)


# --- rating packets -------------------------------------------------------------


def _blind_turns(t: DebateTranscript) -> list[dict]:
    # Side labels by parity: speaker names (Alice/Bob vs Human) would leak
    # the transcript's origin.
    return [
        {
            "speaker": "Speaker 1" if i % 2 == 0 else "Speaker 2",
            "text": turn.display_text,
        }
        for i, turn in enumerate(t.turns)
    ]


def make_rating_packets(
    human: Sequence[DebateTranscript],
    generated: Sequence[DebateTranscript],
    target_len: int = 10,
    seed: int = 0,
) -> tuple[list[dict], dict[str, str]]:
    """Shuffle and blind transcripts; returns (packets, packet_id -> source)."""
    for t in list(human) + list(generated):
        if len(t.turns) != target_len:
            raise LengthMismatch(
                f"debate {t.debate_id} has {len(t.turns)} turns, expected {target_len}"
            )
    tagged = [(t, "human") for t in human] + [(t, "generated") for t in generated]
    rng = random.Random(seed)
    rng.shuffle(tagged)
    packets: list[dict] = []
    key: dict[str, str] = {}
    for i, (t, source) in enumerate(tagged):
        pid = f"p{i + 1:04d}"
        packets.append(
            {
                "packet_id": pid,
                "subject": t.subject,
                "turns": _blind_turns(t),
                "criteria": list(CRITERIA),
                "note": UNDERLINE_NOTE,
            }
        )
        key[pid] = source
    return packets, key


# --- rating aggregation -----------------------------------------------------------


@dataclass(frozen=True)
class RatingRecord:
    packet_id: str
    rater_id: str
    style: int
    content: int
    strategy: int
    overall: int

    def score(self, criterion: str) -> int:
        return getattr(self, criterion)

    def in_range(self) -> bool:
        return all(1 <= self.score(c) <= 4 for c in CRITERIA)


@dataclass(frozen=True)
class CriterionStats:
    mean: float
    std: float
    n: int
    degenerate: bool  # n < 2, std reported as 0.0 by convention


@dataclass(frozen=True)
class AggregateReport:
    cells: dict[tuple[str, str], CriterionStats]  # (source, criterion) -> stats
    accepted: int
    rejected: int  # out-of-range records
    superseded: int  # earlier duplicates of a (rater, packet) pair

    def to_dict(self) -> dict:
        return {
            "cells": {
                f"{source}/{criterion}": {
                    "mean": s.mean,
                    "std": s.std,
                    "n": s.n,
                    "degenerate": s.degenerate,
                }
                for (source, criterion), s in sorted(self.cells.items())
            },
            "accepted": self.accepted,
            "rejected": self.rejected,
            "superseded": self.superseded,
        }

    def format_text(self) -> str:
        header = ("source", "criterion", "mean", "std", "n")
        rows = [header]
        for (source, criterion), s in sorted(self.cells.items()):
            rows.append((source, criterion, f"{s.mean:.3f}", f"{s.std:.3f}", str(s.n)))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in rows
        ]
        lines.append(
            f"accepted={self.accepted} rejected={self.rejected} superseded={self.superseded}"
        )
        return "\n".join(lines)


def aggregate_ratings(
    records: Sequence[RatingRecord],
    key: dict[str, str],
    population_std: bool = False,
) -> AggregateReport:
    for rec in records:
        if rec.packet_id not in key:
            raise UnknownPacket(f"packet {rec.packet_id} not in key file")
    valid = [r for r in records if r.in_range()]
    rejected = len(records) - len(valid)
    # Keep the last submission per (rater, packet).
    latest: dict[tuple[str, str], RatingRecord] = {}
    for rec in valid:
        latest[(rec.rater_id, rec.packet_id)] = rec
    accepted = list(latest.values())
    superseded = len(valid) - len(accepted)

    cells: dict[tuple[str, str], CriterionStats] = {}
    sources = sorted(set(key.values()))
    for source in sources:
        group = [r for r in accepted if key[r.packet_id] == source]
        for criterion in CRITERIA:
            scores = [r.score(criterion) for r in group]
            n = len(scores)
            if n == 0:
                continue
            mean = statistics.fmean(scores)
            if n >= 2:
                std = statistics.pstdev(scores) if population_std else statistics.stdev(scores)
            else:
                std = 0.0
            cells[(source, criterion)] = CriterionStats(
                mean=mean, std=std, n=n, degenerate=n < 2
            )
    return AggregateReport(
        cells=cells,
        accepted=len(accepted),
        rejected=rejected,
        superseded=superseded,
    )


# --- files ------------------------------------------------------------------------

RATINGS_HEADER = ["packet_id", "rater_id", "style", "content", "strategy", "overall"]
KEY_HEADER = ["packet_id", "source"]


def write_packets(packets: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(list(packets), fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def write_key_csv(key: dict[str, str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(KEY_HEADER)
        for pid in sorted(key):
            w.writerow([pid, key[pid]])


def read_key_csv(path: str | Path) -> dict[str, str]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return {row["packet_id"]: row["source"] for row in reader}


def write_ratings_csv(records: Iterable[RatingRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RATINGS_HEADER)
        for r in records:
            w.writerow([r.packet_id, r.rater_id, r.style, r.content, r.strategy, r.overall])


def append_rating(record: RatingRecord, path: str | Path) -> None:
    """Append one row, writing the header first when the file is new."""
    p = Path(path)
    new = not p.exists() or p.stat().st_size == 0
    with open(p, "a", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(RATINGS_HEADER)
        w.writerow(
            [
                record.packet_id,
                record.rater_id,
                record.style,
                record.content,
                record.strategy,
                record.overall,
            ]
        )


def read_ratings_csv(path: str | Path) -> list[RatingRecord]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                RatingRecord(
                    packet_id=row["packet_id"],
                    rater_id=row["rater_id"],
                    style=int(row["style"]),
                    content=int(row["content"]),
                    strategy=int(row["strategy"]),
                    overall=int(row["overall"]),
                )
            )
    return out
