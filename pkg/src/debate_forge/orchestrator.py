"""Multi-turn debate driving: feed prior turns back as the next prompt.

Transcripts are immutable values; advancing a debate returns a new transcript.
The prompt for turn k is the subject followed by every prior turn, joined by
the TURN separator, so it carries exactly k-1 separators. Odd turns belong to
Alice, even turns to Bob; a human turn substitutes for the agent on its side.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .generation import GenerationRequest, GeneratorBackend
from .text import TokenizerConfig, tokenize
from .tokens import EOS, TURN, UNK, UNK_DISPLAY

__all__ = [
    "Speaker",
    "DebateTurn",
    "DebateConfig",
    "DebateTranscript",
    "DebateFull",
    "display_text",
    "new_debate",
    "advance_turn",
    "run_debate",
    "transcript_to_dict",
    "transcript_from_dict",
    "save_transcript",
    "load_transcript",
]


class DebateFull(Exception):
    pass


class Speaker(str, Enum):
    ALICE = "Alice"
    BOB = "Bob"
    HUMAN = "Human"


def display_text(tokens) -> str:
    """Render tokens for humans: unknowns become an underline placeholder."""
    return " ".join(UNK_DISPLAY if t == UNK else t for t in tokens)


@dataclass(frozen=True)
class DebateTurn:
    speaker: Speaker
    tokens: tuple[str, ...]  # stored without the trailing EOS
    display_text: str


def _make_turn(speaker: Speaker, tokens) -> DebateTurn:
    toks = tuple(t for t in tokens if t != EOS)
    return DebateTurn(speaker=speaker, tokens=toks, display_text=display_text(toks))


@dataclass(frozen=True)
class DebateConfig:
    max_turns: int = 10
    backend: str = ""
    seed: int = 0
    max_tokens: int = 60
    temperature: float = 1.0
    history: str = "full"  # "full" feeds every turn; "last" only the latest
    history_limit: int = 512
    paper_protocol: bool = False

    def __post_init__(self) -> None:
        if self.max_turns < 1:
            raise ValueError("max_turns must be >= 1")
        if self.paper_protocol and not 5 <= self.max_turns <= 15:
            raise ValueError("paper protocol requires between 5 and 15 turns")
        if self.history not in ("full", "last"):
            raise ValueError("history must be 'full' or 'last'")


@dataclass(frozen=True)
class DebateTranscript:
    debate_id: str
    subject: str
    config: DebateConfig
    turns: tuple[DebateTurn, ...] = ()

    @property
    def full(self) -> bool:
        return len(self.turns) >= self.config.max_turns

    def subject_tokens(self) -> tuple[str, ...]:
        return tuple(tokenize(self.subject, TokenizerConfig()))


def _next_prompt(t: DebateTranscript) -> tuple[str, ...]:
    if t.config.history == "last" and t.turns:
        return t.turns[-1].tokens
    blocks = [list(t.subject_tokens())] + [list(turn.tokens) for turn in t.turns]

    def joined_len(bs) -> int:
        return sum(len(b) for b in bs) + len(bs) - 1

    # Front-truncate old turns past the window; the subject and the most
    # recent turn always stay.
    while joined_len(blocks) > t.config.history_limit and len(blocks) > 2:
        del blocks[1]
    prompt: list[str] = []
    for i, b in enumerate(blocks):
        if i:
            prompt.append(TURN)
        prompt.extend(b)
    return tuple(prompt)


def advance_turn(
    t: DebateTranscript,
    backend: GeneratorBackend,
    human_text: str | None = None,
) -> DebateTranscript:
    if t.full:
        raise DebateFull(f"debate {t.debate_id} already has {len(t.turns)} turns")
    turn_number = len(t.turns) + 1
    side = Speaker.ALICE if turn_number % 2 == 1 else Speaker.BOB
    if human_text is not None:
        toks = tokenize(human_text, TokenizerConfig())
        if not toks:
            raise ValueError("human text must tokenize to at least one token")
        turn = _make_turn(Speaker.HUMAN, toks)
    else:
        req = GenerationRequest(
            prompt=_next_prompt(t),
            max_tokens=t.config.max_tokens,
            temperature=t.config.temperature,
            seed=t.config.seed + turn_number,
        )
        turn = _make_turn(side, backend.generate(req))
    return replace(t, turns=t.turns + (turn,))


def _default_id(subject: str, config: DebateConfig) -> str:
    key = f"{subject}\x00{config.backend}\x00{config.seed}".encode("utf-8")
    return "debate-" + hashlib.sha1(key).hexdigest()[:12]


def new_debate(
    subject: str,
    backend: GeneratorBackend,
    config: DebateConfig = DebateConfig(),
    debate_id: str | None = None,
) -> DebateTranscript:
    if not tokenize(subject, TokenizerConfig()):
        raise ValueError("subject must tokenize to at least one token")
    t = DebateTranscript(
        debate_id=debate_id or _default_id(subject, config),
        subject=subject,
        config=config,
    )
    return advance_turn(t, backend)


def run_debate(
    subject: str,
    backend: GeneratorBackend,
    turns: int = 10,
    seed: int = 0,
    config: DebateConfig | None = None,
) -> DebateTranscript:
    """new_debate folded with advance_turn until exactly `turns` turns exist."""
    if config is None:
        config = DebateConfig(max_turns=turns, seed=seed)
    if turns < 1 or turns > config.max_turns:
        raise ValueError("turns must lie in [1, max_turns]")
    if config.paper_protocol and not 5 <= turns <= 15:
        raise ValueError("paper protocol requires between 5 and 15 turns")
    t = new_debate(subject, backend, config)
    while len(t.turns) < turns:
        t = advance_turn(t, backend)
    return t


# --- transcript JSON ------------------------------------------------------------


def transcript_to_dict(t: DebateTranscript) -> dict:
    return {
        "debate_id": t.debate_id,
        "subject": t.subject,
        "config": {
            "max_turns": t.config.max_turns,
            "backend": t.config.backend,
            "seed": t.config.seed,
            "max_tokens": t.config.max_tokens,
            "temperature": t.config.temperature,
            "history": t.config.history,
            "history_limit": t.config.history_limit,
            "paper_protocol": t.config.paper_protocol,
        },
        "turns": [
            {
                "speaker": turn.speaker.value,
                "tokens": list(turn.tokens),
                "display_text": turn.display_text,
            }
            for turn in t.turns
        ],
    }


def transcript_from_dict(obj: dict) -> DebateTranscript:
    cfg = obj.get("config", {})
    config = DebateConfig(
        max_turns=cfg.get("max_turns", 10),
        backend=cfg.get("backend", ""),
        seed=cfg.get("seed", 0),
        max_tokens=cfg.get("max_tokens", 60),
        temperature=cfg.get("temperature", 1.0),
        history=cfg.get("history", "full"),
        history_limit=cfg.get("history_limit", 512),
        paper_protocol=cfg.get("paper_protocol", False),
    )
    turns = tuple(
        DebateTurn(
            speaker=Speaker(turn["speaker"]),
            tokens=tuple(turn["tokens"]),
            display_text=turn["display_text"],
        )
        for turn in obj.get("turns", [])
    )
    return DebateTranscript(
        debate_id=obj["debate_id"],
        subject=obj["subject"],
        config=config,
        turns=turns,
    )


def save_transcript(t: DebateTranscript, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(transcript_to_dict(t), fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_transcript(path: str | Path) -> DebateTranscript:
    with open(path, encoding="utf-8") as fh:
        return transcript_from_dict(json.load(fh))
