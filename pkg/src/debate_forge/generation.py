"""Backend contract for turn generation.

A backend maps a GenerationRequest to a token sequence that ends with exactly
one EOS, truncated to max_tokens content tokens. Built-ins are deterministic
functions of (state, request); external processes speak the wire protocol in
the remote module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

from .tokens import EOS

__all__ = [
    "GenerationRequest",
    "GeneratorBackend",
    "finalize_tokens",
    "EchoBackend",
]


@dataclass(frozen=True)
class GenerationRequest:
    prompt: tuple[str, ...]
    max_tokens: int = 60
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        object.__setattr__(self, "prompt", tuple(self.prompt))


@runtime_checkable
class GeneratorBackend(Protocol):
    def generate(self, req: GenerationRequest) -> tuple[str, ...]: ...


def finalize_tokens(tokens: Sequence[str], max_tokens: int) -> tuple[str, ...]:
    """Apply the output guarantee: cut at the first EOS, keep at most
    max_tokens content tokens, and end with exactly one EOS."""
    toks = list(tokens)
    if EOS in toks:
        toks = toks[: toks.index(EOS)]
    return tuple(toks[:max_tokens]) + (EOS,)


class EchoBackend:
    """Returns the prompt itself; the trivial reference backend."""

    def generate(self, req: GenerationRequest) -> tuple[str, ...]:
        return finalize_tokens(req.prompt, req.max_tokens)
