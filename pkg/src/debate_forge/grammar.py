"""Stance patterns and debate-path extraction.

A stance pattern is a tiny regex over the two-symbol alphabet {Pro, Con}:
literal classes ``[Pro]``, ``[Con]``, the union class ``[Pro|Con]``,
grouping, ``*`` and ``+``.  Four built-in parsing strategies pair a prompt
pattern with a response pattern; enumerating a tree under a strategy yields
every contiguous downward chain of argument nodes that splits into a
matching (prompt, response) pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .tree import DebateTree, Stance


class PatternSyntaxError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# --- pattern AST -------------------------------------------------------------

PRO_ONLY = frozenset({Stance.PRO})
CON_ONLY = frozenset({Stance.CON})
ANY_STANCE = frozenset({Stance.PRO, Stance.CON})


@dataclass(frozen=True)
class _Sym:
    stances: frozenset


@dataclass(frozen=True)
class _Cat:
    parts: tuple


@dataclass(frozen=True)
class _Rep:
    inner: object
    min_one: bool  # True for +, False for *


_CLASS_TOKENS = {
    "[Pro|Con]": ANY_STANCE,
    "[Pro]": PRO_ONLY,
    "[Con]": CON_ONLY,
}


def _lex(source: str) -> list[tuple[object, int]]:
    tokens: list[tuple[object, int]] = []
    i = 0
    while i < len(source):
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()*+":
            tokens.append((ch, i))
            i += 1
            continue
        if ch == "[":
            for literal, stances in _CLASS_TOKENS.items():
                if source.startswith(literal, i):
                    tokens.append((stances, i))
                    i += len(literal)
                    break
            else:
                raise PatternSyntaxError("unknown stance class", i)
            continue
        raise PatternSyntaxError(f"unexpected character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _lex(source)
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def parse(self):
        node = self._sequence()
        if self.pos < len(self.tokens):
            raise PatternSyntaxError("unexpected token", self.tokens[self.pos][1])
        return node

    def _sequence(self):
        parts = []
        while True:
            tok = self._peek()
            if tok is None or tok == ")":
                break
            parts.append(self._item())
        if not parts:
            at = self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.source)
            raise PatternSyntaxError("empty pattern", at)
        return parts[0] if len(parts) == 1 else _Cat(tuple(parts))

    def _item(self):
        tok, at = self.tokens[self.pos]
        if isinstance(tok, frozenset):
            self.pos += 1
            node: object = _Sym(tok)
        elif tok == "(":
            self.pos += 1
            node = self._sequence()
            if self._peek() != ")":
                raise PatternSyntaxError("unclosed group", at)
            self.pos += 1
        else:
            raise PatternSyntaxError(f"unexpected token {tok!r}", at)
        nxt = self._peek()
        if nxt in ("*", "+"):
            self.pos += 1
            node = _Rep(node, min_one=(nxt == "+"))
        return node


# --- NFA compilation and simulation ------------------------------------------


class _Nfa:
    """Thompson-construction NFA over stance symbols."""

    def __init__(self):
        self.eps: list[list[int]] = []
        self.moves: list[list[tuple[frozenset, int]]] = []

    def new_state(self) -> int:
        self.eps.append([])
        self.moves.append([])
        return len(self.eps) - 1

    def add(self, node) -> tuple[int, int]:
        if isinstance(node, _Sym):
            s, t = self.new_state(), self.new_state()
            self.moves[s].append((node.stances, t))
            return s, t
        if isinstance(node, _Cat):
            first_s, cur_t = self.add(node.parts[0])
            for part in node.parts[1:]:
                s, t = self.add(part)
                self.eps[cur_t].append(s)
                cur_t = t
            return first_s, cur_t
        if isinstance(node, _Rep):
            inner_s, inner_t = self.add(node.inner)
            s, t = self.new_state(), self.new_state()
            self.eps[s].append(inner_s)
            self.eps[inner_t].append(t)
            self.eps[inner_t].append(inner_s)  # loop
            if not node.min_one:
                self.eps[s].append(t)
            return s, t
        raise TypeError(f"unknown pattern node {node!r}")

    def closure(self, states: set[int]) -> frozenset:
        stack = list(states)
        seen = set(states)
        while stack:
            st = stack.pop()
            for nxt in self.eps[st]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return frozenset(seen)


@dataclass(frozen=True)
class StancePattern:
    """A compiled stance pattern; matching is total and linear-time."""

    source: str
    _nfa: _Nfa
    _start: int
    _accept: int

    def matches(self, seq: list[Stance] | tuple[Stance, ...]) -> bool:
        return pattern_matches(self, seq)

    def __repr__(self) -> str:  # the NFA internals are noise
        return f"StancePattern({self.source!r})"


def compile_stance_pattern(source: str) -> StancePattern:
    ast = _Parser(source).parse()
    nfa = _Nfa()
    start, accept = nfa.add(ast)
    return StancePattern(source=source, _nfa=nfa, _start=start, _accept=accept)


def pattern_matches(pattern: StancePattern, seq) -> bool:
    nfa = pattern._nfa
    current = nfa.closure({pattern._start})
    for stance in seq:
        nxt = {
            dest
            for st in current
            for stances, dest in nfa.moves[st]
            if stance in stances
        }
        if not nxt:
            return False
        current = nfa.closure(nxt)
    return pattern._accept in current


# --- parsing strategies -------------------------------------------------------


class StrategyName(str, Enum):
    SUPPORTIVE = "Supportive"
    CONTRADICTING = "Contradicting"
    COMPLEX = "Complex"
    MULTI_TURN = "MultiTurn"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class ParsingStrategy:
    name: StrategyName
    prompt_pattern: StancePattern
    response_pattern: StancePattern


SUPPORTIVE = ParsingStrategy(
    StrategyName.SUPPORTIVE,
    compile_stance_pattern("[Pro|Con][Pro]*"),
    compile_stance_pattern("[Pro]+"),
)
CONTRADICTING = ParsingStrategy(
    StrategyName.CONTRADICTING,
    compile_stance_pattern("[Pro|Con][Pro]*"),
    compile_stance_pattern("[Con][Pro]*"),
)
COMPLEX = ParsingStrategy(
    StrategyName.COMPLEX,
    compile_stance_pattern("[Pro|Con][Pro]*"),
    compile_stance_pattern("[Pro|Con][Pro]*"),
)
MULTI_TURN = ParsingStrategy(
    StrategyName.MULTI_TURN,
    compile_stance_pattern("[Pro|Con][Pro]*([Con][Pro]*)*"),
    compile_stance_pattern("[Con][Pro]*"),
)

BUILTIN_STRATEGIES: dict[str, ParsingStrategy] = {
    "supportive": SUPPORTIVE,
    "contradicting": CONTRADICTING,
    "complex": COMPLEX,
    "multiturn": MULTI_TURN,
}


def get_strategy(name: str) -> ParsingStrategy:
    try:
        return BUILTIN_STRATEGIES[name.lower().replace("-", "").replace("_", "")]
    except KeyError:
        raise ValueError(
            f"unknown strategy {name!r}; choose from {sorted(BUILTIN_STRATEGIES)}"
        ) from None


def custom_strategy(prompt_source: str, response_source: str) -> ParsingStrategy:
    return ParsingStrategy(
        StrategyName.CUSTOM,
        compile_stance_pattern(prompt_source),
        compile_stance_pattern(response_source),
    )


def find_splits(strategy: ParsingStrategy, seq: list[Stance]) -> list[int]:
    """All i with seq[:i] in the prompt language and seq[i:] in the response
    language, ascending.  Contradicting and MultiTurn admit at most one."""
    return [
        i
        for i in range(1, len(seq))
        if pattern_matches(strategy.prompt_pattern, seq[:i])
        and pattern_matches(strategy.response_pattern, seq[i:])
    ]


def turn_blocks(seq: list[Stance]) -> list[tuple[int, int]]:
    """Partition a stance sequence into speaker blocks.

    A new block starts at index 0 and at every later Con: within a block
    everything after the head supports it, so a Con marks the opponent
    taking over.
    """
    if not seq:
        raise ValueError("turn_blocks requires a non-empty sequence")
    starts = [0] + [i for i in range(1, len(seq)) if seq[i] is Stance.CON]
    return [
        (start, starts[k + 1] if k + 1 < len(starts) else len(seq))
        for k, start in enumerate(starts)
    ]


# --- path enumeration ---------------------------------------------------------


class Anchor(str, Enum):
    ANY_NODE = "any"
    ROOT_CHILDREN = "root-children"


@dataclass(frozen=True)
class PathLimits:
    max_len: int = 20
    anchor: Anchor = Anchor.ANY_NODE


@dataclass(frozen=True)
class DebatePath:
    """A matched chain of argument nodes with its prompt/response split.

    node_ids exclude the stance-less root thesis; split_index is the first
    response position; turn_starts holds index 0 plus every Con index.
    """

    tree_id: str
    node_ids: tuple[str, ...]
    split_index: int
    turn_starts: tuple[int, ...]

    @property
    def prompt_ids(self) -> tuple[str, ...]:
        return self.node_ids[: self.split_index]

    @property
    def response_ids(self) -> tuple[str, ...]:
        return self.node_ids[self.split_index:]


def path_stances(tree: DebateTree, node_ids) -> list[Stance]:
    return [tree.nodes[nid].stance for nid in node_ids]


def enumerate_debate_paths(
    tree: DebateTree,
    strategy: ParsingStrategy,
    limits: PathLimits = PathLimits(),
) -> list[DebatePath]:
    """Every contiguous downward chain of non-root nodes, at every valid
    split, in deterministic order (start id, then length, then path, then
    split)."""
    root = tree.root()
    if limits.anchor is Anchor.ROOT_CHILDREN:
        starts = tree.children(root.id)
    else:
        starts = [n for n in tree.nodes.values() if not n.is_root]

    found: list[DebatePath] = []
    for start in starts:
        stack: list[list[str]] = [[start.id]]
        while stack:
            chain = stack.pop()
            if len(chain) >= 2:
                stances = path_stances(tree, chain)
                for split in find_splits(strategy, stances):
                    found.append(
                        DebatePath(
                            tree_id=tree.tree_id,
                            node_ids=tuple(chain),
                            split_index=split,
                            turn_starts=tuple(
                                [0]
                                + [
                                    i
                                    for i in range(1, len(stances))
                                    if stances[i] is Stance.CON
                                ]
                            ),
                        )
                    )
            if len(chain) < limits.max_len:
                for child in tree.children(chain[-1]):
                    stack.append(chain + [child.id])

    found.sort(key=lambda p: (p.node_ids[0], len(p.node_ids), p.node_ids, p.split_index))
    return found
