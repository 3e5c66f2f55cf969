"""Shared test utilities: independent oracles and seeded generators.

The pattern oracle translates stance-pattern sources into ordinary Python
regexes over P/C strings, so grammar tests check the hand-built matcher
against a completely separate engine. The path oracle enumerates chains by
brute force from the tree structure alone.
"""

from __future__ import annotations

import random
import re

from debate_forge.grammar import Anchor, ParsingStrategy
from debate_forge.tree import ArgumentNode, DebateTree, Stance

# Acceptance tests register (criterion, passed) here; the conftest terminal
# hook prints one line per entry at the end of the run.
ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


# --- reference pattern engine ---------------------------------------------------


def pattern_source_to_regex(source: str) -> re.Pattern:
    out: list[str] = []
    i = 0
    while i < len(source):
        ch = source[i]
        if ch.isspace():
            i += 1
        elif source.startswith("[Pro|Con]", i):
            out.append("[PC]")
            i += len("[Pro|Con]")
        elif source.startswith("[Pro]", i):
            out.append("P")
            i += len("[Pro]")
        elif source.startswith("[Con]", i):
            out.append("C")
            i += len("[Con]")
        elif ch in "()*+":
            out.append(ch)
            i += 1
        else:
            raise ValueError(f"untranslatable pattern piece at {i}: {source[i:]}")
    return re.compile("".join(out))


def stances_to_pc(stances) -> str:
    return "".join("P" if s is Stance.PRO else "C" for s in stances)


def oracle_matches(pattern_source: str, stances) -> bool:
    return pattern_source_to_regex(pattern_source).fullmatch(stances_to_pc(stances)) is not None


# --- brute-force path enumeration ------------------------------------------------


def brute_force_paths(
    tree: DebateTree,
    strategy: ParsingStrategy,
    max_len: int = 20,
    anchor: Anchor = Anchor.ANY_NODE,
) -> set[tuple[tuple[str, ...], int]]:
    prompt_re = pattern_source_to_regex(strategy.prompt_pattern.source)
    response_re = pattern_source_to_regex(strategy.response_pattern.source)
    root = tree.root()
    if anchor is Anchor.ROOT_CHILDREN:
        starts = [n.id for n in tree.children(root.id)]
    else:
        starts = [n.id for n in tree.nodes.values() if n.parent_id is not None]

    results: set[tuple[tuple[str, ...], int]] = set()
    for start in starts:
        chains = [[start]]
        while chains:
            chain = chains.pop()
            if len(chain) >= 2:
                pc = "".join(
                    "P" if tree.nodes[nid].stance is Stance.PRO else "C" for nid in chain
                )
                for split in range(1, len(chain)):
                    if prompt_re.fullmatch(pc[:split]) and response_re.fullmatch(pc[split:]):
                        results.add((tuple(chain), split))
            if len(chain) < max_len:
                for child in tree.children(chain[-1]):
                    chains.append(chain + [child.id])
    return results


# --- fixture trees ---------------------------------------------------------------

# Six-node fixture: thesis R; A = Pro child of R; B = Con child of A;
# C = Pro child of A; D = Pro child of B; E = Con child of D.
F1_A, F1_B, F1_C, F1_D, F1_E = "1.1", "1.1.1", "1.1.2", "1.1.1.1", "1.1.1.1.1"


def build_f1() -> DebateTree:
    def node(nid, parent, stance, text):
        return ArgumentNode(id=nid, parent_id=parent, stance=stance, text=text)

    nodes = {
        "1": node("1", None, None, "Dogs are better pets than cats for most people."),
        F1_A: node(F1_A, "1", Stance.PRO, "Dogs protect their owners from harm at night."),
        F1_B: node(F1_B, F1_A, Stance.CON, "Many dogs are too small to protect anyone from danger."),
        F1_C: node(F1_C, F1_A, Stance.PRO, "Trained dogs are a deterrent to burglars."),
        F1_D: node(F1_D, F1_B, Stance.PRO, "Toy breeds cannot scare intruders away from a house."),
        F1_E: node(F1_E, F1_D, Stance.CON, "Even small dogs bark loudly enough to alert the owners."),
    }
    return DebateTree(
        tree_id="f1", title="Dogs are better pets than cats for most people.", nodes=nodes
    )


F1_EXPECTED = {
    "supportive": {((F1_A,), (F1_C,)), ((F1_B,), (F1_D,))},
    "contradicting": {
        ((F1_A,), (F1_B,)),
        ((F1_A,), (F1_B, F1_D)),
        ((F1_D,), (F1_E,)),
        ((F1_B, F1_D), (F1_E,)),
    },
    "multiturn": {
        ((F1_A,), (F1_B,)),
        ((F1_A,), (F1_B, F1_D)),
        ((F1_D,), (F1_E,)),
        ((F1_B, F1_D), (F1_E,)),
        ((F1_A, F1_B, F1_D), (F1_E,)),
    },
}
F1_EXPECTED["complex"] = F1_EXPECTED["supportive"] | F1_EXPECTED["contradicting"]


# --- random generators ------------------------------------------------------------

_WORDS = (
    "the a dogs cats schools students uniforms debate evidence cities councils "
    "should because people children parents teachers taxes money health parks "
    "traffic housing energy climate votes rights safety culture libraries music "
    "art science history winter summer rivers forests is are have do not and or"
).split()

_NAMES = ("Alice", "Bob", "Oslo", "Kialo", "Europe", "Smith")


def random_sentence(rng: random.Random, allow_names: bool = False) -> str:
    words = [rng.choice(_WORDS) for _ in range(rng.randint(3, 8))]
    if allow_names and rng.random() < 0.3:
        words.insert(rng.randrange(len(words)), rng.choice(_NAMES))
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def random_tree(rng: random.Random, tree_id: str, max_nodes: int = 50,
                allow_names: bool = False) -> DebateTree:
    """Random parent assignment over arbitrary (non-numeric) ids."""
    n = rng.randint(2, max_nodes)
    nodes = {
        "r00": ArgumentNode(
            id="r00", parent_id=None, stance=None, text=random_sentence(rng, allow_names)
        )
    }
    ids = ["r00"]
    for i in range(1, n):
        nid = f"r{i:02d}"
        parent = rng.choice(ids)
        stance = Stance.PRO if rng.random() < 0.55 else Stance.CON
        nodes[nid] = ArgumentNode(
            id=nid,
            parent_id=parent,
            stance=stance,
            text=random_sentence(rng, allow_names),
        )
        ids.append(nid)
    return DebateTree(tree_id=tree_id, title=nodes["r00"].text, nodes=nodes)


def random_dotted_tree(rng: random.Random, tree_id: str, max_nodes: int = 30) -> DebateTree:
    """Random tree whose ids are consistent dotted numbering, so the Kialo
    text form round-trips without renumbering."""
    n = rng.randint(2, max_nodes)
    nodes = {
        "1": ArgumentNode(id="1", parent_id=None, stance=None, text=random_sentence(rng))
    }
    child_count = {"1": 0}
    ids = ["1"]
    for _ in range(n - 1):
        parent = rng.choice(ids)
        child_count[parent] += 1
        nid = f"{parent}.{child_count[parent]}"
        stance = Stance.PRO if rng.random() < 0.5 else Stance.CON
        nodes[nid] = ArgumentNode(
            id=nid, parent_id=parent, stance=stance, text=random_sentence(rng)
        )
        child_count[nid] = 0
        ids.append(nid)
    return DebateTree(tree_id=tree_id, title=nodes["1"].text, nodes=nodes)
