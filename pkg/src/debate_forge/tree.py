"""Stance-annotated debate trees: model, parsing, validation, normalization.

A debate tree has a stance-less root (the thesis) and argument nodes that
each carry a pro/con stance toward their parent.  Two interchange formats
are supported:

* Kialo-style text exports, where the dotted numbering encodes parentage
  ("1.2.3" is a child of "1.2") and a node may be a reference marker
  ("-> See 1.2.") pointing at another node's text.
* A canonical JSON form with explicit parent/stance/ref fields.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .text import TokenizerConfig, load_default_wordlist, tokenize


class Stance(str, Enum):
    PRO = "pro"
    CON = "con"


class TreeError(Exception):
    """Base class for debate-tree loading and normalization failures."""


class EncodingError(TreeError):
    pass


class MalformedNumbering(TreeError):
    pass


class MissingStancePrefix(TreeError):
    pass


class SchemaError(TreeError):
    pass


class DanglingReference(TreeError):
    pass


class ReferenceCycle(TreeError):
    pass


class EmptyTree(TreeError):
    pass


class TreeFormat(str, Enum):
    KIALO_EXPORT = "kialo"
    CANONICAL_JSON = "json"


class ViolationKind(str, Enum):
    CYCLE = "Cycle"
    MULTIPLE_ROOTS = "MultipleRoots"
    ORPHAN = "Orphan"
    MISSING_STANCE = "MissingStance"
    DANGLING_REFERENCE = "DanglingReference"
    EMPTY_TEXT = "EmptyText"


@dataclass(frozen=True)
class TreeViolation:
    kind: ViolationKind
    node_id: str | None = None


@dataclass(frozen=True)
class ArgumentNode:
    """One argument.  The root carries neither parent nor stance."""

    id: str
    parent_id: str | None
    stance: Stance | None
    text: str
    ref_target: str | None = None

    @property
    def is_root(self) -> bool:
        return self.parent_id is None


@dataclass
class DebateTree:
    tree_id: str
    title: str
    nodes: dict[str, ArgumentNode] = field(default_factory=dict)

    def root(self) -> ArgumentNode:
        roots = [n for n in self.nodes.values() if n.is_root]
        if len(roots) != 1:
            raise SchemaError(f"tree {self.tree_id!r} has {len(roots)} roots")
        return roots[0]

    def children(self, node_id: str) -> list[ArgumentNode]:
        kids = [n for n in self.nodes.values() if n.parent_id == node_id]
        kids.sort(key=lambda n: n.id)
        return kids


# --- Kialo export format ---------------------------------------------------

TITLE_PREFIX = "Discussion Title:"
NODE_LINE_RE = re.compile(r"^(\d+(\.\d+)*)\.\s+(Pro:|Con:)?\s*(.*)$")
REF_MARKER_RE = re.compile(r"^-> See (\d+(\.\d+)*)\.$")


def _parse_kialo(text: str) -> DebateTree:
    title: str | None = None
    order: list[str] = []
    raw: dict[str, tuple[Stance | None, list[str]]] = {}

    lines = text.splitlines()
    seen_node = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if not seen_node and title is None and stripped.startswith(TITLE_PREFIX):
            title = stripped[len(TITLE_PREFIX):].strip()
            continue
        m = NODE_LINE_RE.match(stripped)
        if m is None:
            # Continuation of the previous node's text.
            if not order:
                raise MalformedNumbering(
                    f"line {lineno}: text before any numbered node"
                )
            raw[order[-1]][1].append(stripped)
            continue
        numbering, _, prefix, body = m.groups()
        if numbering in raw:
            raise MalformedNumbering(f"line {lineno}: duplicate numbering {numbering}")
        if "." in numbering:
            parent = numbering.rsplit(".", 1)[0]
            if parent not in raw:
                raise MalformedNumbering(
                    f"line {lineno}: node {numbering} appears before its parent {parent}"
                )
            if prefix is None:
                raise MissingStancePrefix(
                    f"line {lineno}: node {numbering} lacks a Pro:/Con: prefix"
                )
            stance = Stance.PRO if prefix == "Pro:" else Stance.CON
        else:
            if seen_node:
                raise MalformedNumbering(
                    f"line {lineno}: second thesis numbering {numbering}"
                )
            if prefix is not None:
                raise MalformedNumbering(
                    f"line {lineno}: thesis line must not carry a stance prefix"
                )
            stance = None
            seen_node = True
        order.append(numbering)
        raw[numbering] = (stance, [body] if body else [])

    if not order:
        raise SchemaError("no node lines found in Kialo export")

    nodes: dict[str, ArgumentNode] = {}
    for numbering in order:
        stance, parts = raw[numbering]
        body = " ".join(" ".join(parts).split())
        ref = REF_MARKER_RE.match(body)
        parent = numbering.rsplit(".", 1)[0] if "." in numbering else None
        if ref is not None:
            node = ArgumentNode(numbering, parent, stance, "", ref_target=ref.group(1))
        else:
            node = ArgumentNode(numbering, parent, stance, body)
        nodes[numbering] = node

    root_id = order[0]
    if title is None:
        title = nodes[root_id].text
    tree = DebateTree(tree_id=_slug(title), title=title, nodes=nodes)
    _raise_on_violations(tree)
    return tree


def _slug(title: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", title.lower()).strip("-")
    return slug or "debate"


def _numbering_key(numbering: str) -> tuple[int, ...]:
    return tuple(int(p) for p in numbering.split("."))


def _ids_are_consistent_numbering(tree: DebateTree) -> bool:
    for node in tree.nodes.values():
        if not re.fullmatch(r"\d+(\.\d+)*", node.id):
            return False
        if node.parent_id is None:
            if "." in node.id:
                return False
        elif node.id.rsplit(".", 1)[0] != node.parent_id:
            return False
    return True


def _format_kialo(tree: DebateTree) -> str:
    if _ids_are_consistent_numbering(tree):
        numbering = {nid: nid for nid in tree.nodes}
    else:
        numbering = {}
        root = tree.root()
        numbering[root.id] = "1"
        stack = [root.id]
        while stack:
            nid = stack.pop()
            for i, child in enumerate(tree.children(nid), start=1):
                numbering[child.id] = f"{numbering[nid]}.{i}"
                stack.append(child.id)

    lines = [f"{TITLE_PREFIX} {tree.title}", ""]
    ordered = sorted(tree.nodes.values(), key=lambda n: _numbering_key(numbering[n.id]))
    for node in ordered:
        prefix = ""
        if node.stance is not None:
            prefix = "Pro: " if node.stance is Stance.PRO else "Con: "
        if node.ref_target is not None:
            body = f"-> See {numbering[node.ref_target]}."
        else:
            body = " ".join(node.text.split())
        lines.append(f"{numbering[node.id]}. {prefix}{body}")
    return "\n".join(lines) + "\n"


# --- Canonical JSON format -------------------------------------------------


def _parse_json(text: str) -> DebateTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level JSON value must be an object")
    for key in ("tree_id", "title", "nodes"):
        if key not in doc:
            raise SchemaError(f"missing key {key!r}")
    if not isinstance(doc["tree_id"], str) or not isinstance(doc["title"], str):
        raise SchemaError("tree_id and title must be strings")
    if not isinstance(doc["nodes"], list):
        raise SchemaError("nodes must be a list")

    nodes: dict[str, ArgumentNode] = {}
    for entry in doc["nodes"]:
        if not isinstance(entry, dict):
            raise SchemaError("each node must be an object")
        for key in ("id", "parent", "stance", "text", "ref"):
            if key not in entry:
                raise SchemaError(f"node missing key {key!r}")
        nid = entry["id"]
        if not isinstance(nid, str) or not nid:
            raise SchemaError("node id must be a non-empty string")
        if nid in nodes:
            raise SchemaError(f"duplicate node id {nid!r}")
        stance_raw = entry["stance"]
        if stance_raw not in ("pro", "con", None):
            raise SchemaError(f"node {nid}: stance must be 'pro', 'con', or null")
        if not isinstance(entry["text"], str):
            raise SchemaError(f"node {nid}: text must be a string")
        nodes[nid] = ArgumentNode(
            id=nid,
            parent_id=entry["parent"],
            stance=None if stance_raw is None else Stance(stance_raw),
            text=entry["text"],
            ref_target=entry["ref"],
        )

    tree = DebateTree(tree_id=doc["tree_id"], title=doc["title"], nodes=nodes)
    _raise_on_violations(tree)
    return tree


def _format_json(tree: DebateTree) -> str:
    doc = {
        "tree_id": tree.tree_id,
        "title": tree.title,
        "nodes": [
            {
                "id": n.id,
                "parent": n.parent_id,
                "stance": None if n.stance is None else n.stance.value,
                "text": n.text,
                "ref": n.ref_target,
            }
            for n in sorted(tree.nodes.values(), key=lambda n: n.id)
        ],
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


# --- Public operations -----------------------------------------------------


def load_tree(data: bytes, fmt: TreeFormat) -> DebateTree:
    """Parse a debate tree; the result always passes validate_tree."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(str(exc)) from None
    if fmt is TreeFormat.KIALO_EXPORT:
        return _parse_kialo(text)
    return _parse_json(text)


def save_tree(tree: DebateTree, fmt: TreeFormat) -> bytes:
    """Serialize deterministically; load_tree inverts it up to id normalization."""
    if fmt is TreeFormat.KIALO_EXPORT:
        return _format_kialo(tree).encode("utf-8")
    return _format_json(tree).encode("utf-8")


def _raise_on_violations(tree: DebateTree) -> None:
    violations = validate_tree(tree)
    if not violations:
        return
    v = violations[0]
    where = f" at node {v.node_id}" if v.node_id else ""
    if v.kind is ViolationKind.DANGLING_REFERENCE:
        raise DanglingReference(f"reference to missing node{where}")
    if v.kind is ViolationKind.MISSING_STANCE:
        raise MissingStancePrefix(f"stance rule violated{where}")
    raise SchemaError(f"{v.kind.value}{where}")


def validate_tree(tree: DebateTree) -> list[TreeViolation]:
    """Structural check; an empty result means all tree invariants hold."""
    violations: list[TreeViolation] = []
    roots = [n for n in tree.nodes.values() if n.parent_id is None]
    if len(roots) != 1:
        violations.append(
            TreeViolation(
                ViolationKind.MULTIPLE_ROOTS,
                roots[1].id if len(roots) > 1 else None,
            )
        )

    for node in sorted(tree.nodes.values(), key=lambda n: n.id):
        if node.parent_id is not None and node.parent_id not in tree.nodes:
            violations.append(TreeViolation(ViolationKind.ORPHAN, node.id))
        if (node.parent_id is None) != (node.stance is None):
            violations.append(TreeViolation(ViolationKind.MISSING_STANCE, node.id))
        if node.ref_target is not None and node.ref_target not in tree.nodes:
            violations.append(TreeViolation(ViolationKind.DANGLING_REFERENCE, node.id))
        if node.ref_target is None and not node.text.strip():
            violations.append(TreeViolation(ViolationKind.EMPTY_TEXT, node.id))

    # Parent chains must reach a root without revisiting a node.
    state: dict[str, int] = {}  # 1 = on current walk, 2 = known good
    for start in sorted(tree.nodes):
        if state.get(start) == 2:
            continue
        walk = []
        nid: str | None = start
        cyclic = False
        while nid is not None and nid in tree.nodes:
            if state.get(nid) == 2:
                break
            if state.get(nid) == 1:
                cyclic = True
                break
            state[nid] = 1
            walk.append(nid)
            nid = tree.nodes[nid].parent_id
        for w in walk:
            state[w] = 2
        if cyclic:
            violations.append(TreeViolation(ViolationKind.CYCLE, start))
    return violations


def resolve_references(tree: DebateTree) -> DebateTree:
    """Copy referenced text into each referring node; idempotent.

    Chains (a reference to a reference) resolve to the chain's final text;
    a chain that revisits a node raises ReferenceCycle.
    """
    resolved: dict[str, str] = {}

    def chase(nid: str) -> str:
        if nid in resolved:
            return resolved[nid]
        chain = []
        cur = nid
        seen = set()
        while True:
            if cur in seen:
                raise ReferenceCycle(f"reference cycle through node {cur}")
            seen.add(cur)
            chain.append(cur)
            node = tree.nodes[cur]
            if node.ref_target is None:
                text = node.text
                break
            if node.ref_target not in tree.nodes:
                raise DanglingReference(
                    f"node {cur} references missing node {node.ref_target}"
                )
            if node.ref_target in resolved:
                text = resolved[node.ref_target]
                break
            cur = node.ref_target
        for c in chain:
            resolved[c] = text
        return text

    new_nodes: dict[str, ArgumentNode] = {}
    for nid, node in tree.nodes.items():
        if node.ref_target is None:
            new_nodes[nid] = node
        else:
            new_nodes[nid] = replace(node, text=chase(nid), ref_target=None)
    return DebateTree(tree_id=tree.tree_id, title=tree.title, nodes=new_nodes)


def default_stopwords() -> frozenset[str]:
    return load_default_wordlist()


DEFAULT_ENGLISH_THRESHOLD = 0.12


def english_score(tree: DebateTree, stopwords: frozenset[str] | set[str]) -> float:
    """Fraction of lowercased tokens that are stopwords, over all node texts.

    A crude language filter: callers compare the score against a threshold
    (default 0.12) to keep English trees.
    """
    if not stopwords:
        raise ValueError("stopword set must be non-empty")
    cfg = TokenizerConfig(lowercase=True, punctuation_is_token=True)
    total = 0
    hits = 0
    for node in tree.nodes.values():
        for tok in tokenize(node.text, cfg):
            total += 1
            if tok in stopwords:
                hits += 1
    if total == 0:
        raise EmptyTree(f"tree {tree.tree_id!r} has no tokens")
    return hits / total
