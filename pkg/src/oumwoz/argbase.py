"""Argument bases: debate-tree ingestion, stance propagation and persistence.

A debate tree annotates each node pro/con relative to its PARENT. The
platform wants stances relative to the TOPIC (the root claim), computed
top-down: a pro child keeps its parent's topic stance, a con child flips it.
Flat augmentation lists (already topic-stanced) can be merged in afterwards.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
from dataclasses import dataclass, field, replace

from .errors import DuplicateId, IoError, MalformedInput, SchemaVersionMismatch

BASE_SCHEMA_VERSION = 1

PRO = "pro"
CON = "con"
_STANCES = (PRO, CON)


def _now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


@dataclass
class ArgumentTreeNode:
    """One node of a debate tree; local_stance is relative to the parent (root: None)."""

    text: str
    local_stance: str | None = None
    children: list[ArgumentTreeNode] = field(default_factory=list)
    id: str | None = None


@dataclass(frozen=True)
class ArgumentRecord:
    """A retrievable argument with its stance relative to the topic."""

    id: str
    topic_id: str
    text: str
    topic_stance: str
    depth: int
    source: str  # "tree" | "augmented"
    path: tuple[str, ...]  # ancestor ids, root first


@dataclass
class ArgumentBase:
    topic_id: str
    topic_text: str
    records: list[ArgumentRecord]
    created_at: str = field(default_factory=_now_iso, compare=False)

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise DuplicateId("argument base contains duplicate record ids")
        for r in self.records:
            if r.topic_id != self.topic_id:
                raise MalformedInput(
                    f"record {r.id} belongs to topic {r.topic_id!r}, base is {self.topic_id!r}"
                )

    def ids(self) -> set[str]:
        return {r.id for r in self.records}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_tree(data: bytes | str, format: str) -> ArgumentTreeNode:
    """Parse a debate tree from 'json_tree' or 'indented_text' input."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"input is not valid UTF-8: {exc}") from exc
    if format == "json_tree":
        root = _parse_json_tree(data)
    elif format == "indented_text":
        root = _parse_indented(data)
    else:
        raise MalformedInput(f"unknown tree format {format!r}")
    _assign_ids(root)
    _check_unique_ids(root)
    return root


def _parse_json_tree(text: str) -> ArgumentTreeNode:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc.msg}", line=exc.lineno, position=exc.colno)
    return _json_node(obj, is_root=True, where="root")


def _json_node(obj, is_root: bool, where: str) -> ArgumentTreeNode:
    if not isinstance(obj, dict):
        raise MalformedInput(f"{where}: expected an object, got {type(obj).__name__}")
    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise MalformedInput(f"{where}: missing or empty 'text'")
    stance = obj.get("stance")
    if is_root:
        if stance is not None:
            raise MalformedInput("root node must not carry a stance")
    else:
        if stance not in _STANCES:
            raise MalformedInput(f"{where}: stance must be 'pro' or 'con', got {stance!r}")
    children = obj.get("children", [])
    if not isinstance(children, list):
        raise MalformedInput(f"{where}: 'children' must be a list")
    node = ArgumentTreeNode(text=text.strip(), local_stance=stance, id=obj.get("id"))
    node.children = [
        _json_node(ch, is_root=False, where=f"{where}.children[{i}]")
        for i, ch in enumerate(children)
    ]
    return node


def _parse_indented(text: str) -> ArgumentTreeNode:
    lines = [ln for ln in text.splitlines()]
    entries = []  # (lineno, depth, stance, text)
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        depth = len(raw) - len(raw.lstrip("\t"))
        body = raw.strip()
        entries.append((lineno, depth, body))
    if not entries:
        raise MalformedInput("empty input")

    lineno, depth, body = entries[0]
    if depth != 0:
        raise MalformedInput("first line (the topic) must not be indented", line=lineno)
    root = ArgumentTreeNode(text=body)
    stack = [(0, root)]  # (depth, node); node depth = tab count of its line

    for lineno, depth, body in entries[1:]:
        lower = body.lower()
        if lower.startswith("pro:"):
            stance, text_part = PRO, body[4:].strip()
        elif lower.startswith("con:"):
            stance, text_part = CON, body[4:].strip()
        else:
            raise MalformedInput(
                "non-root line must start with 'Pro:' or 'Con:'", line=lineno
            )
        if not text_part:
            raise MalformedInput("empty argument text", line=lineno)
        if depth < 1:
            raise MalformedInput("argument line must be indented under the topic", line=lineno)
        while stack and stack[-1][0] >= depth:
            stack.pop()
        if not stack or stack[-1][0] != depth - 1:
            raise MalformedInput(
                f"bad nesting: depth jumps from {stack[-1][0] if stack else '?'} to {depth}",
                line=lineno,
            )
        node = ArgumentTreeNode(text=text_part, local_stance=stance)
        stack[-1][1].children.append(node)
        stack.append((depth, node))
    return root


def _assign_ids(root: ArgumentTreeNode) -> None:
    if root.id is None:
        root.id = "0"

    def walk(node: ArgumentTreeNode, prefix: str):
        for i, child in enumerate(node.children, start=1):
            if child.id is None:
                child.id = f"{prefix}{i}"
            walk(child, f"{child.id}.")

    walk(root, "")


def _check_unique_ids(root: ArgumentTreeNode) -> None:
    seen = set()

    def walk(node):
        if node.id in seen:
            raise DuplicateId(f"duplicate node id {node.id!r}")
        seen.add(node.id)
        for ch in node.children:
            walk(ch)

    walk(root)


def serialize_tree(root: ArgumentTreeNode, format: str) -> str:
    """Inverse of parse_tree (structure and texts; generated ids are dropped)."""
    if format == "json_tree":

        def enc(node, is_root):
            out = {"text": node.text}
            if not is_root:
                out["stance"] = node.local_stance
            out["children"] = [enc(ch, False) for ch in node.children]
            return out

        return json.dumps(enc(root, True), ensure_ascii=False, indent=2)
    if format == "indented_text":
        lines = [root.text]

        def walk(node, depth):
            for ch in node.children:
                lines.append("\t" * depth + f"{ch.local_stance.capitalize()}: {ch.text}")
                walk(ch, depth + 1)

        walk(root, 1)
        return "\n".join(lines) + "\n"
    raise MalformedInput(f"unknown tree format {format!r}")


# ---------------------------------------------------------------------------
# Stance propagation
# ---------------------------------------------------------------------------


def propagate_stances(tree: ArgumentTreeNode, topic_id: str | None = None) -> list[ArgumentRecord]:
    """One record per non-root node, stance computed relative to the topic.

    Pro children inherit the parent's topic stance; con children flip it
    (equivalently: pro iff the con-edge count on the root path is even).
    Iterative pre-order walk, so tree depth is not bounded by the recursion
    limit.
    """
    if topic_id is None:
        topic_id = tree.id or "0"
    records: list[ArgumentRecord] = []
    append = records.append
    # Stack of (node, its topic stance or None for the root, depth, path).
    root_path = (tree.id,)
    stack = [(child, None, 1, root_path) for child in reversed(tree.children)]
    while stack:
        child, parent_stance, depth, path = stack.pop()
        local = child.local_stance
        if local is not PRO and local is not CON and local not in _STANCES:
            raise MalformedInput(f"node {child.id!r} lacks a pro/con stance")
        if parent_stance is None:
            stance = local
        elif local == PRO:
            stance = parent_stance
        else:
            stance = PRO if parent_stance == CON else CON
        append(
            ArgumentRecord(
                id=child.id,
                topic_id=topic_id,
                text=child.text,
                topic_stance=stance,
                depth=depth,
                source="tree",
                path=path,
            )
        )
        if child.children:
            child_path = path + (child.id,)
            child_depth = depth + 1
            for grandchild in reversed(child.children):
                stack.append((grandchild, stance, child_depth, child_path))
    return records


def base_from_tree(tree: ArgumentTreeNode, topic_id: str | None = None) -> ArgumentBase:
    if topic_id is None:
        topic_id = tree.id or "0"
    records = propagate_stances(tree, topic_id=topic_id)
    return ArgumentBase(topic_id=topic_id, topic_text=tree.text, records=records)


# ---------------------------------------------------------------------------
# Augmentation merge
# ---------------------------------------------------------------------------


def merge_augmented(base: ArgumentBase, extra) -> ArgumentBase:
    """Append flat, already-stanced arguments as depth-1 records.

    Items are (text, topic_stance) or (text, topic_stance, source_tag) tuples,
    or dicts with text/topic_stance and optional id/source_tag. Generated ids
    never collide; explicit ids that collide raise DuplicateId.
    """
    existing = base.ids()
    root_id = base.records[0].path[0] if base.records else base.topic_id
    new_records = list(base.records)
    counters: dict[str, int] = {}
    for item in extra:
        if isinstance(item, dict):
            text = item["text"]
            stance = item["topic_stance"]
            tag = item.get("source_tag") or "aug"
            explicit_id = item.get("id")
        else:
            text, stance, *rest = item
            tag = rest[0] if rest else "aug"
            explicit_id = None
        if stance not in _STANCES:
            raise MalformedInput(f"augmented argument has stance {stance!r}, need pro/con")
        if not text or not str(text).strip():
            raise MalformedInput("augmented argument has empty text")
        if explicit_id is not None:
            if explicit_id in existing:
                raise DuplicateId(f"augmented id {explicit_id!r} collides with an existing record")
            new_id = explicit_id
        else:
            counters[tag] = counters.get(tag, 0) + 1
            new_id = f"{tag}-{counters[tag]}"
            while new_id in existing:
                counters[tag] += 1
                new_id = f"{tag}-{counters[tag]}"
        existing.add(new_id)
        new_records.append(
            ArgumentRecord(
                id=new_id,
                topic_id=base.topic_id,
                text=str(text).strip(),
                topic_stance=stance,
                depth=1,
                source="augmented",
                path=(root_id,),
            )
        )
    return replace(base, records=new_records)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def save_base(base: ArgumentBase, path) -> None:
    """Atomic write of the single-topic argument base file."""
    doc = {
        "schema_version": BASE_SCHEMA_VERSION,
        "topic_id": base.topic_id,
        "topic_text": base.topic_text,
        "records": [
            {
                "id": r.id,
                "text": r.text,
                "topic_stance": r.topic_stance,
                "depth": r.depth,
                "source": r.source,
                "path": list(r.path),
            }
            for r in base.records
        ],
    }
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write argument base {path}: {exc}") from exc


def load_base(path) -> ArgumentBase:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read argument base {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"argument base {path} is corrupt: {exc.msg}") from exc
    version = doc.get("schema_version")
    if version != BASE_SCHEMA_VERSION:
        raise SchemaVersionMismatch(BASE_SCHEMA_VERSION, version)
    try:
        records = [
            ArgumentRecord(
                id=r["id"],
                topic_id=doc["topic_id"],
                text=r["text"],
                topic_stance=r["topic_stance"],
                depth=r["depth"],
                source=r["source"],
                path=tuple(r["path"]),
            )
            for r in doc["records"]
        ]
        return ArgumentBase(topic_id=doc["topic_id"], topic_text=doc["topic_text"], records=records)
    except KeyError as exc:
        raise IoError(f"argument base {path} is missing field {exc}") from exc
