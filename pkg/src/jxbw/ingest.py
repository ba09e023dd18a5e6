"""JSON lines to labeled trees, symbol tables and normalized trees.

A JSON value maps to a tree as follows: an object becomes an OBJECT node
with one KEY child per member (in source order), and each KEY node has the
member value as its single child. An array becomes an ARRAY node whose
children are its elements in order. Scalars become leaves. Leaves of a
corpus tree carry the set of line numbers they came from.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import MalformedJSON, NotAnObject, UnknownLabel


class Kind(IntEnum):
    OBJECT = 0
    ARRAY = 1
    KEY = 2
    STRING = 3
    NUMBER = 4
    TRUE = 5
    FALSE = 6
    NULL = 7


CONTAINER_KINDS = (Kind.OBJECT, Kind.ARRAY)


class Label(NamedTuple):
    """Typed node label; tuples order by kind first, then by text."""

    kind: Kind
    text: str = ""

    def __repr__(self) -> str:
        if self.text or self.kind in (Kind.KEY, Kind.STRING):
            return f"{self.kind.name}({self.text!r})"
        return self.kind.name


OBJECT = Label(Kind.OBJECT)
ARRAY = Label(Kind.ARRAY)
TRUE = Label(Kind.TRUE)
FALSE = Label(Kind.FALSE)
NULL = Label(Kind.NULL)

_INTERN: dict[tuple, Label] = {}
_INTERN_CAP = 1 << 20


def _label(kind: Kind, text: str) -> Label:
    key = (kind, text)
    lab = _INTERN.get(key)
    if lab is None:
        if len(_INTERN) >= _INTERN_CAP:
            _INTERN.clear()
        lab = _INTERN[key] = Label(kind, text)
    return lab


def key_label(name: str) -> Label:
    return _label(Kind.KEY, name)


def string_label(text: str) -> Label:
    return _label(Kind.STRING, text)


def number_label(value: int | float) -> Label:
    return _label(Kind.NUMBER, canonical_number(value))


def canonical_number(value: int | float) -> str:
    """Shortest round-trip text, shared by numerically equal ints and floats."""
    if isinstance(value, int):
        if abs(value) < 2**53:
            return str(value)
        try:
            f = float(value)
        except OverflowError:
            return str(value)
        return repr(f) if int(f) == value else str(value)
    if math.isfinite(value) and value.is_integer():
        if abs(value) < 2**53:
            return str(int(value))
    return repr(value)


class Node:
    """Tree node. ``children`` is a list (or the shared empty tuple for leaves);
    ``ids`` is a sorted list of tree identifiers or None."""

    __slots__ = ("label", "children", "ids")

    def __init__(self, label: Label, children=(), ids: list[int] | None = None):
        self.label = label
        self.children = children
        self.ids = ids

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __repr__(self) -> str:
        return f"Node({self.label!r}, {len(self.children)} children, ids={self.ids})"


# Aliases used in signatures: all three are plain node trees.
JsonTree = Node
QueryTree = Node


class _Pairs(list):
    """Marks a decoded JSON object (list of key/value pairs, duplicates kept)."""


def _reject_constant(name: str):
    raise ValueError(f"non-standard JSON constant {name}")


_decoder = json.JSONDecoder(object_pairs_hook=_Pairs, parse_constant=_reject_constant)


def _decode(text: str, line_no: int | None):
    text = text.strip()
    try:
        value, end = _decoder.raw_decode(text)
    except json.JSONDecodeError as exc:
        raise MalformedJSON(exc.msg, line_no, exc.pos) from None
    except (ValueError, RecursionError) as exc:
        raise MalformedJSON(str(exc), line_no) from None
    if end != len(text):
        raise MalformedJSON("extra data after JSON value", line_no, end)
    return value


def _scalar_label(v) -> Label:
    if isinstance(v, str):
        return string_label(v)
    if v is True:
        return TRUE
    if v is False:
        return FALSE
    if v is None:
        return NULL
    return number_label(v)


def value_to_tree(value, tree_id: int | None = None) -> Node:
    """Build a tree from an already decoded value (objects as ``_Pairs`` or dict)."""
    root = Node(NULL)
    stack = [(root, value)]
    while stack:
        node, v = stack.pop()
        if isinstance(v, (_Pairs, dict)):
            node.label = OBJECT
            items = v if isinstance(v, _Pairs) else list(v.items())
            kids = []
            for k, sub in items:
                child = Node(NULL)
                kids.append(Node(key_label(k), [child]))
                stack.append((child, sub))
        elif isinstance(v, list):
            node.label = ARRAY
            kids = []
            for sub in v:
                child = Node(NULL)
                kids.append(child)
                stack.append((child, sub))
        else:
            node.label = _scalar_label(v)
            kids = None
        if kids:
            node.children = kids
        elif tree_id is not None:
            node.ids = [tree_id]
    return root


def parse_jsonl_line(text: str, line_no: int) -> JsonTree:
    """Parse one corpus line; every leaf gets ``ids == [line_no]``."""
    if line_no < 1:
        raise ValueError("line numbers start at 1")
    value = _decode(text, line_no)
    if not isinstance(value, _Pairs):
        raise NotAnObject(f"line {line_no}: top-level value is not a JSON object")
    return value_to_tree(value, line_no)


def parse_query(text: str) -> QueryTree:
    """Parse a query; any JSON value is accepted and leaves carry no ids."""
    return value_to_tree(_decode(text, None))


def iter_jsonl(lines: Iterable[str]) -> Iterator[tuple[int, str]]:
    """Yield (line_no, text) for non-blank lines; numbering counts blank lines."""
    for no, raw in enumerate(lines, start=1):
        text = raw.rstrip("\r\n")
        if text.strip():
            yield no, text


def parse_jsonl(lines: Iterable[str]) -> list[JsonTree]:
    return [parse_jsonl_line(text, no) for no, text in iter_jsonl(lines)]


def read_jsonl(path) -> list[JsonTree]:
    with open(path, encoding="utf-8") as fh:
        return parse_jsonl(fh)


def iter_nodes(root: Node) -> Iterator[Node]:
    """Preorder traversal."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if node.children:
            stack.extend(reversed(node.children))


def count_nodes(root: Node | None) -> int:
    if root is None:
        return 0
    n = 0
    stack = [root]
    while stack:
        node = stack.pop()
        n += 1
        if node.children:
            stack.extend(node.children)
    return n


def tree_depth(root: Node) -> int:
    best = 0
    stack = [(root, 1)]
    while stack:
        node, d = stack.pop()
        best = max(best, d)
        for c in node.children:
            stack.append((c, d + 1))
    return best


def render(node: Node) -> str:
    """Serialize a tree back to compact JSON text."""
    out: list[str] = []
    stack: list = [node]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        kind = item.label.kind
        if kind is Kind.OBJECT:
            parts: list = ["{"]
            for i, key in enumerate(item.children):
                if i:
                    parts.append(",")
                parts.append(json.dumps(key.label.text, ensure_ascii=False) + ":")
                parts.append(key.children[0])
            parts.append("}")
            stack.extend(reversed(parts))
        elif kind is Kind.ARRAY:
            parts = ["["]
            for i, el in enumerate(item.children):
                if i:
                    parts.append(",")
                parts.append(el)
            parts.append("]")
            stack.extend(reversed(parts))
        elif kind is Kind.STRING:
            out.append(json.dumps(item.label.text, ensure_ascii=False))
        elif kind is Kind.NUMBER:
            text = item.label.text
            out.append({"inf": "1e999", "-inf": "-1e999"}.get(text, text))
        elif kind is Kind.KEY:
            raise ValueError("a KEY node cannot be rendered on its own")
        else:
            out.append(kind.name.lower())
    return "".join(out)


def same_tree(a: Node, b: Node, with_ids: bool = True) -> bool:
    """Ordered structural equality (labels, child order, optionally ids)."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x.label != y.label or len(x.children) != len(y.children):
            return False
        if with_ids and (x.ids or None) != (y.ids or None):
            return False
        stack.extend(zip(x.children, y.children))
    return True


class SymbolTable:
    """Bijection between labels and symbols 1..sigma.

    ``build_symbol_table`` assigns symbols in label order. The constructor
    accepts any ordering, which fixtures use to pin a particular assignment.
    """

    def __init__(self, labels: Sequence[Label] = ()):
        self._labels: list[Label] = list(labels)
        self._index = {lab: i for i, lab in enumerate(self._labels, start=1)}
        if len(self._index) != len(self._labels):
            raise ValueError("duplicate label in symbol table")

    @property
    def sigma(self) -> int:
        return len(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __contains__(self, label) -> bool:
        return label in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolTable) and self._labels == other._labels

    def get(self, label: Label) -> int | None:
        return self._index.get(label)

    def symbol(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"label {label!r} is not in the symbol table") from None

    def label(self, symbol: int) -> Label:
        if not 1 <= symbol <= len(self._labels):
            raise UnknownLabel(f"symbol {symbol} is not in the symbol table")
        return self._labels[symbol - 1]

    @property
    def labels(self) -> list[Label]:
        return list(self._labels)

    def is_label_ordered(self) -> bool:
        return all(a < b for a, b in zip(self._labels, self._labels[1:]))


def build_symbol_table(trees: Iterable[Node]) -> SymbolTable:
    seen: set[Label] = set()
    for tree in trees:
        if tree is None:
            continue
        for node in iter_nodes(tree):
            seen.add(node.label)
    return SymbolTable(sorted(seen))


@dataclass
class NormalizedTree:
    """Symbol-labeled tree stored as preorder arrays.

    ``ids[i]`` is the id list of node ``i`` when it is a leaf, else None.
    ``sentinel`` is the symbol used for end-marker leaves (see ``normalize``),
    or 0 when the tree has none.
    """

    symbols: np.ndarray
    parents: np.ndarray
    ids: list
    sentinel: int = 0

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def from_nested(cls, nested, sentinel: int = 0) -> "NormalizedTree":
        """Build from ``(symbol, ids, [children...])`` tuples; ids may be None."""
        syms, pars, ids = [], [], []
        stack = [(nested, -1)]
        while stack:
            (sym, node_ids, kids), parent = stack.pop()
            idx = len(syms)
            syms.append(sym)
            pars.append(parent)
            ids.append(sorted(node_ids) if node_ids is not None and not kids else None)
            for child in reversed(kids or []):
                stack.append((child, idx))
        return cls(np.asarray(syms, dtype=np.int64), np.asarray(pars, dtype=np.int64),
                   ids, sentinel)

    def children_lists(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(len(self.symbols))]
        for i, p in enumerate(self.parents.tolist()):
            if p >= 0:
                kids[p].append(i)
        return kids


def normalize(tree: Node, table: SymbolTable) -> NormalizedTree:
    """Replace labels by symbols and order children for indexing.

    Children of OBJECT and KEY nodes are stably sorted by symbol. ARRAY
    children keep their order, since element order is part of the data.
    A container that is a leaf, or that carries ids of its own (an empty
    container in some source line), gets an end-marker leaf child holding
    those ids. The end marker uses symbol ``sigma + 1``. After this, every
    container or KEY symbol labels internal nodes only and every scalar
    symbol labels leaves only.
    """
    sentinel = table.sigma + 1
    index = table._index
    syms: list[int] = []
    pars: list[int] = []
    ids: list = []
    stack: list = [(tree, -1, None)]
    while stack:
        node, parent, marker_ids = stack.pop()
        pos = len(syms)
        pars.append(parent)
        if node is None:
            syms.append(sentinel)
            ids.append(marker_ids)
            continue
        label = node.label
        sym = index.get(label)
        if sym is None:
            raise UnknownLabel(f"label {label!r} is not in the symbol table")
        syms.append(sym)
        kids = node.children
        is_container = label.kind is Kind.OBJECT or label.kind is Kind.ARRAY
        needs_marker = is_container and (node.ids or not kids)
        if not kids and not needs_marker:
            ids.append(list(node.ids) if node.ids else [])
            continue
        ids.append(None)
        if needs_marker:
            stack.append((None, pos, list(node.ids) if node.ids else []))
        if kids:
            if label.kind is not Kind.ARRAY and len(kids) > 1:
                try:
                    kids = sorted(kids, key=lambda c: index[c.label])
                except KeyError as exc:
                    raise UnknownLabel(f"label {exc.args[0]!r} is not in the symbol table") from None
            for child in reversed(kids):
                stack.append((child, pos, None))
    return NormalizedTree(np.asarray(syms, dtype=np.int64), np.asarray(pars, dtype=np.int64),
                          ids, sentinel)
