"""Merging per-line trees into a single merged tree.

Two trees merge top-down: equal root labels are fused, and every child of
the incoming node is bound to an existing child with the same label or
appended as a copied subtree. Leaf id lists are unioned.

Binding rules:

* Under OBJECT and KEY nodes an incoming child takes the first same-labeled
  child that has not already been taken during the same node merge. A tree
  with two equal siblings therefore keeps two nodes.
* Under ARRAY nodes binding preserves order. Each incoming element takes the
  first same-labeled child after the previous element's match. Once an element
  finds no such child, it and every later element are appended.

With these rules every source tree maps injectively and order-preservingly
into the merged tree, so membership of a tree id in a node's id list means
"this tree has a node here".
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyCorpus
from .ingest import Kind, Node, count_nodes

MergedTree = Node


def copy_tree(root: Node) -> Node:
    """Deep copy; id lists are copied too."""
    new_root = Node(root.label, (), list(root.ids) if root.ids is not None else None)
    stack = [(root, new_root)]
    while stack:
        src, dst = stack.pop()
        if src.children:
            kids = []
            for c in src.children:
                nc = Node(c.label, (), list(c.ids) if c.ids is not None else None)
                kids.append(nc)
                if c.children:
                    stack.append((c, nc))
            dst.children = kids
    return new_root


def _union_ids(a: list[int] | None, b: list[int]) -> list[int]:
    if not a:
        return list(b)
    if a[-1] < b[0]:
        a.extend(b)
        return a
    return sorted(set(a).union(b))


def _append_child(node: Node, child: Node) -> None:
    if type(node.children) is not list:
        node.children = list(node.children)
    node.children.append(child)


def _bind_unordered(existing: Sequence[Node], incoming: Sequence[Node]):
    if len(incoming) == 1:
        lab = incoming[0].label
        for c in existing:
            if c.label == lab:
                return [(c, incoming[0])], []
        return [], [incoming[0]]
    slots: dict = {}
    for i, c in enumerate(existing):
        slots.setdefault(c.label, []).append(i)
    used: dict = {}
    pairs, extra = [], []
    for y in incoming:
        lst = slots.get(y.label)
        u = used.get(y.label, 0)
        if lst is not None and u < len(lst):
            pairs.append((existing[lst[u]], y))
            used[y.label] = u + 1
        else:
            extra.append(y)
    return pairs, extra


def _bind_ordered(existing: Sequence[Node], incoming: Sequence[Node]):
    slots: dict = {}
    for i, c in enumerate(existing):
        slots.setdefault(c.label, []).append(i)
    pairs = []
    prev = -1
    for j, y in enumerate(incoming):
        lst = slots.get(y.label)
        if lst is not None:
            k = bisect_right(lst, prev)
            if k < len(lst):
                prev = lst[k]
                pairs.append((existing[prev], y))
                continue
        return pairs, list(incoming[j:])
    return pairs, []


def merge_recursive(node: Node, other: Node) -> None:
    """Fuse ``other`` into ``node`` (labels already known equal)."""
    work = [(node, other)]
    while work:
        a, b = work.pop()
        if b.ids:
            a.ids = _union_ids(a.ids, b.ids)
        if not b.children:
            continue
        if not a.children:
            a.children = [copy_tree(c) for c in b.children]
            continue
        if a.label.kind is Kind.ARRAY:
            pairs, extra = _bind_ordered(a.children, b.children)
        else:
            pairs, extra = _bind_unordered(a.children, b.children)
        for y in extra:
            _append_child(a, copy_tree(y))
        work.extend(pairs)


def merge_trees(t: MergedTree | None, t2: MergedTree | None) -> MergedTree | None:
    """Merge ``t2`` into ``t`` (``t`` is modified; ``t2`` is left intact)."""
    if t2 is None:
        return t
    if t is None:
        return copy_tree(t2)
    if t.label != t2.label:
        _append_child(t, copy_tree(t2))
    else:
        merge_recursive(t, t2)
    return t


def sort_unordered_children(root: Node) -> Node:
    """Stably order children of OBJECT and KEY nodes by label, in place."""
    stack = [root]
    while stack:
        node = stack.pop()
        kids = node.children
        if not kids:
            continue
        if node.label.kind is not Kind.ARRAY and len(kids) > 1:
            kids.sort(key=lambda c: c.label)
        stack.extend(kids)
    return root


def merge_all(trees: Sequence[Node], copy_inputs: bool = True) -> MergedTree:
    """Balanced pairwise merging: (1,2),(3,4),... per level, odd tree promoted.

    Input trees stay intact when ``copy_inputs`` is set. Children of OBJECT
    and KEY nodes of the result are ordered by label.
    """
    if not trees:
        raise EmptyCorpus("cannot merge an empty corpus")
    level = list(trees)
    owned = [not copy_inputs] * len(level)
    while len(level) > 1:
        nxt, nxt_owned = [], []
        for i in range(0, len(level) - 1, 2):
            left = level[i] if owned[i] else copy_tree(level[i])
            nxt.append(merge_trees(left, level[i + 1]))
            nxt_owned.append(True)
        if len(level) % 2:
            nxt.append(level[-1])
            nxt_owned.append(owned[-1])
        level, owned = nxt, nxt_owned
    root = level[0] if owned[0] else copy_tree(level[0])
    return sort_unordered_children(root)


def merge_stream(trees: Iterable[Node]) -> MergedTree:
    """Same pairing schedule as ``merge_all`` but consumes trees one at a time.

    A stack of partial results indexed by level keeps at most log2(N) trees
    alive. Input trees are consumed (modified) rather than copied.
    """
    stack: list[tuple[int, Node]] = []
    for tree in trees:
        level, cur = 0, tree
        while stack and stack[-1][0] == level:
            _, left = stack.pop()
            cur = merge_trees(left, cur)
            level += 1
        stack.append((level, cur))
    if not stack:
        raise EmptyCorpus("cannot merge an empty corpus")
    _, cur = stack.pop()
    while stack:
        _, left = stack.pop()
        cur = merge_trees(left, cur)
    return sort_unordered_children(cur)


@dataclass
class MergeStats:
    n_trees: int
    mt_size: int
    total_size: int

    @property
    def ratio(self) -> float:
        """|MT| divided by the summed size of the input trees."""
        return self.mt_size / self.total_size if self.total_size else 1.0


def merge_stats(mt: MergedTree, corpus: Iterable[Node]) -> MergeStats:
    sizes = [count_nodes(t) for t in corpus]
    return MergeStats(len(sizes), count_nodes(mt), sum(sizes))
