"""Reference search implementations.

``naive_search`` checks every corpus tree on its own. ``mt_search`` walks
the merged tree: it collects candidate nodes carrying the query root label,
matches the query below each candidate, and intersects the leaf id sets it
collected.

Matching semantics shared by all searches: a query node maps to a data node
with the same label; object children map independently (unordered, several
query children may use the same data child); array children map to a
strictly increasing, not necessarily contiguous, run of data children. A
query leaf matches any data node with its label, so ``{}`` matches any
object.
"""

from __future__ import annotations

from typing import Sequence

from .ingest import Kind, Node

NO_MATCH = None


def tree_id(tree: Node) -> int:
    """Line id of a freshly parsed corpus tree (read from its first leaf)."""
    node = tree
    while node.children:
        node = node.children[0]
    if not node.ids:
        raise ValueError("tree carries no ids")
    return node.ids[0]


def embeds(data: Node, query: Node) -> bool:
    """True when ``query`` embeds into ``data`` with the roots mapped together."""
    if data.label != query.label:
        return False
    if not query.children:
        return True
    if not data.children:
        return False
    if query.label.kind is Kind.ARRAY:
        rest = iter(data.children)
        # greedy leftmost matching is optimal for subsequence embedding
        return all(any(embeds(d, q) for d in rest) for q in query.children)
    return all(any(embeds(d, q) for d in data.children) for q in query.children)


def naive_search(corpus: Sequence[Node], query: Node) -> list[int]:
    """Ids of corpus trees containing ``query`` at any node."""
    label = query.label
    hits = []
    for tree in corpus:
        stack = [tree]
        while stack:
            node = stack.pop()
            if node.label == label and embeds(node, query):
                hits.append(tree_id(tree))
                break
            if node.children:
                stack.extend(node.children)
    return sorted(set(hits))


def find_candidates(mt: Node, label) -> list[Node]:
    """All nodes of ``mt`` with ``label``, in preorder."""
    out = []
    stack = [mt]
    while stack:
        node = stack.pop()
        if node.label == label:
            out.append(node)
        if node.children:
            stack.extend(reversed(node.children))
    return out


def subtree_ids(node: Node) -> set[int]:
    ids: set[int] = set()
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.ids:
            ids.update(cur.ids)
        if cur.children:
            stack.extend(cur.children)
    return ids


def _label_sorted(children):
    for a, b in zip(children, children[1:]):
        if b.label < a.label:
            return sorted(children, key=lambda c: c.label)
    return children


def _intersect_all(sets: list[set[int]]) -> set[int]:
    if not sets:
        return set()
    out = set(sets[0])
    for s in sets[1:]:
        out &= s
        if not out:
            break
    return out


def match_subtree(mt_node: Node, q_node: Node):
    """Id sets, one per query leaf, for a match of ``q_node`` at ``mt_node``.

    Returns ``NO_MATCH`` (None) when the structure cannot match at all.
    Labels of the two nodes are assumed equal.
    """
    if not q_node.children:
        if not mt_node.children:
            return [set(mt_node.ids or ())]
        return [subtree_ids(mt_node)]
    if not mt_node.children:
        return NO_MATCH
    if q_node.label.kind is Kind.ARRAY:
        return _match_array(mt_node.children, q_node.children)
    # merge-join over label-sorted children
    mt_kids = _label_sorted(mt_node.children)
    q_kids = sorted(q_node.children, key=lambda c: c.label)
    collected: list[set[int]] = []
    j = 0
    for qc in q_kids:
        lab = qc.label
        while j < len(mt_kids) and mt_kids[j].label < lab:
            j += 1
        k = j
        results = []
        while k < len(mt_kids) and mt_kids[k].label == lab:
            r = match_subtree(mt_kids[k], qc)
            if r is not NO_MATCH:
                results.append(r)
            k += 1
        if not results:
            return NO_MATCH
        if len(results) == 1:
            collected.extend(results[0])
        else:
            # each source tree maps to at most one of these siblings
            merged: set[int] = set()
            for r in results:
                merged |= _intersect_all(r)
            collected.append(merged)
    return collected


def _match_array(mt_kids, q_kids):
    """Ids whose array holds the query elements at increasing child positions.

    Per id, keep the earliest position where the elements placed so far fit;
    since each source array sits injectively and in order among the merged
    children, this is exact.
    """
    reach: dict[int, int] | None = None
    for q in q_kids:
        nxt: dict[int, int] = {}
        for pos, kid in enumerate(mt_kids):
            if kid.label != q.label:
                continue
            r = match_subtree(kid, q)
            if r is NO_MATCH:
                continue
            for i in _intersect_all(r):
                if i in nxt:
                    continue
                if reach is None or reach.get(i, len(mt_kids)) < pos:
                    nxt[i] = pos
        if not nxt:
            return NO_MATCH
        reach = nxt
    return [set(reach)]


def mt_search(mt: Node, query: Node) -> list[int]:
    """Search the merged tree: candidates, per-candidate matching, intersection."""
    result: set[int] = set()
    for cand in find_candidates(mt, query.label):
        sets = match_subtree(cand, query)
        if sets is NO_MATCH:
            continue
        result |= _intersect_all(sets)
    return sorted(result)
