"""Random query generation for verification and benchmarking.

Hit queries are cut out of corpus trees, so each one matches at least the
line it came from. Depth counts JSON value levels: ``{"a":1}`` and ``[1]``
have depth 2, ``{"a":{"b":1}}`` depth 3. KEY nodes are not counted.
"""

from __future__ import annotations

import random
from typing import Sequence

from .baseline import naive_search
from .ingest import Kind, Label, Node, iter_nodes, render, string_label, key_label


def _sample(rng: random.Random, node: Node, budget: int) -> Node:
    kind = node.label.kind
    if kind is Kind.OBJECT:
        if budget <= 1 or not node.children:
            return Node(node.label)
        k = rng.randint(1, min(3, len(node.children)))
        picks = sorted(rng.sample(range(len(node.children)), k))
        kids = []
        for i in picks:
            key = node.children[i]
            kids.append(Node(key.label, [_sample(rng, key.children[0], budget - 1)]))
        return Node(node.label, kids)
    if kind is Kind.ARRAY:
        if budget <= 1 or not node.children:
            return Node(node.label)
        k = rng.randint(1, min(3, len(node.children)))
        picks = sorted(rng.sample(range(len(node.children)), k))
        return Node(node.label, [_sample(rng, node.children[i], budget - 1) for i in picks])
    return Node(node.label)


def sample_query(rng: random.Random, tree: Node, min_depth: int = 2, max_depth: int = 4) -> Node | None:
    """Connected piece of ``tree`` rooted at a random non-empty container."""
    roots = [n for n in iter_nodes(tree)
             if n.label.kind in (Kind.OBJECT, Kind.ARRAY) and n.children]
    if not roots:
        return None
    root = rng.choice(roots)
    return _sample(rng, root, rng.randint(min_depth, max_depth))


def random_queries(trees: Sequence[Node], count: int, seed: int = 0,
                   min_depth: int = 2, max_depth: int = 4) -> list[str]:
    """``count`` hit queries as JSON text; each matches at least one tree."""
    rng = random.Random(seed)
    out: list[str] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * max(count, 1):
            raise ValueError("corpus has no non-empty containers to sample from")
        q = sample_query(rng, rng.choice(trees), min_depth, max_depth)
        if q is not None:
            out.append(render(q))
    return out


def _copy(node: Node) -> Node:
    return Node(node.label, [_copy(c) for c in node.children])


def _leaves(q: Node) -> list[Node]:
    return [n for n in iter_nodes(q) if not n.children]


def _absent(q: Node, tag: int) -> Node:
    q = _copy(q)
    leaf = random.Random(tag).choice(_leaves(q))
    if leaf.label.kind is Kind.OBJECT:
        leaf.children = [Node(key_label(f"~absent~{tag}"), [Node(string_label("x"))])]
    elif leaf.label.kind is Kind.ARRAY:
        leaf.children = [Node(string_label(f"~absent~{tag}"))]
    else:
        leaf.label = string_label(f"~absent~{tag}")
    return q


def _recombine(rng: random.Random, q: Node, scalars: list[Label]) -> Node:
    q = _copy(q)
    arrays = [n for n in iter_nodes(q) if n.label.kind is Kind.ARRAY and len(n.children) > 1]
    if arrays and rng.random() < 0.4:
        rng.choice(arrays).children.reverse()
        return q
    leaves = [n for n in _leaves(q) if n.label.kind not in (Kind.OBJECT, Kind.ARRAY)]
    if leaves:
        rng.choice(leaves).label = rng.choice(scalars)
    return q


def miss_queries(trees: Sequence[Node], hits: Sequence[str], count: int, seed: int = 0) -> list[str]:
    """Mutants of hit queries that match no tree (checked with ``naive_search``).

    Half swap in a label absent from the corpus; the rest recombine corpus
    labels (other scalar values, reversed arrays) and fall back to an absent
    label when the recombination still matches.
    """
    from .ingest import parse_query

    rng = random.Random(seed)
    scalars = sorted({n.label for t in trees for n in iter_nodes(t)
                      if not n.children and n.label.kind not in (Kind.OBJECT, Kind.ARRAY)})
    out: list[str] = []
    for i in range(count):
        q = parse_query(hits[rng.randrange(len(hits))])
        mutant = None
        if i % 2 and scalars:
            for _ in range(20):
                cand = _recombine(rng, q, scalars)
                if not naive_search(trees, cand):
                    mutant = cand
                    break
        if mutant is None:
            mutant = _absent(q, i)
        out.append(render(mutant))
    return out
