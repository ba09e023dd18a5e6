"""Three-step substructure search over an XBW index.

1. Split the query into root-to-leaf symbol paths and locate where each
   path ends in the index.
2. Walk each end position up ``len(path) - 1`` levels to get candidate
   roots, and keep the roots shared by all paths.
3. At each surviving root collect tree ids. Queries without arrays follow
   each path downward and intersect the per-path id sets. Queries with
   arrays are matched structurally, which enforces element order; so is
   every query on an index whose data repeats a key within one object. The
   answer is the union over roots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _bits as B
from . import _nav as N
from .errors import UnknownLabel
from .ingest import Kind, Node, SymbolTable
from .xbw import XbwIndex

NO_MATCH = None
_EMPTY = np.empty(0, dtype=np.int64)


class QNode:
    """Query node with its label replaced by a symbol."""

    __slots__ = ("sym", "is_array", "children")

    def __init__(self, sym: int, is_array: bool, children: list["QNode"]):
        self.sym = sym
        self.is_array = is_array
        self.children = children


def to_symbols(query: Node, symtab: SymbolTable) -> QNode:
    """Translate a query tree; raises UnknownLabel for labels outside the table."""
    root = QNode(symtab.symbol(query.label), query.label.kind is Kind.ARRAY, [])
    stack = [(query, root)]
    while stack:
        src, dst = stack.pop()
        for c in src.children:
            q = QNode(symtab.symbol(c.label), c.label.kind is Kind.ARRAY, [])
            dst.children.append(q)
            stack.append((c, q))
    return root


def has_array(q: QNode) -> bool:
    stack = [q]
    while stack:
        node = stack.pop()
        if node.is_array:
            return True
        stack.extend(node.children)
    return False


@dataclass
class QueryPaths:
    paths: list[tuple[int, ...]]

    @property
    def p(self) -> int:
        return len(self.paths)

    @property
    def depths(self) -> list[int]:
        return [len(x) for x in self.paths]


@dataclass
class QueryStats:
    p: int = 0
    r: int = 0
    c: int = 0
    d_avg: float = 0.0
    b_est: float = 0.0
    route: str = ""
    _expansions: int = field(default=0, repr=False)
    _branches: int = field(default=0, repr=False)

    def note_branching(self, count: int) -> None:
        self._expansions += 1
        self._branches += count
        self.b_est = self._branches / self._expansions

    def as_dict(self) -> dict:
        return {"p": self.p, "r": self.r, "c": self.c, "d_avg": self.d_avg,
                "b_est": self.b_est, "route": self.route}


def _paths_of(q: QNode) -> list[tuple[int, ...]]:
    out = []
    stack = [(q, (q.sym,))]
    while stack:
        node, prefix = stack.pop()
        if not node.children:
            out.append(prefix)
            continue
        for c in reversed(node.children):
            stack.append((c, prefix + (c.sym,)))
    return out


def decompose_paths(query: Node | QNode, symtab: SymbolTable | None = None) -> QueryPaths:
    """One symbol path per query leaf, in preorder."""
    q = query if isinstance(query, QNode) else to_symbols(query, symtab)
    return QueryPaths(_paths_of(q))


def intersect_all(sets: list[np.ndarray]) -> np.ndarray:
    if not sets:
        return _EMPTY
    out = sets[0]
    for s in sets[1:]:
        if out.size == 0:
            break
        out = B.intersect_sorted(out, s)
    return out


def union_all(sets: list[np.ndarray]) -> np.ndarray:
    if not sets:
        return _EMPTY
    if len(sets) == 1:
        return sets[0]
    if len(sets) == 2:
        return B.union_sorted(sets[0], sets[1])
    return np.unique(np.concatenate(sets))


def comp_ancestors(index: XbwIndex, path, hit=None) -> np.ndarray:
    """Distinct nodes ``len(path) - 1`` levels above each end of ``path``."""
    p = np.asarray(path, dtype=np.int64)
    if hit is None:
        hit = N.locate_path(index.ix, p)
    first, _, k_lo, k_hi = hit
    if first == 0:
        return _EMPTY
    return N.ancestors(index.ix, p[-1], k_lo, k_hi, p.size - 1)


def collect_path_matching_ids(index: XbwIndex, root_pos: int, paths, stats: QueryStats | None = None):
    """Per-path id sets below ``root_pos``; NO_MATCH as soon as a path has none.

    ``root_pos`` already carries each path's first symbol, so descent starts
    at the second symbol.
    """
    out = []
    for path in paths:
        p = np.asarray(path, dtype=np.int64)
        reached = N.descend(index.ix, root_pos, p)
        if stats is not None and p.size > 1:
            stats.note_branching(reached.size)
        if reached.size == 0:
            return NO_MATCH
        ids = N.gather_ids(index.ix, index.id_offsets, index.id_values, reached)
        if ids.size == 0:
            return NO_MATCH
        out.append(ids)
    return out


class StructMatcher:
    """Structural matching with array order, memoized per (position, query node)."""

    def __init__(self, index: XbwIndex, stats: QueryStats | None = None):
        self.index = index
        self.ix = index.ix
        self.stats = stats
        self._memo: dict = {}

    def struct_match(self, pos: int, q: QNode):
        """Id sets, one per query leaf (or per ambiguous child), or NO_MATCH."""
        if N.label_at(self.ix, pos) != q.sym:
            return NO_MATCH
        if not q.children:
            return [self.index.ids_at(pos)]
        if N.is_leaf(self.ix, pos):
            return NO_MATCH
        if q.is_array:
            return self.array_match(pos, q.children)
        return self.object_match(pos, q.children)

    def _element(self, pos: int, q: QNode):
        key = (pos, id(q))
        if key not in self._memo:
            r = self.struct_match(pos, q)
            self._memo[key] = NO_MATCH if r is NO_MATCH else intersect_all(r)
        return self._memo[key]

    def object_match(self, pos: int, q_children: list[QNode]):
        collected: list[np.ndarray] = []
        for qc in q_children:
            cands = N.children_with_label(self.ix, pos, qc.sym)
            if self.stats is not None:
                self.stats.note_branching(cands.size)
            found = []
            for c in cands.tolist():
                r = self.struct_match(c, qc)
                if r is not NO_MATCH:
                    found.append(r)
            if not found:
                return NO_MATCH
            if len(found) == 1:
                collected.extend(found[0])
            else:
                # a source tree reaches at most one of these siblings
                collected.append(union_all([intersect_all(r) for r in found]))
        return collected

    def array_match(self, pos: int, q_children: list[QNode]):
        lo, hi = N.children(self.ix, pos)
        if hi - lo + 1 < len(q_children):
            return NO_MATCH
        ids = self.ordered_array_ids(pos, q_children)
        if ids.size == 0:
            return NO_MATCH
        return [ids]

    def _element_pairs(self, pos: int, q: QNode):
        """(position, id) pairs for the children of ``pos`` that match ``q``."""
        cands = N.children_with_label(self.ix, pos, q.sym)
        if self.stats is not None:
            self.stats.note_branching(cands.size)
        if not q.children:
            return N.id_pairs(self.ix, self.index.id_offsets, self.index.id_values, cands)
        ps, ids = [], []
        for c in cands.tolist():
            e = self._element(c, q)
            if e is not NO_MATCH and e.size:
                ps.append(np.full(e.size, c, dtype=np.int64))
                ids.append(e)
        if not ids:
            return _EMPTY, _EMPTY
        return np.concatenate(ps), np.concatenate(ids)

    def ordered_array_ids(self, pos: int, q_children: list[QNode]) -> np.ndarray:
        """Ids whose array under ``pos`` holds the query elements in order.

        A source array maps into the merged array injectively and in order,
        so an id matches iff it appears under increasing positions for the
        successive elements. Taking, per id, the earliest position that
        follows the previous element's is exact and linear in the pairs.
        """
        prev_ids, prev_pos = _EMPTY, _EMPTY
        for j, q in enumerate(q_children):
            ps, ids = self._element_pairs(pos, q)
            if ids.size == 0:
                return _EMPTY
            order = np.lexsort((ps, ids))
            prev_ids, prev_pos = N.earliest_after(prev_ids, prev_pos, ps[order], ids[order], j == 0)
            if prev_ids.size == 0:
                return _EMPTY
        return prev_ids


def struct_match(index: XbwIndex, pos: int, q: QNode):
    return StructMatcher(index).struct_match(pos, q)


def substructure_search(index: XbwIndex, query: Node, stats: QueryStats | None = None,
                        route: str = "auto") -> list[int]:
    """Ids of lines containing ``query``; ``route`` may force "paths" or "struct"."""
    if stats is None:
        stats = QueryStats()
    try:
        q = to_symbols(query, index.symtab)
    except UnknownLabel:
        return []
    ix = index.ix
    paths = _paths_of(q)
    stats.p = len(paths)
    stats.d_avg = sum(map(len, paths)) / len(paths)

    if not q.children:
        stats.route = "single"
        occ = N.label_occurrences(ix, q.sym)
        stats.r = stats.c = int(occ.size)
        if occ.size == 0:
            return []
        return N.gather_ids(ix, index.id_offsets, index.id_values, occ).tolist()

    # step 1: where does each path end
    arrays = [np.asarray(p, dtype=np.int64) for p in paths]
    hits = []
    for arr in arrays:
        hit = N.locate_path(ix, arr)
        if hit[0] == 0:
            return []
        stats.r += int(hit[3] - hit[2] + 1)
        hits.append(hit)

    # step 2: roots shared by every path, rarest path first
    roots = None
    for k in sorted(range(len(paths)), key=lambda j: hits[j][3] - hits[j][2]):
        anc = N.ancestors(ix, arrays[k][-1], hits[k][2], hits[k][3], arrays[k].size - 1)
        roots = anc if roots is None else B.intersect_sorted(roots, anc)
        if roots.size == 0:
            return []
    stats.c = int(roots.size)

    # step 3: collect ids per root
    use_struct = route == "struct" or (
        route == "auto" and (index.duplicate_keys or has_array(q)))
    stats.route = "struct" if use_struct else "paths"
    matcher = StructMatcher(index, stats) if use_struct else None
    found: list[np.ndarray] = []
    for root in roots.tolist():
        if use_struct:
            sets = matcher.struct_match(root, q)
        else:
            sets = collect_path_matching_ids(index, root, arrays, stats)
        if sets is NO_MATCH:
            continue
        ids = intersect_all(sets)
        if ids.size:
            found.append(ids)
    return union_all(found).tolist()


def warm_up() -> None:
    """Run every search kernel once on a tiny corpus.

    Compiled kernels load lazily on first call (a few hundred ms per
    process); timing code calls this first so loading is not measured.
    """
    from .ingest import build_symbol_table, normalize, parse_jsonl, parse_query
    from .merge import merge_all

    mt = merge_all(parse_jsonl(['{"w":[1,{"v":[2]}],"u":{}}', '{"w":[1],"u":{"t":3}}']))
    table = build_symbol_table([mt])
    from .xbw import build_xbw

    index = build_xbw(normalize(mt, table), table)
    for text in ('{"w":[1]}', '{"w":[{"v":[2]}]}', '{"u":{}}', '{"u":{"t":3},"w":[]}', "1"):
        substructure_search(index, parse_query(text))
        substructure_search(index, parse_query(text), route="struct")
