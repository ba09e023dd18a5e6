"""XBW index over a normalized merged tree.

Nodes are laid out in the order of their upward label sequence (parent
label, grandparent label, ..., root), ties broken by preorder. In that
order the children of every node form one contiguous block, and the blocks
of all nodes labeled ``c`` are consecutive, in the same order as the
``c``-labeled nodes themselves. Navigation is rank/select arithmetic on:

* ``label``: node symbols (wavelet matrix)
* ``last``: 1 at the final child of each block (and at the root)
* ``leaf``: 1 at leaves
* ``pf``: parent symbol, 0 for the root (wavelet matrix)
* ``diff``: 1 where the parent symbol changes, i.e. at the start of each
  parent-label group
* ``F[c]``: first position whose parent symbol is ``c``

Id lists of leaves are stored by leaf rank in a CSR pair (offsets, values).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _bits as B
from . import _nav as N
from .errors import EmptyTree, NoSuchChild, NotALeaf, OutOfRange
from .ingest import Kind, NormalizedTree, SymbolTable
from .succinct import RankSelectBits, WaveletMatrix


def _dense_rank(primary: np.ndarray, secondary: np.ndarray) -> np.ndarray:
    order = np.lexsort((secondary, primary))
    p, s = primary[order], secondary[order]
    step = np.ones(len(order), dtype=np.int64)
    step[0] = 0
    step[1:] = (p[1:] != p[:-1]) | (s[1:] != s[:-1])
    out = np.empty(len(order), dtype=np.int64)
    out[order] = np.cumsum(step)
    return out


def xbw_order(symbols: np.ndarray, parents: np.ndarray) -> np.ndarray:
    """Preorder indices sorted by upward label sequence (stable).

    Refines ranks until fixpoint: a node's rank is the dense rank of
    (parent symbol, parent rank), with the root alone at rank 0. After d
    rounds nodes are ordered by their first d upward labels, so the loop
    ends after at most depth+1 rounds.
    """
    n = len(symbols)
    has_parent = parents >= 0
    psym = np.where(has_parent, symbols[np.maximum(parents, 0)], -1)
    rank = np.zeros(n, dtype=np.int64)
    while True:
        prank = np.where(has_parent, rank[np.maximum(parents, 0)], -1)
        new = _dense_rank(psym, prank)
        if np.array_equal(new, rank):
            break
        rank = new
    return np.argsort(rank, kind="stable")


@dataclass
class XbwArrays:
    """Plain (uncompressed) arrays in XBW order, 0-based numpy arrays."""

    label: np.ndarray
    last: np.ndarray
    leaf: np.ndarray
    pf: np.ndarray
    diff: np.ndarray
    F: np.ndarray
    id_offsets: np.ndarray
    id_values: np.ndarray
    order: np.ndarray  # order[pos-1] = preorder index


def xbw_arrays(nt: NormalizedTree, alphabet: int | None = None) -> XbwArrays:
    syms = nt.symbols.astype(np.int64)
    pars = nt.parents.astype(np.int64)
    n = len(syms)
    if n == 0:
        raise EmptyTree("cannot index an empty tree")
    if pars[0] != -1 or (n > 1 and (pars[1:] < 0).any()):
        raise ValueError("node 0 must be the only root")
    top = int(syms.max()) if alphabet is None else int(alphabet)
    if syms.min() < 1 or syms.max() > top:
        raise ValueError("symbols must lie in [1, alphabet]")

    idx = np.arange(n)
    nkids = np.bincount(pars[1:], minlength=n) if n > 1 else np.zeros(n, dtype=np.int64)
    is_leaf = nkids == 0
    last_child = np.full(n, -1, dtype=np.int64)
    if n > 1:
        np.maximum.at(last_child, pars[1:], idx[1:])
    is_last = np.ones(n, dtype=bool)
    is_last[1:] = last_child[pars[1:]] == idx[1:]

    # every symbol must be always-internal or always-leaf
    internal_syms = np.unique(syms[~is_leaf])
    leaf_syms = np.unique(syms[is_leaf])
    mixed = np.intersect1d(internal_syms, leaf_syms)
    if mixed.size:
        raise ValueError(f"symbols {mixed.tolist()} label both leaves and internal nodes; "
                         "normalize() adds end markers to avoid this")

    order = xbw_order(syms, pars)
    label = syms[order]
    pf = np.where(pars >= 0, syms[np.maximum(pars, 0)], 0)[order]
    diff = np.ones(n, dtype=bool)
    diff[1:] = pf[1:] != pf[:-1]
    F = np.searchsorted(pf, np.arange(top + 2), side="left").astype(np.int64) + 1

    leaf_x = is_leaf[order]
    id_lists = [nt.ids[node] or [] for node in order[leaf_x].tolist()]
    lens = np.fromiter((len(x) for x in id_lists), dtype=np.int64, count=len(id_lists))
    offsets = np.zeros(len(id_lists) + 1, dtype=np.int64)
    np.cumsum(lens, out=offsets[1:])
    values = np.fromiter((v for x in id_lists for v in x), dtype=np.int64, count=int(offsets[-1]))
    return XbwArrays(label, is_last[order], leaf_x, pf, diff, F, offsets, values, order)


class XbwIndex:
    """Navigable, searchable XBW representation of a merged tree."""

    def __init__(self, label: WaveletMatrix, pf: WaveletMatrix, last: RankSelectBits,
                 leaf: RankSelectBits, diff: RankSelectBits, F: np.ndarray,
                 id_offsets: np.ndarray, id_values: np.ndarray, symtab: SymbolTable,
                 duplicate_keys: bool = False):
        self.label = label
        self.pf = pf
        self.last = last
        self.leaf = leaf
        self.diff = diff
        self.F = np.ascontiguousarray(F, dtype=np.int64)
        self.id_offsets = np.ascontiguousarray(id_offsets, dtype=np.int64)
        self.id_values = np.ascontiguousarray(id_values, dtype=np.int64)
        self.symtab = symtab
        # set when some object holds the same key twice; path-only matching
        # could then combine members of different same-named keys
        self.duplicate_keys = bool(duplicate_keys)
        self.n = label.n
        self.alphabet = label.sigma
        self.ix = (label.parts, pf.parts, last.parts, leaf.parts, diff.parts, self.F)

    @property
    def sigma(self) -> int:
        return self.symtab.sigma

    @property
    def leaf_count(self) -> int:
        return self.leaf.ones

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise OutOfRange(f"position {i} outside [1, {self.n}]")

    # access ------------------------------------------------------------------
    def label_at(self, i: int) -> int:
        self._check(i)
        return int(N.label_at(self.ix, i))

    def is_leaf(self, i: int) -> bool:
        self._check(i)
        return bool(N.is_leaf(self.ix, i))

    # navigation --------------------------------------------------------------
    def children(self, i: int) -> tuple[int, int] | None:
        """Child range ``(l, r)`` of position ``i``, or None for a leaf."""
        self._check(i)
        lo, hi = N.children(self.ix, i)
        return None if hi < lo else (int(lo), int(hi))

    def degree(self, i: int) -> int:
        rng = self.children(i)
        return 0 if rng is None else rng[1] - rng[0] + 1

    def ranked_child(self, i: int, k: int) -> int:
        rng = self.children(i)
        if rng is None or not 1 <= k <= rng[1] - rng[0] + 1:
            raise NoSuchChild(f"position {i} has no child number {k}")
        return rng[0] + k - 1

    def char_ranked_child(self, i: int, c: int, k: int) -> int | None:
        self._check(i)
        p = int(N.char_ranked_child(self.ix, i, c, k))
        return p or None

    def parent(self, i: int) -> int | None:
        self._check(i)
        return int(N.parent(self.ix, i)) or None

    def tree_ids(self, i: int) -> np.ndarray:
        """Id list stored at leaf position ``i`` (sorted, read-only view)."""
        self._check(i)
        if not N.is_leaf(self.ix, i):
            raise NotALeaf(f"position {i} is not a leaf")
        r = self.leaf.rank1(i)
        out = self.id_values[self.id_offsets[r - 1]: self.id_offsets[r]]
        out.flags.writeable = False
        return out

    def ids_at(self, i: int) -> np.ndarray:
        """Ids of the leaves below ``i`` (the leaf's own ids when ``i`` is a leaf)."""
        self._check(i)
        return N.gather_ids(self.ix, self.id_offsets, self.id_values,
                            np.array([i], dtype=np.int64))

    def subpath_search(self, path) -> tuple[int, int] | None:
        """Children range of the nodes reached by ``path`` from any node."""
        p = np.asarray(path, dtype=np.int64)
        lo, hi = N.subpath_search(self.ix, p)
        return None if hi < lo else (int(lo), int(hi))

    def locate_path(self, path) -> tuple[int, int] | None:
        """Range of positions where ``path`` ends, read downward from any node."""
        p = np.asarray(path, dtype=np.int64)
        if p.size == 0:
            return (1, self.n)
        first, last, _, _ = N.locate_path(self.ix, p)
        return None if first == 0 else (int(first), int(last))

    def occurrences(self, c: int) -> np.ndarray:
        return N.label_occurrences(self.ix, c)

    # bulk helpers used by tests and stats
    def all_children(self) -> np.ndarray:
        return N.all_children(self.ix)

    def all_parents(self) -> np.ndarray:
        return N.all_parents(self.ix)

    def plain_arrays(self) -> dict[str, np.ndarray]:
        return {
            "label": self.label.to_array(),
            "last": self.last.to_array().astype(np.int64),
            "leaf": self.leaf.to_array().astype(np.int64),
            "pf": self.pf.to_array(),
            "diff": self.diff.to_array().astype(np.int64),
            "F": self.F.copy(),
        }

    def id_sets(self) -> list[list[int]]:
        o, v = self.id_offsets, self.id_values
        return [v[o[r]: o[r + 1]].tolist() for r in range(len(o) - 1)]


def has_duplicate_keys(nt: NormalizedTree, symtab: SymbolTable) -> bool:
    """True when some node has two KEY children with the same symbol."""
    if len(nt) < 2:
        return False
    key_syms = [symtab.symbol(lab) for lab in symtab.labels if lab.kind is Kind.KEY]
    syms = nt.symbols[1:]
    is_key = np.isin(syms, np.asarray(key_syms, dtype=np.int64))
    pairs = nt.parents[1:][is_key] * (int(nt.symbols.max()) + 1) + syms[is_key]
    return np.unique(pairs).size < pairs.size


def build_xbw(nt: NormalizedTree, symtab: SymbolTable) -> XbwIndex:
    """Lay out ``nt`` in XBW order and build the succinct structures."""
    alphabet = max(symtab.sigma + 1, int(nt.sentinel), int(nt.symbols.max()) if len(nt) else 0)
    arr = xbw_arrays(nt, alphabet)
    return XbwIndex(
        label=WaveletMatrix(arr.label, sigma=alphabet),
        pf=WaveletMatrix(arr.pf, sigma=alphabet),
        last=RankSelectBits(arr.last),
        leaf=RankSelectBits(arr.leaf),
        diff=RankSelectBits(arr.diff),
        F=arr.F,
        id_offsets=arr.id_offsets,
        id_values=arr.id_values,
        symtab=symtab,
        duplicate_keys=has_duplicate_keys(nt, symtab),
    )


def sorted_intersection(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return B.intersect_sorted(a, b)


def sorted_union(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return B.union_sorted(a, b)
