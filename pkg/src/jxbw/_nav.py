"""Compiled navigation over the XBW arrays.

``ix`` is the tuple ``(label, pf, last, leaf, diff, F)`` where ``label`` and
``pf`` are wavelet-matrix tuples, ``last``/``leaf``/``diff`` bitvector
tuples and ``F`` an int64 array (see ``_bits``). Positions are 1-based;
0 means "none".
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._bits import bv_get, bv_rank1, bv_select1, wm_access, wm_rank, wm_select


@njit(cache=True)
def label_at(ix, i):
    return wm_access(ix[0], i)


@njit(cache=True)
def is_leaf(ix, i):
    return bv_get(ix[3], i) == 1


@njit(cache=True)
def children(ix, i):
    lab = ix[0]
    last = ix[2]
    if bv_get(ix[3], i):
        return 0, -1
    c = wm_access(lab, i)
    y = ix[5][c]
    z = bv_rank1(last, y - 1)
    s = wm_rank(lab, c, i)
    lo = bv_select1(last, z + s - 1) + 1
    hi = bv_select1(last, z + s)
    return lo, hi


@njit(cache=True)
def parent(ix, i):
    if i <= 1:
        return 0
    last = ix[2]
    diff = ix[4]
    c = wm_access(ix[1], i)
    s = bv_rank1(diff, i)
    y = bv_select1(diff, s)
    k = bv_rank1(last, i - 1) - bv_rank1(last, y - 1)
    return wm_select(ix[0], c, k + 1)


@njit(cache=True)
def char_ranked_child(ix, i, c, k):
    lo, hi = children(ix, i)
    if hi < lo or k < 1:
        return 0
    y = wm_rank(ix[0], c, lo - 1)
    p = wm_select(ix[0], c, y + k)
    if p == 0 or p > hi:
        return 0
    return p


@njit(cache=True)
def children_with_label(ix, i, c):
    lo, hi = children(ix, i)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    y1 = wm_rank(ix[0], c, lo - 1)
    y2 = wm_rank(ix[0], c, hi)
    out = np.empty(y2 - y1, dtype=np.int64)
    for k in range(y1 + 1, y2 + 1):
        out[k - y1 - 1] = wm_select(ix[0], c, k)
    return out


@njit(cache=True)
def subpath_search(ix, path):
    """Range of nodes whose ancestors, read upward, spell ``path`` reversed.

    That is, the children of every node reached by following ``path``
    downward from any starting node. An empty path selects everything.
    """
    lab = ix[0]
    last = ix[2]
    F = ix[5]
    n = lab[5]
    if path.size == 0:
        return 1, n
    c = path[0]
    if c < 1 or c + 1 >= F.size:
        return 0, -1
    first = F[c]
    final = F[c + 1] - 1
    if first > final:
        return 0, -1
    for j in range(1, path.size):
        c = path[j]
        if c < 1 or c + 1 >= F.size:
            return 0, -1
        k1 = wm_rank(lab, c, first - 1)
        k2 = wm_rank(lab, c, final)
        if k2 <= k1 or F[c] > F[c + 1] - 1:
            return 0, -1
        z = bv_rank1(last, F[c] - 1)
        first = bv_select1(last, z + k1) + 1
        final = bv_select1(last, z + k2)
    return first, final


@njit(cache=True)
def locate_path(ix, path):
    """Positions where a downward occurrence of ``path`` ends.

    Returns ``(first, last, k_lo, k_hi)``: the occurrences are exactly the
    ``k_lo``..``k_hi``-th occurrences of the final symbol, spanning positions
    ``first``..``last``. All zero when there is none.
    """
    lab = ix[0]
    n = lab[5]
    c = path[path.size - 1]
    if path.size == 1:
        lo, hi = 1, n
    else:
        lo, hi = subpath_search(ix, path[: path.size - 1])
        if hi < lo:
            return 0, 0, 0, 0
    k1 = wm_rank(lab, c, lo - 1) + 1
    k2 = wm_rank(lab, c, hi)
    if k2 < k1:
        return 0, 0, 0, 0
    return wm_select(lab, c, k1), wm_select(lab, c, k2), k1, k2


@njit(cache=True)
def ancestors(ix, c, k_lo, k_hi, steps):
    """Distinct ancestors ``steps`` levels above the k_lo..k_hi-th ``c``."""
    out = np.empty(k_hi - k_lo + 1, dtype=np.int64)
    m = 0
    prev = -1
    for k in range(k_lo, k_hi + 1):
        p = wm_select(ix[0], c, k)
        for _ in range(steps):
            p = parent(ix, p)
            if p == 0:
                break
        if p != 0 and p != prev:
            out[m] = p
            m += 1
            prev = p
    return np.unique(out[:m])


@njit(cache=True)
def subtree_leaves(ix, i):
    """Leaf positions in the subtree rooted at ``i``."""
    queue = np.empty(16, dtype=np.int64)
    queue[0] = i
    head = 0
    tail = 1
    leaves = np.empty(16, dtype=np.int64)
    nl = 0
    while head < tail:
        p = queue[head]
        head += 1
        lo, hi = children(ix, p)
        if hi < lo:
            if nl == leaves.size:
                grown = np.empty(leaves.size * 2, dtype=np.int64)
                grown[:nl] = leaves[:nl]
                leaves = grown
            leaves[nl] = p
            nl += 1
            continue
        need = tail + (hi - lo + 1)
        if need > queue.size:
            grown = np.empty(max(need, queue.size * 2), dtype=np.int64)
            grown[:tail] = queue[:tail]
            queue = grown
        for q in range(lo, hi + 1):
            queue[tail] = q
            tail += 1
    return leaves[:nl]


@njit(cache=True)
def gather_ids(ix, offsets, values, positions):
    """Sorted distinct ids stored at the given positions (internal ones expand)."""
    leaf = ix[3]
    total = 0
    for t in range(positions.size):
        p = positions[t]
        if bv_get(leaf, p):
            r = bv_rank1(leaf, p)
            total += offsets[r] - offsets[r - 1]
        else:
            sub = subtree_leaves(ix, p)
            for u in range(sub.size):
                r = bv_rank1(leaf, sub[u])
                total += offsets[r] - offsets[r - 1]
    out = np.empty(total, dtype=values.dtype)
    m = 0
    for t in range(positions.size):
        p = positions[t]
        if bv_get(leaf, p):
            r = bv_rank1(leaf, p)
            for j in range(offsets[r - 1], offsets[r]):
                out[m] = values[j]
                m += 1
        else:
            sub = subtree_leaves(ix, p)
            for u in range(sub.size):
                r = bv_rank1(leaf, sub[u])
                for j in range(offsets[r - 1], offsets[r]):
                    out[m] = values[j]
                    m += 1
    if positions.size == 1 and bv_get(leaf, positions[0]):
        return out
    return np.unique(out)


@njit(cache=True)
def id_pairs(ix, offsets, values, positions):
    """(position, id) for every id stored at or below each position."""
    leaf = ix[3]
    total = 0
    subs = []
    for t in range(positions.size):
        p = positions[t]
        if bv_get(leaf, p):
            sub = np.empty(1, dtype=np.int64)
            sub[0] = p
        else:
            sub = subtree_leaves(ix, p)
        subs.append(sub)
        for u in range(sub.size):
            r = bv_rank1(leaf, sub[u])
            total += offsets[r] - offsets[r - 1]
    pos = np.empty(total, dtype=np.int64)
    ids = np.empty(total, dtype=values.dtype)
    m = 0
    for t in range(positions.size):
        sub = subs[t]
        for u in range(sub.size):
            r = bv_rank1(leaf, sub[u])
            for j in range(offsets[r - 1], offsets[r]):
                pos[m] = positions[t]
                ids[m] = values[j]
                m += 1
    return pos, ids


@njit(cache=True)
def earliest_after(prev_ids, prev_pos, pos, ids, first):
    """Per id, the smallest position in ``pos`` beyond that id's ``prev_pos``.

    ``pos``/``ids`` must be sorted by (id, position). With ``first`` set every
    id qualifies. Returns sorted ids and their positions.
    """
    out_ids = np.empty(ids.size, dtype=ids.dtype)
    out_pos = np.empty(ids.size, dtype=np.int64)
    m = 0
    j = 0
    i = 0
    while i < ids.size:
        cur = ids[i]
        bound = 0
        ok = first
        if not first:
            while j < prev_ids.size and prev_ids[j] < cur:
                j += 1
            if j < prev_ids.size and prev_ids[j] == cur:
                ok = True
                bound = prev_pos[j]
        k = i
        found = False
        while k < ids.size and ids[k] == cur:
            if ok and not found and pos[k] > bound:
                out_ids[m] = cur
                out_pos[m] = pos[k]
                m += 1
                found = True
            k += 1
        i = k
    return out_ids[:m], out_pos[:m]


@njit(cache=True)
def descend(ix, root, path):
    """Nodes reached from ``root`` by following ``path[1:]`` downward."""
    frontier = np.empty(1, dtype=np.int64)
    frontier[0] = root
    for j in range(1, path.size):
        c = path[j]
        total = 0
        parts = []
        for t in range(frontier.size):
            kids = children_with_label(ix, frontier[t], c)
            if kids.size:
                parts.append(kids)
                total += kids.size
        if total == 0:
            return np.empty(0, dtype=np.int64)
        frontier = np.empty(total, dtype=np.int64)
        m = 0
        for kids in parts:
            frontier[m: m + kids.size] = kids
            m += kids.size
    return frontier


@njit(cache=True)
def path_ids(ix, offsets, values, root, path):
    reached = descend(ix, root, path)
    if reached.size == 0:
        return np.empty(0, dtype=values.dtype)
    return gather_ids(ix, offsets, values, reached)


@njit(cache=True)
def label_occurrences(ix, c):
    lab = ix[0]
    cnt = wm_rank(lab, c, lab[5])
    out = np.empty(cnt, dtype=np.int64)
    for k in range(1, cnt + 1):
        out[k - 1] = wm_select(lab, c, k)
    return out


@njit(cache=True)
def all_children(ix):
    """(lo, hi) child range of every position, computed by navigation."""
    n = ix[0][5]
    out = np.empty((n, 2), dtype=np.int64)
    for i in range(1, n + 1):
        lo, hi = children(ix, i)
        out[i - 1, 0] = lo
        out[i - 1, 1] = hi
    return out


@njit(cache=True)
def all_parents(ix):
    n = ix[0][5]
    out = np.empty(n, dtype=np.int64)
    for i in range(1, n + 1):
        out[i - 1] = parent(ix, i)
    return out
