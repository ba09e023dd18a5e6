"""Compiled rank/select kernels.

Conventions: positions are 1-based, ``rank(i)`` counts over the first ``i``
entries, ``select(k)`` returns the 1-based position of the k-th occurrence.
Callers validate arguments; kernels assume they are in range.

A bitvector travels as a tuple ``(words, supers, samp1, samp0, n)``:
64-bit words (bit ``j`` is bit ``j & 63`` of word ``j >> 6``), cumulative
ones before each 512-bit superblock (one extra trailing entry holds the
total), and the superblock index of every ``SAMPLE``-th one / zero followed
by a terminating entry.

A wavelet matrix travels as ``(words, supers, samp1, samp0, zeros, n, levels)``
with one row per level in each 2-D array.
"""

from __future__ import annotations

import numpy as np
from numba import njit

WORD = 64
SUPER_WORDS = 8
SUPER_BITS = WORD * SUPER_WORDS
SAMPLE = 4096

_U1 = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit(cache=True, inline="always")
def _select_in_word(x, r):
    # position (0-based) of the r-th set bit of x, r >= 1
    for _ in range(r - 1):
        x = x & (x - _U1)
    low = x & (~x + _U1)
    return popcount(low - _U1)


@njit(cache=True)
def bit_get(words, i):
    j = i - 1
    return np.int64((words[j >> 6] >> np.uint64(j & 63)) & _U1)


@njit(cache=True)
def rank1(words, supers, i):
    w = i >> 6
    sb = w >> 3
    r = supers[sb]
    for k in range(sb << 3, w):
        r += popcount(words[k])
    rem = i & 63
    if rem:
        r += popcount(words[w] & ((_U1 << np.uint64(rem)) - _U1))
    return r


@njit(cache=True)
def select1(words, supers, samp1, k):
    j = (k - 1) // SAMPLE
    lo = samp1[j]
    hi = samp1[j + 1]
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if supers[mid] < k:
            lo = mid
        else:
            hi = mid - 1
    rem = k - supers[lo]
    w = lo << 3
    while True:
        c = popcount(words[w])
        if rem <= c:
            break
        rem -= c
        w += 1
    return w * WORD + _select_in_word(words[w], rem) + 1


@njit(cache=True)
def select0(words, supers, samp0, k):
    j = (k - 1) // SAMPLE
    lo = samp0[j]
    hi = samp0[j + 1]
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if mid * SUPER_BITS - supers[mid] < k:
            lo = mid
        else:
            hi = mid - 1
    rem = k - (lo * SUPER_BITS - supers[lo])
    w = lo << 3
    while True:
        x = ~words[w]
        c = popcount(x)
        if rem <= c:
            break
        rem -= c
        w += 1
    return w * WORD + _select_in_word(~words[w], rem) + 1


# tuple-level helpers -------------------------------------------------------

@njit(cache=True)
def bv_get(bv, i):
    return bit_get(bv[0], i)


@njit(cache=True)
def bv_rank1(bv, i):
    return rank1(bv[0], bv[1], i)


@njit(cache=True)
def bv_select1(bv, k):
    return select1(bv[0], bv[1], bv[2], k)


@njit(cache=True)
def bv_select0(bv, k):
    return select0(bv[0], bv[1], bv[3], k)


@njit(cache=True)
def wm_access(wm, i):
    words, supers, _s1, _s0, zeros, n, levels = wm
    p = i - 1
    v = 0
    for l in range(levels):
        b = np.int64((words[l, p >> 6] >> np.uint64(p & 63)) & _U1)
        r = rank1(words[l], supers[l], p)
        if b:
            p = zeros[l] + r
        else:
            p = p - r
        v = (v << 1) | b
    return v


@njit(cache=True)
def wm_rank(wm, c, i):
    words, supers, _s1, _s0, zeros, n, levels = wm
    if c < 0 or c >> levels:
        return 0
    s = 0
    e = i
    for l in range(levels):
        b = (c >> (levels - 1 - l)) & 1
        rs = rank1(words[l], supers[l], s)
        re = rank1(words[l], supers[l], e)
        if b:
            s = zeros[l] + rs
            e = zeros[l] + re
        else:
            s = s - rs
            e = e - re
    return e - s


@njit(cache=True)
def wm_count(wm, c):
    return wm_rank(wm, c, wm[5])


@njit(cache=True)
def wm_select(wm, c, k):
    """Position of the k-th ``c``, or 0 if there are fewer than k."""
    words, supers, samp1, samp0, zeros, n, levels = wm
    if k < 1 or c < 0 or c >> levels:
        return 0
    s = 0
    e = n
    for l in range(levels):
        b = (c >> (levels - 1 - l)) & 1
        rs = rank1(words[l], supers[l], s)
        re = rank1(words[l], supers[l], e)
        if b:
            s = zeros[l] + rs
            e = zeros[l] + re
        else:
            s = s - rs
            e = e - re
    if k > e - s:
        return 0
    p = s + k - 1
    for l in range(levels - 1, -1, -1):
        b = (c >> (levels - 1 - l)) & 1
        if b:
            p = select1(words[l], supers[l], samp1[l], p - zeros[l] + 1) - 1
        else:
            p = select0(words[l], supers[l], samp0[l], p + 1) - 1
    return p + 1


# batch entry points (used by tests and bulk callers) ------------------------

@njit(cache=True)
def bv_access_all(bv):
    n = bv[4]
    out = np.empty(n, dtype=np.int64)
    for i in range(1, n + 1):
        out[i - 1] = bit_get(bv[0], i)
    return out


@njit(cache=True)
def bv_rank1_all(bv):
    n = bv[4]
    out = np.empty(n + 1, dtype=np.int64)
    for i in range(n + 1):
        out[i] = rank1(bv[0], bv[1], i)
    return out


@njit(cache=True)
def bv_select1_all(bv, count):
    out = np.empty(count, dtype=np.int64)
    for k in range(1, count + 1):
        out[k - 1] = select1(bv[0], bv[1], bv[2], k)
    return out


@njit(cache=True)
def bv_select0_all(bv, count):
    out = np.empty(count, dtype=np.int64)
    for k in range(1, count + 1):
        out[k - 1] = select0(bv[0], bv[1], bv[3], k)
    return out


@njit(cache=True)
def wm_access_all(wm):
    n = wm[5]
    out = np.empty(n, dtype=np.int64)
    for i in range(1, n + 1):
        out[i - 1] = wm_access(wm, i)
    return out


@njit(cache=True)
def wm_rank_all(wm, c):
    n = wm[5]
    out = np.empty(n + 1, dtype=np.int64)
    for i in range(n + 1):
        out[i] = wm_rank(wm, c, i)
    return out


@njit(cache=True)
def wm_select_all(wm, c, count):
    out = np.empty(count, dtype=np.int64)
    for k in range(1, count + 1):
        out[k - 1] = wm_select(wm, c, k)
    return out


# sorted id-set operations ----------------------------------------------------

@njit(cache=True)
def intersect_sorted(a, b):
    out = np.empty(min(a.size, b.size), dtype=a.dtype)
    i = j = m = 0
    while i < a.size and j < b.size:
        x = a[i]
        y = b[j]
        if x < y:
            i += 1
        elif y < x:
            j += 1
        else:
            out[m] = x
            m += 1
            i += 1
            j += 1
    return out[:m]


@njit(cache=True)
def union_sorted(a, b):
    out = np.empty(a.size + b.size, dtype=a.dtype)
    i = j = m = 0
    while i < a.size and j < b.size:
        x = a[i]
        y = b[j]
        if x < y:
            out[m] = x
            i += 1
        elif y < x:
            out[m] = y
            j += 1
        else:
            out[m] = x
            i += 1
            j += 1
        m += 1
    while i < a.size:
        out[m] = a[i]
        i += 1
        m += 1
    while j < b.size:
        out[m] = b[j]
        j += 1
        m += 1
    return out[:m]
