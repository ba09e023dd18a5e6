"""Rank/select bitvectors and wavelet matrices (immutable, 1-based API)."""

from __future__ import annotations

import numpy as np

from . import _bits as K
from .errors import NotEnoughOccurrences, OutOfRange


def pack_bits(bits) -> np.ndarray:
    """Pack a 0/1 sequence into little-endian 64-bit words (at least one word)."""
    b = np.asarray(bits, dtype=bool)
    nw = max(1, -(-b.size // K.WORD))
    raw = np.packbits(b, bitorder="little")
    buf = np.zeros(nw * 8, dtype=np.uint8)
    buf[: raw.size] = raw
    return buf.view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")[:n].astype(bool)


def _directories(words: np.ndarray, n: int):
    bits = unpack_bits(words, n)
    nw = words.size
    nsuper = -(-nw // K.SUPER_WORDS)
    per_word = np.bitwise_count(words).astype(np.int64)
    cum = np.zeros(nw + 1, dtype=np.int64)
    np.cumsum(per_word, out=cum[1:])
    supers = cum[np.minimum(np.arange(nsuper + 1) * K.SUPER_WORDS, nw)]
    last = max(nsuper - 1, 0)

    def samples(positions):
        s = positions[:: K.SAMPLE] // K.SUPER_BITS
        if s.size == 0:
            s = np.zeros(1, dtype=np.int64)
        return np.append(s, last).astype(np.int64)

    samp1 = samples(np.flatnonzero(bits))
    samp0 = samples(np.flatnonzero(~bits))
    return supers, samp1, samp0


class RankSelectBits:
    """Bit array with constant-time rank and near-constant select."""

    def __init__(self, bits=None, *, words: np.ndarray | None = None, n: int | None = None):
        if words is None:
            b = np.asarray(bits if bits is not None else [], dtype=bool)
            n = int(b.size)
            words = pack_bits(b)
        else:
            words = np.ascontiguousarray(words, dtype=np.uint64)
            if n is None:
                raise ValueError("n is required with words")
        self.n = int(n)
        self.words = words
        self.supers, self.samp1, self.samp0 = _directories(words, self.n)
        self.ones = int(self.supers[-1])
        self.parts = (self.words, self.supers, self.samp1, self.samp0, self.n)

    def __len__(self) -> int:
        return self.n

    def _check_pos(self, i: int, lo: int) -> None:
        if not lo <= i <= self.n:
            raise OutOfRange(f"position {i} outside [{lo}, {self.n}]")

    def access(self, i: int) -> int:
        self._check_pos(i, 1)
        return int(K.bit_get(self.words, i))

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def rank1(self, i: int) -> int:
        self._check_pos(i, 0)
        return int(K.rank1(self.words, self.supers, i))

    def rank(self, c: int, i: int) -> int:
        r1 = self.rank1(i)
        return r1 if c else i - r1

    def count(self, c: int) -> int:
        return self.ones if c else self.n - self.ones

    def select1(self, k: int) -> int:
        if not 1 <= k <= self.ones:
            raise NotEnoughOccurrences(f"no 1-bit number {k} (have {self.ones})")
        return int(K.select1(self.words, self.supers, self.samp1, k))

    def select0(self, k: int) -> int:
        zeros = self.n - self.ones
        if not 1 <= k <= zeros:
            raise NotEnoughOccurrences(f"no 0-bit number {k} (have {zeros})")
        return int(K.select0(self.words, self.supers, self.samp0, k))

    def select(self, c: int, k: int) -> int:
        return self.select1(k) if c else self.select0(k)

    def to_array(self) -> np.ndarray:
        return unpack_bits(self.words, self.n)

    # bulk queries, one compiled loop each
    def access_all(self) -> np.ndarray:
        return K.bv_access_all(self.parts)

    def rank1_all(self) -> np.ndarray:
        return K.bv_rank1_all(self.parts)

    def select1_all(self) -> np.ndarray:
        return K.bv_select1_all(self.parts, self.ones)

    def select0_all(self) -> np.ndarray:
        return K.bv_select0_all(self.parts, self.n - self.ones)

    @property
    def raw_bytes(self) -> int:
        return -(-self.n // 8)

    @property
    def aux_bytes(self) -> int:
        return self.supers.nbytes + self.samp1.nbytes + self.samp0.nbytes

    @property
    def overhead(self) -> float:
        """Directory size relative to the raw bits."""
        return self.aux_bytes / max(self.words.nbytes, 1)


class WaveletMatrix:
    """Symbol sequence over [0, 2**levels) with access/rank/select in O(levels)."""

    def __init__(self, values=None, sigma: int | None = None, *, rows=None, zeros=None,
                 n: int | None = None):
        if rows is None:
            v = np.asarray(values if values is not None else [], dtype=np.int64)
            if v.size and v.min() < 0:
                raise ValueError("symbols must be non-negative")
            top = int(v.max()) if v.size else 0
            self.sigma = int(sigma) if sigma is not None else top
            if top > self.sigma:
                raise ValueError("symbol exceeds sigma")
            self.levels = max(1, self.sigma.bit_length())
            n = int(v.size)
            rows, zeros = [], []
            cur = v
            for lvl in range(self.levels):
                b = ((cur >> (self.levels - 1 - lvl)) & 1).astype(bool)
                rows.append(pack_bits(b))
                zeros.append(int(n - b.sum()))
                cur = np.concatenate([cur[~b], cur[b]])
        else:
            self.sigma = int(sigma)
            self.levels = len(rows)
        self.n = int(n)
        levels = [RankSelectBits(words=w, n=self.n) for w in rows]
        self.zeros = np.asarray(zeros, dtype=np.int64)
        self.words = np.stack([b.words for b in levels])
        self.supers = np.stack([b.supers for b in levels])
        self.samp1 = _stack_padded([b.samp1 for b in levels])
        self.samp0 = _stack_padded([b.samp0 for b in levels])
        self.parts = (self.words, self.supers, self.samp1, self.samp0, self.zeros,
                      self.n, self.levels)

    def __len__(self) -> int:
        return self.n

    def access(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise OutOfRange(f"position {i} outside [1, {self.n}]")
        return int(K.wm_access(self.parts, i))

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def rank(self, c: int, i: int) -> int:
        if not 0 <= i <= self.n:
            raise OutOfRange(f"position {i} outside [0, {self.n}]")
        return int(K.wm_rank(self.parts, c, i))

    def count(self, c: int) -> int:
        return int(K.wm_rank(self.parts, c, self.n))

    def select(self, c: int, k: int) -> int:
        p = int(K.wm_select(self.parts, c, k)) if k >= 1 else 0
        if p == 0:
            raise NotEnoughOccurrences(f"symbol {c} has fewer than {k} occurrences")
        return p

    def to_array(self) -> np.ndarray:
        return K.wm_access_all(self.parts)

    def rank_all(self, c: int) -> np.ndarray:
        return K.wm_rank_all(self.parts, c)

    def select_all(self, c: int) -> np.ndarray:
        return K.wm_select_all(self.parts, c, self.count(c))

    @property
    def raw_bytes(self) -> int:
        return self.levels * -(-self.n // 8)

    @property
    def aux_bytes(self) -> int:
        return self.supers.nbytes + self.samp1.nbytes + self.samp0.nbytes + self.zeros.nbytes

    @property
    def overhead(self) -> float:
        return self.aux_bytes / max(self.words.nbytes, 1)


def _stack_padded(arrays: list[np.ndarray]) -> np.ndarray:
    width = max(a.size for a in arrays)
    out = np.empty((len(arrays), width), dtype=np.int64)
    for i, a in enumerate(arrays):
        out[i, : a.size] = a
        out[i, a.size:] = a[-1]
    return out
