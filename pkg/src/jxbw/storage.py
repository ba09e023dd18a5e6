"""Binary index format (little-endian throughout).

    magic "JXBW" | version u32 | flags u32 | n u64
        flags bit 0: some object in the data repeats a key
    symbol table: count u64, then per entry kind u8, byte length u32, UTF-8 text
    bit arrays last, leaf, diff: bit length u64, packed u64 words
    wavelet matrices label, pf: sigma u64, levels u8, per level packed u64 words
        followed by the level's zero count u64
    F: sigma + 2 entries u64
    ids: leaf count u64, leaf_count + 1 byte offsets u64, delta-varint payload
    checksum: BLAKE2b with an 8-byte digest over all preceding bytes

Each bit row holds max(1, ceil(n / 64)) words. Rank/select directories are
rebuilt on load. Within each leaf's list the first id is stored as-is and
later ids as differences from their predecessor, as LEB128 varints.
"""

from __future__ import annotations

import hashlib
import io
import os
import struct

import numpy as np
from numba import njit

from .errors import BadMagic, ChecksumFail, IndexFormatError, Truncated, VersionMismatch
from .ingest import Kind, Label, SymbolTable
from .succinct import RankSelectBits, WaveletMatrix
from .xbw import XbwIndex

MAGIC = b"JXBW"
VERSION = 1
CHECKSUM_BYTES = 8
SECTIONS = ("header", "symtab", "last", "leaf", "diff", "label", "pf", "F", "ids", "checksum")


def checksum(data) -> bytes:
    return hashlib.blake2b(data, digest_size=CHECKSUM_BYTES).digest()


@njit(cache=True)
def _varint_encode(offsets, values):
    n_leaf = offsets.size - 1
    byte_off = np.zeros(n_leaf + 1, dtype=np.int64)
    size = 0
    for r in range(n_leaf):
        prev = 0
        for j in range(offsets[r], offsets[r + 1]):
            d = values[j] - prev
            prev = values[j]
            size += 1
            while d >= 128:
                d >>= 7
                size += 1
        byte_off[r + 1] = size
    out = np.empty(size, dtype=np.uint8)
    m = 0
    for r in range(n_leaf):
        prev = 0
        for j in range(offsets[r], offsets[r + 1]):
            d = values[j] - prev
            prev = values[j]
            while d >= 128:
                out[m] = (d & 127) | 128
                d >>= 7
                m += 1
            out[m] = d
            m += 1
    return byte_off, out


@njit(cache=True)
def _varint_decode(byte_off, payload):
    n_leaf = byte_off.size - 1
    count = 0
    for b in payload:
        if b < 128:
            count += 1
    offsets = np.zeros(n_leaf + 1, dtype=np.int64)
    values = np.empty(count, dtype=np.int64)
    m = 0
    for r in range(n_leaf):
        prev = 0
        pos = byte_off[r]
        end = byte_off[r + 1]
        while pos < end:
            d = 0
            shift = 0
            while True:
                b = np.int64(payload[pos])
                pos += 1
                d |= (b & 127) << shift
                shift += 7
                if b < 128 or pos >= end:
                    break
            prev += d
            values[m] = prev
            m += 1
        offsets[r + 1] = m
    return offsets, values[:m]


def _n_words(n: int) -> int:
    return max(1, -(-n // 64))


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()
        self.sizes: dict[str, int] = {}
        self._mark = 0

    def section(self, name: str) -> None:
        pos = self.buf.tell()
        self.sizes[name] = self.sizes.get(name, 0) + pos - self._mark
        self._mark = pos

    def pack(self, fmt: str, *vals) -> None:
        self.buf.write(struct.pack("<" + fmt, *vals))

    def array(self, arr: np.ndarray, dtype: str) -> None:
        self.buf.write(np.ascontiguousarray(arr).astype(dtype, copy=False).tobytes())


def _write_bits(w: _Writer, bv: RankSelectBits) -> None:
    w.pack("Q", bv.n)
    w.array(bv.words, "<u8")


def _write_wm(w: _Writer, wm: WaveletMatrix) -> None:
    w.pack("QB", wm.sigma, wm.levels)
    for lvl in range(wm.levels):
        w.array(wm.words[lvl], "<u8")
        w.pack("Q", int(wm.zeros[lvl]))


FLAG_DUPLICATE_KEYS = 1


def dumps(index: XbwIndex) -> tuple[bytes, dict[str, int]]:
    """Serialize; returns the bytes and the size of each section."""
    flags = FLAG_DUPLICATE_KEYS if index.duplicate_keys else 0
    w = _Writer()
    w.buf.write(MAGIC)
    w.pack("IIQ", VERSION, flags, index.n)
    w.section("header")
    labels = index.symtab.labels
    w.pack("Q", len(labels))
    for lab in labels:
        raw = lab.text.encode("utf-8", "surrogatepass")
        w.pack("BI", int(lab.kind), len(raw))
        w.buf.write(raw)
    w.section("symtab")
    for name in ("last", "leaf", "diff"):
        _write_bits(w, getattr(index, name))
        w.section(name)
    for name in ("label", "pf"):
        _write_wm(w, getattr(index, name))
        w.section(name)
    w.array(index.F, "<u8")
    w.section("F")
    byte_off, payload = _varint_encode(index.id_offsets, index.id_values)
    w.pack("Q", len(byte_off) - 1)
    w.array(byte_off, "<u8")
    w.buf.write(payload.tobytes())
    w.section("ids")
    body = w.buf.getvalue()
    data = body + checksum(body)
    w.sizes["checksum"] = CHECKSUM_BYTES
    return data, w.sizes


def save(index: XbwIndex, sink) -> dict[str, int]:
    """Write to a path or binary file object; returns section sizes."""
    data, sizes = dumps(index)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as fh:
            fh.write(data)
    else:
        sink.write(data)
    return sizes


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, count: int) -> memoryview:
        if count < 0 or self.pos + count > len(self.data):
            raise Truncated(f"index file ends inside a section (need {count} bytes at offset {self.pos})")
        out = self.data[self.pos: self.pos + count]
        self.pos += count
        return out

    def unpack(self, fmt: str):
        size = struct.calcsize("<" + fmt)
        return struct.unpack("<" + fmt, self.take(size))

    def u64_array(self, count: int) -> np.ndarray:
        if count > len(self.data):
            raise Truncated("array length exceeds file size")
        return np.frombuffer(self.take(8 * count), dtype="<u8").copy()


def loads(data: bytes) -> tuple[XbwIndex, dict[str, int]]:
    """Parse an index; returns it and the section sizes."""
    if len(data) < len(MAGIC) or bytes(data[:4]) != MAGIC:
        raise BadMagic("not a jxbw index (bad magic bytes)")
    r = _Reader(data)
    r.take(4)
    sizes = {}
    (version,) = r.unpack("I")
    if version != VERSION:
        raise VersionMismatch(f"index format version {version}, expected {VERSION}")
    flags, n = r.unpack("IQ")
    sizes["header"] = r.pos
    mark = r.pos

    def close(name):
        nonlocal mark
        sizes[name] = r.pos - mark
        mark = r.pos

    (count,) = r.unpack("Q")
    raw_labels = []
    for _ in range(count):
        kind, length = r.unpack("BI")
        raw_labels.append((kind, bytes(r.take(length))))
    close("symtab")
    bits = {}
    lengths = []
    for name in ("last", "leaf", "diff"):
        (length,) = r.unpack("Q")
        lengths.append(length)
        bits[name] = r.u64_array(_n_words(n))
        close(name)
    wms = {}
    for name in ("label", "pf"):
        sigma, levels = r.unpack("QB")
        rows, zeros = [], []
        for _ in range(levels):
            rows.append(r.u64_array(_n_words(n)))
            zeros.append(r.unpack("Q")[0])
        wms[name] = (sigma, rows, zeros)
        close(name)
    alphabet = wms["label"][0]
    F = r.u64_array(alphabet + 2).astype(np.int64)
    close("F")
    (leaf_count,) = r.unpack("Q")
    byte_off = r.u64_array(leaf_count + 1).astype(np.int64)
    payload_len = int(byte_off[-1]) if leaf_count + 1 else 0
    payload = np.frombuffer(r.take(payload_len), dtype=np.uint8).copy()
    close("ids")
    remaining = len(data) - r.pos
    if remaining < CHECKSUM_BYTES:
        raise Truncated("index file ends before its checksum")
    if remaining > CHECKSUM_BYTES:
        raise ChecksumFail("unexpected bytes after the index payload")
    if checksum(r.data[: r.pos]) != bytes(r.data[r.pos:]):
        raise ChecksumFail("index checksum mismatch")
    sizes["checksum"] = CHECKSUM_BYTES
    if any(length != n for length in lengths):
        raise IndexFormatError(f"bit array lengths {lengths} disagree with n={n}")

    labels = [Label(Kind(kind), raw.decode("utf-8", "surrogatepass")) for kind, raw in raw_labels]
    offsets, values = _varint_decode(byte_off, payload)
    index = XbwIndex(
        label=WaveletMatrix(sigma=wms["label"][0], rows=wms["label"][1], zeros=wms["label"][2], n=n),
        pf=WaveletMatrix(sigma=wms["pf"][0], rows=wms["pf"][1], zeros=wms["pf"][2], n=n),
        last=RankSelectBits(words=bits["last"], n=n),
        leaf=RankSelectBits(words=bits["leaf"], n=n),
        diff=RankSelectBits(words=bits["diff"], n=n),
        F=F,
        id_offsets=offsets,
        id_values=values,
        symtab=SymbolTable(labels),
        duplicate_keys=bool(flags & FLAG_DUPLICATE_KEYS),
    )
    return index, sizes


def load(source) -> XbwIndex:
    """Read from a path or binary file object."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    return loads(data)[0]


def read_with_layout(path) -> tuple[XbwIndex, dict[str, int], int]:
    with open(path, "rb") as fh:
        data = fh.read()
    index, sizes = loads(data)
    return index, sizes, len(data)
