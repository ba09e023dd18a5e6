import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jxbw.errors import NotEnoughOccurrences, OutOfRange
from jxbw.succinct import RankSelectBits, WaveletMatrix, pack_bits, unpack_bits


def scan_rank(arr, c):
    """rank for i = 0..n by linear scan."""
    return np.concatenate([[0], np.cumsum(np.asarray(arr) == c)])


def scan_select(arr, c):
    return np.flatnonzero(np.asarray(arr) == c) + 1


def check_bits(bits):
    bv = RankSelectBits(bits)
    n = len(bits)
    assert np.array_equal(bv.to_array(), np.asarray(bits, dtype=bool))
    assert np.array_equal(bv.access_all(), np.asarray(bits, dtype=np.int64))
    ranks = scan_rank(bits, 1)
    assert np.array_equal(bv.rank1_all(), ranks)
    assert np.array_equal(bv.select1_all(), scan_select(bits, 1))
    assert np.array_equal(bv.select0_all(), scan_select(bits, 0))
    return bv, ranks, n


@pytest.mark.parametrize("n", [0, 1, 63, 64, 65, 511, 512, 513, 4097, 9000])
@pytest.mark.parametrize("density", [0.0, 0.03, 0.5, 0.97, 1.0])
def test_bits_against_scan(n, density):
    rng = np.random.default_rng(n)
    bits = rng.random(n) < density
    bv, ranks, _ = check_bits(bits)
    for i in range(0, n + 1, max(1, n // 50)):
        assert bv.rank1(i) == ranks[i]
        assert bv.rank(0, i) == i - ranks[i]
    ones = scan_select(bits, 1)
    for k in range(1, ones.size + 1, max(1, ones.size // 50)):
        assert bv.select1(k) == ones[k - 1]
        assert bv.rank1(bv.select1(k)) == k


def test_bits_errors():
    bv = RankSelectBits([1, 0, 1])
    assert bv.count(1) == 2 and bv.count(0) == 1 and len(bv) == 3
    with pytest.raises(OutOfRange):
        bv.access(0)
    with pytest.raises(OutOfRange):
        bv.rank1(4)
    with pytest.raises(NotEnoughOccurrences):
        bv.select1(3)
    with pytest.raises(NotEnoughOccurrences):
        bv.select0(2)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.booleans(), max_size=700))
def test_bits_hypothesis(bits):
    check_bits(bits)


def test_pack_round_trip():
    rng = np.random.default_rng(1)
    for n in (0, 1, 64, 100):
        b = rng.random(n) < 0.5
        w = pack_bits(b)
        assert w.size == max(1, -(-n // 64))
        assert np.array_equal(unpack_bits(w, n), b)


def check_wm(values, sigma):
    wm = WaveletMatrix(values, sigma)
    assert np.array_equal(wm.to_array(), values)
    for c in range(sigma + 1):
        assert np.array_equal(wm.rank_all(c), scan_rank(values, c))
        assert np.array_equal(wm.select_all(c), scan_select(values, c))
    return wm


@pytest.mark.parametrize("sigma", [1, 2, 3, 7, 8, 255, 256])
def test_wavelet_against_scan(sigma):
    rng = np.random.default_rng(sigma)
    values = rng.integers(0, sigma + 1, size=2000)
    wm = check_wm(values, sigma)
    for i in range(1, values.size + 1, 97):
        assert wm.access(i) == values[i - 1]
        c = int(values[i - 1])
        assert wm.select(c, wm.rank(c, i)) == i


def test_wavelet_small():
    wm = WaveletMatrix([1, 2, 1, 3], 3)
    assert wm.rank(1, 3) == 2 and wm.select(1, 2) == 3 and wm.count(0) == 0
    with pytest.raises(NotEnoughOccurrences):
        wm.select(2, 2)
    with pytest.raises(OutOfRange):
        wm.access(5)
    with pytest.raises(ValueError):
        WaveletMatrix([5], 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40).flatmap(
    lambda s: st.tuples(st.just(s), st.lists(st.integers(0, s), max_size=300))))
def test_wavelet_hypothesis(case):
    sigma, values = case
    check_wm(np.asarray(values, dtype=np.int64), sigma)


def test_directory_overhead_is_small():
    bv = RankSelectBits(np.random.default_rng(0).random(1_000_000) < 0.5)
    assert bv.overhead < 0.25
