import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyndbg.errors import LengthMismatch, SymbolOutOfRange
from dyndbg.fingerprint import M61, KrParams, fp, fp_roll, hfp, hfp_replace
from dyndbg.kmer import DNA, Direction, encode_kmer, histogram, roll

TOY = KrParams.toy()


def poly(codes, r, p):
    # independent evaluation: leftmost symbol gets the highest power
    k = len(codes)
    return sum(c * r ** (k - 1 - i) for i, c in enumerate(codes)) % p


def kmer(text):
    return encode_kmer(text, DNA, len(text))


def test_toy_vectors_against_direct_polynomial():
    for text in ("ACG", "CGT", "AAA", "TTT", "GCA"):
        assert fp(kmer(text), TOY) == poly(DNA.encode(text), 10, 97)


def test_toy_vectors_hand_values():
    assert fp(kmer("ACG"), TOY) == 12
    assert fp(kmer("CGT"), TOY) == 26
    assert fp(kmer("AAA"), TOY) == 0
    assert hfp((1, 1, 1, 0), TOY) == 14
    assert hfp((0, 1, 1, 1), TOY) == 43


def test_toy_rolls():
    assert TOY.r_inv == 68
    assert fp_roll(12, Direction.RIGHT, 0, 3, TOY) == 26
    assert fp_roll(26, Direction.LEFT, 3, 0, TOY) == 12
    assert fp_roll(0, Direction.RIGHT, 0, 0, TOY) == 0


def test_toy_hist_replace():
    assert hfp_replace(14, 0, 3, TOY) == 43
    assert hfp_replace(43, 3, 0, TOY) == 14
    assert hfp_replace(14, 1, 1, TOY) == 14
    assert hfp(histogram(kmer("ACG")), TOY) == hfp(histogram(kmer("GCA")), TOY) == 14


def test_param_invariants():
    prm = KrParams.draw(15, 4, np.random.default_rng(3))
    assert prm.p == M61
    assert prm.r * prm.r_inv % prm.p == 1
    assert prm.r_pow_k1 == pow(prm.r, 14, prm.p)


def test_errors():
    with pytest.raises(LengthMismatch):
        fp(kmer("ACGT"), TOY)
    with pytest.raises(SymbolOutOfRange):
        fp_roll(0, Direction.RIGHT, 0, 7, TOY)
    with pytest.raises(LengthMismatch):
        hfp((1, 2), TOY)


def test_determinism():
    a = KrParams.draw(21, 4, np.random.default_rng(99))
    b = KrParams.draw(21, 4, np.random.default_rng(99))
    assert a == b
    assert fp(kmer("A" * 21), a) == fp(kmer("A" * 21), b)


def test_rolling_agrees_with_recompute_1e5():
    rng = random.Random(2024)
    k = 21
    prm = KrParams.draw(k, 4, np.random.default_rng(5))
    v = kmer("".join(rng.choice("ACGT") for _ in range(k)))
    f = fp(v, prm)
    for step in range(100_000):
        c = rng.randrange(4)
        if step % 2:
            f = fp_roll(f, Direction.RIGHT, v.codes[0], c, prm)
            v = roll(v, Direction.RIGHT, c)
        else:
            f = fp_roll(f, Direction.LEFT, v.codes[-1], c, prm)
            v = roll(v, Direction.LEFT, c)
        if step % 97 == 0:
            assert f == poly(v.codes, prm.r, prm.p)
    assert f == fp(v, prm)


def test_hist_replace_agrees_with_recompute():
    rng = random.Random(7)
    prm = KrParams.draw(10, 4, np.random.default_rng(1))
    h = [3, 3, 2, 2]
    f = hfp(h, prm)
    for _ in range(100_000):
        b = rng.choice([c for c in range(4) if h[c]])
        a = rng.randrange(4)
        f = hfp_replace(f, b, a, prm)
        h[b] -= 1
        h[a] += 1
    assert f == sum(c * pow(prm.r, i, prm.p) for i, c in enumerate(h)) % prm.p


def test_no_collisions_among_1e6_kmers():
    from dyndbg import kernels
    seed = 11
    rng = np.random.default_rng(seed)
    k = 31
    prm = KrParams.draw(k, 4, rng)
    codes = rng.integers(0, 4, size=1_000_000 + k - 1).astype(np.uint8)
    fps = kernels.window_fingerprints(codes, k, prm.r, prm.r_pow_k1, prm.p)
    words = kernels.window_words(codes, k, 2)
    distinct_kmers = np.unique(words).size
    assert np.unique(fps).size == distinct_kmers, f"collision with seed={seed}"


@given(st.text(alphabet="ACGT", min_size=5, max_size=5), st.permutations(range(5)))
def test_hfp_permutation_invariant(text, perm):
    prm = KrParams.draw(5, 4, np.random.default_rng(0))
    shuffled = "".join(text[i] for i in perm)
    assert hfp(histogram(kmer(text)), prm) == hfp(histogram(kmer(shuffled)), prm)


@given(st.text(alphabet="ACGT", min_size=8, max_size=8), st.integers(0, 3))
def test_fp_roll_property(text, c):
    prm = KrParams.draw(8, 4, np.random.default_rng(1))
    v = kmer(text)
    w = roll(v, Direction.RIGHT, c)
    assert fp_roll(fp(v, prm), Direction.RIGHT, v.codes[0], c, prm) == fp(w, prm)
    u = roll(v, Direction.LEFT, c)
    assert fp_roll(fp(v, prm), Direction.LEFT, v.codes[-1], c, prm) == fp(u, prm)
