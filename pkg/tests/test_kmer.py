import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyndbg.errors import LengthMismatch, SymbolOutOfRange, UnknownSymbol
from dyndbg.kmer import (BINARY, DNA, PROTEIN, Alphabet, Direction, KmerCodec, decode_kmer,
                         encode_kmer, histogram, roll)


def test_encode_codes():
    assert encode_kmer("ACG", DNA, 3).codes == (0, 1, 2)


def test_encode_errors():
    with pytest.raises(LengthMismatch):
        encode_kmer("A", DNA, 3)
    with pytest.raises(UnknownSymbol):
        encode_kmer("ACN", DNA, 3)


def test_roll_examples():
    acg = encode_kmer("ACG", DNA, 3)
    cgt = roll(acg, Direction.RIGHT, DNA.code("T"))
    assert cgt.text == "CGT"
    assert roll(cgt, Direction.LEFT, DNA.code("A")).text == "ACG"
    aaa = encode_kmer("AAA", DNA, 3)
    assert roll(aaa, Direction.RIGHT, 0) == aaa


def test_roll_rejects_bad_symbol():
    with pytest.raises(SymbolOutOfRange):
        roll(encode_kmer("ACG", DNA, 3), Direction.RIGHT, 4)


def test_histogram_examples():
    assert histogram(encode_kmer("ACG", DNA, 3)) == (1, 1, 1, 0)
    assert histogram(encode_kmer("AAA", DNA, 3)) == (3, 0, 0, 0)
    cgt = roll(encode_kmer("ACG", DNA, 3), Direction.RIGHT, 3)
    assert histogram(cgt) == (0, 1, 1, 1)


def test_lambda():
    assert BINARY.lam == 1
    assert DNA.lam == 2
    assert PROTEIN.lam == 5
    assert Alphabet("ABC").lam == 2


def test_alphabet_validation():
    with pytest.raises(ValueError):
        Alphabet("A")
    with pytest.raises(ValueError):
        Alphabet("AA")


def test_encode_array_matches_encode():
    text = "GATTACA" * 5
    assert DNA.encode_array(text).tolist() == DNA.encode(text)
    with pytest.raises(UnknownSymbol):
        DNA.encode_array("ACGN")


kmers = st.integers(1, 64).flatmap(
    lambda k: st.tuples(st.just(k), st.text(alphabet="ACGT", min_size=k, max_size=k)))


@given(kmers, st.integers(0, 3))
def test_roll_right_then_left_is_identity(kv, c):
    k, text = kv
    v = encode_kmer(text, DNA, k)
    first = v.codes[0]
    assert roll(roll(v, Direction.RIGHT, c), Direction.LEFT, first) == v


@given(kmers, st.integers(0, 3))
def test_histogram_tracks_rolls(kv, c):
    k, text = kv
    v = encode_kmer(text, DNA, k)
    want = list(histogram(v))
    want[v.codes[0]] -= 1
    want[c] += 1
    assert histogram(roll(v, Direction.RIGHT, c)) == tuple(want)


@pytest.mark.parametrize("alpha", [BINARY, DNA, PROTEIN])
def test_pack_roundtrip_random(alpha):
    rng = random.Random(alpha.sigma)
    for _ in range(10_000 // 3):
        k = rng.randint(1, 64)
        text = "".join(rng.choice(alpha.symbols) for _ in range(k))
        v = encode_kmer(text, alpha, k)
        assert decode_kmer(v) == text
        assert KmerCodec(alpha, k).decode(v.word) == text
