"""Alphabets, bit-packed k-mers, rolling edits and Parikh vectors.

A k-mer is stored as a single integer ``word`` holding ``k`` codes of
``lam`` bits each, leftmost symbol in the most significant position. All
graph internals work on these raw words through :class:`KmerCodec`; the
:class:`Kmer` value type is the public face.
"""
from __future__ import annotations

import enum
import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import LengthMismatch, SymbolOutOfRange, UnknownSymbol

MAX_K = 256


class Direction(enum.Enum):
    RIGHT = "append-right"  # follow an outgoing edge
    LEFT = "prepend-left"  # follow an incoming edge


@dataclass(frozen=True)
class Alphabet:
    symbols: str
    _codes: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValueError("an alphabet needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        if len(self.symbols) > 256:
            raise ValueError("at most 256 symbols are supported")
        object.__setattr__(self, "_codes", {c: i for i, c in enumerate(self.symbols)})

    @property
    def sigma(self) -> int:
        return len(self.symbols)

    @property
    def lam(self) -> int:
        """Bits per symbol, never below one."""
        return max(1, (self.sigma - 1).bit_length())

    def code(self, ch: str) -> int:
        try:
            return self._codes[ch]
        except KeyError:
            raise UnknownSymbol(f"symbol {ch!r} is not in the alphabet") from None

    def encode(self, text: str) -> list[int]:
        codes = self._codes
        try:
            return [codes[c] for c in text]
        except KeyError:
            bad = next(c for c in text if c not in codes)
            raise UnknownSymbol(f"symbol {bad!r} is not in the alphabet") from None

    def encode_array(self, text: str) -> np.ndarray:
        """Vectorised text -> code array (uint8 for sigma <= 256)."""
        try:
            raw = np.frombuffer(text.encode("latin-1"), dtype=np.uint8)
        except UnicodeEncodeError:
            self.encode(text)  # raises UnknownSymbol on the offending character
            raise
        table = np.full(256, -1, dtype=np.int16)
        for c, i in self._codes.items():
            table[ord(c)] = i
        out = table[raw]
        if out.size and (out < 0).any():
            bad = text[int(np.flatnonzero(out < 0)[0])]
            raise UnknownSymbol(f"symbol {bad!r} is not in the alphabet")
        return out.astype(np.uint8)

    def decode(self, codes: Iterable[int]) -> str:
        return "".join(self.symbols[c] for c in codes)

    @classmethod
    def preset(cls, name: str) -> "Alphabet":
        try:
            return PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown alphabet preset {name!r}") from None

    @classmethod
    def for_sigma(cls, sigma: int) -> "Alphabet":
        """A canonical alphabet with ``sigma`` symbols (used by fuzzing/bench)."""
        if sigma == 2:
            return BINARY
        if sigma == 4:
            return DNA
        if sigma == 20:
            return PROTEIN
        if 2 < sigma <= len(_GENERIC):
            return cls(_GENERIC[:sigma])
        if sigma <= 256:
            return cls("".join(chr(i) for i in range(sigma)))
        raise ValueError(f"unsupported sigma {sigma}")


_GENERIC = string.digits + string.ascii_letters

DNA = Alphabet("ACGT")
BINARY = Alphabet("01")
PROTEIN = Alphabet("ACDEFGHIKLMNPQRSTVWY")
BYTE = Alphabet("".join(chr(i) for i in range(256)))
PRESETS = {"dna": DNA, "binary": BINARY, "protein": PROTEIN, "byte": BYTE}


class KmerCodec:
    """Word-level k-mer arithmetic for one (alphabet, k) pair."""

    __slots__ = ("alphabet", "k", "lam", "sigma", "sym_mask", "word_mask", "high_shift")

    def __init__(self, alphabet: Alphabet, k: int):
        if not 1 <= k <= MAX_K:
            raise ValueError(f"k must lie in 1..{MAX_K}, got {k}")
        self.alphabet = alphabet
        self.k = k
        self.lam = alphabet.lam
        self.sigma = alphabet.sigma
        self.sym_mask = (1 << self.lam) - 1
        self.word_mask = (1 << (self.lam * k)) - 1
        self.high_shift = self.lam * (k - 1)

    @property
    def fits_uint64(self) -> bool:
        return self.lam * self.k <= 64

    def pack(self, codes: Sequence[int]) -> int:
        if len(codes) != self.k:
            raise LengthMismatch(f"expected {self.k} symbols, got {len(codes)}")
        w = 0
        lam = self.lam
        for c in codes:
            w = (w << lam) | c
        return w

    def unpack(self, word: int) -> list[int]:
        lam, m = self.lam, self.sym_mask
        return [(word >> (lam * (self.k - 1 - i))) & m for i in range(self.k)]

    def encode(self, text: str) -> int:
        if len(text) != self.k:
            raise LengthMismatch(f"expected a {self.k}-mer, got length {len(text)}")
        return self.pack(self.alphabet.encode(text))

    def decode(self, word: int) -> str:
        return self.alphabet.decode(self.unpack(word))

    def first(self, word: int) -> int:
        return word >> self.high_shift

    def last(self, word: int) -> int:
        return word & self.sym_mask

    def roll_right(self, word: int, c: int) -> int:
        return ((word << self.lam) & self.word_mask) | c

    def roll_left(self, word: int, c: int) -> int:
        return (word >> self.lam) | (c << self.high_shift)

    def histogram(self, word: int) -> tuple[int, ...]:
        counts = [0] * self.sigma
        for c in self.unpack(word):
            counts[c] += 1
        return tuple(counts)


@dataclass(frozen=True)
class Kmer:
    alphabet: Alphabet
    k: int
    word: int

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(KmerCodec(self.alphabet, self.k).unpack(self.word))

    @property
    def text(self) -> str:
        return self.alphabet.decode(self.codes)

    def __str__(self) -> str:
        return self.text


def encode_kmer(text: str, alphabet: Alphabet, k: int) -> Kmer:
    return Kmer(alphabet, k, KmerCodec(alphabet, k).encode(text))


def decode_kmer(v: Kmer) -> str:
    return v.text


def roll(v: Kmer, direction: Direction, c: int) -> Kmer:
    """Slide ``v`` by one symbol; RIGHT follows an out-edge, LEFT an in-edge."""
    if not 0 <= c < v.alphabet.sigma:
        raise SymbolOutOfRange(f"symbol code {c} outside 0..{v.alphabet.sigma - 1}")
    codec = KmerCodec(v.alphabet, v.k)
    if direction is Direction.RIGHT:
        return Kmer(v.alphabet, v.k, codec.roll_right(v.word, c))
    return Kmer(v.alphabet, v.k, codec.roll_left(v.word, c))


def histogram(v: Kmer) -> tuple[int, ...]:
    return KmerCodec(v.alphabet, v.k).histogram(v.word)


def histogram_of_codes(codes: Iterable[int], sigma: int) -> tuple[int, ...]:
    counts = [0] * sigma
    for c in codes:
        counts[c] += 1
    return tuple(counts)
