"""Karp-Rabin fingerprints of k-mers and of their character histograms.

Fingerprints are plain Python ints in ``[0, p)``. The production modulus is
the Mersenne prime 2**61 - 1; only the base ``r`` is random. A k-mer with
codes ``c_1 .. c_k`` hashes to ``sum(c_i * r**(k - i)) mod p`` (leftmost code
carries the highest power), so sliding the window costs O(1). Histograms hash
to ``sum(counts[c] * r**c) mod p``, which is invariant under permutation of
the underlying k-mer and updates in O(1) when one symbol is swapped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, SymbolOutOfRange
from .kmer import Direction, Kmer

M61 = (1 << 61) - 1


@dataclass(frozen=True)
class KrParams:
    k: int
    sigma: int
    r: int
    p: int = M61
    seed: int = 0
    r_pow_k1: int = field(init=False)
    r_inv: int = field(init=False)
    r_pows: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.r < self.p:
            raise ValueError("base r must lie in 1..p-1")
        object.__setattr__(self, "r_pow_k1", pow(self.r, self.k - 1, self.p))
        object.__setattr__(self, "r_inv", pow(self.r, -1, self.p))
        object.__setattr__(
            self, "r_pows", tuple(pow(self.r, c, self.p) for c in range(self.sigma))
        )

    @classmethod
    def draw(cls, k: int, sigma: int, rng: np.random.Generator, seed: int = 0) -> "KrParams":
        # r = 1 would make every permutation collide; skip it
        r = int(rng.integers(2, M61 - 1, dtype=np.uint64))
        return cls(k=k, sigma=sigma, r=r, p=M61, seed=seed)

    @classmethod
    def toy(cls, k: int = 3, sigma: int = 4, p: int = 97, r: int = 10) -> "KrParams":
        """Small hand-checkable parameters for tests and documentation."""
        return cls(k=k, sigma=sigma, r=r, p=p, seed=0)

    @property
    def is_production(self) -> bool:
        return self.p == M61

    def with_k(self, k: int) -> "KrParams":
        return KrParams(k=k, sigma=self.sigma, r=self.r, p=self.p, seed=self.seed)

    # ---- k-mer fingerprints -------------------------------------------------
    def fp_codes(self, codes: Sequence[int]) -> int:
        if len(codes) != self.k:
            raise LengthMismatch(f"expected {self.k} codes, got {len(codes)}")
        f, r, p = 0, self.r, self.p
        for c in codes:
            f = (f * r + c) % p
        return f

    def fp_word(self, word: int, lam: int) -> int:
        f, r, p = 0, self.r, self.p
        mask = (1 << lam) - 1
        for shift in range(lam * (self.k - 1), -1, -lam):
            f = (f * r + ((word >> shift) & mask)) % p
        return f

    def roll_right(self, f: int, dropped: int, added: int) -> int:
        return ((f - dropped * self.r_pow_k1) * self.r + added) % self.p

    def roll_left(self, f: int, dropped: int, added: int) -> int:
        return ((f - dropped) * self.r_inv + added * self.r_pow_k1) % self.p

    # ---- histogram fingerprints ---------------------------------------------
    def hfp(self, counts: Sequence[int]) -> int:
        if len(counts) != self.sigma:
            raise LengthMismatch(f"expected {self.sigma} counts, got {len(counts)}")
        return sum(c * rp for c, rp in zip(counts, self.r_pows)) % self.p

    def hfp_replace(self, f: int, removed: int, added: int) -> int:
        return (f - self.r_pows[removed] + self.r_pows[added]) % self.p


def _check_symbol(c: int, sigma: int) -> None:
    if not 0 <= c < sigma:
        raise SymbolOutOfRange(f"symbol code {c} outside 0..{sigma - 1}")


def fp(v: Kmer, params: KrParams) -> int:
    if v.k != params.k:
        raise LengthMismatch(f"k-mer has k={v.k}, parameters expect k={params.k}")
    return params.fp_word(v.word, v.alphabet.lam)


def fp_roll(
    f: int, direction: Direction, dropped: int, added: int, params: KrParams
) -> int:
    _check_symbol(dropped, params.sigma)
    _check_symbol(added, params.sigma)
    if direction is Direction.RIGHT:
        return params.roll_right(f, dropped, added)
    return params.roll_left(f, dropped, added)


def hfp(h: Sequence[int], params: KrParams) -> int:
    return params.hfp(h)


def hfp_replace(f: int, removed: int, added: int, params: KrParams) -> int:
    return params.hfp_replace(f, removed, added)
