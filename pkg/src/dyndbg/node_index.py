"""Fingerprint -> slot maps.

``StaticIndex`` is a minimal perfect hash over a fixed fingerprint set (BBHash
style: levels of bit arrays, keys that collide at one level fall through to
the next, slot = rank of the key's bit across all levels). It is total: a
fingerprint outside the build set still maps to some slot in ``0..n-1``.

``DynamicIndex`` is injective into ``0..m-1`` with ``m <= 3 * count``; it grows
and shrinks by full rebuilds and reports every rebuild as a
:class:`SlotsRemapped` event so owners of slot-indexed arrays can re-layout.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import NotPresent, RestartNeeded

_M64 = (1 << 64) - 1


def mix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


class StaticIndex:
    def __init__(self, n, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, seed0,
                 fingerprint_check: Optional[np.ndarray] = None):
        self.n = int(n)
        self.bits = np.asarray(bits, dtype=np.uint64)
        self.word_off = np.asarray(word_off, dtype=np.int64)
        self.nbits = np.asarray(nbits, dtype=np.uint64)
        self.seeds = np.asarray(seeds, dtype=np.uint64)
        self.rank = np.asarray(rank, dtype=np.int64)
        self.fb_keys = np.asarray(fb_keys, dtype=np.uint64)
        self.fb_slots = np.asarray(fb_slots, dtype=np.int64)
        self.seed0 = int(seed0)
        self.fingerprint_check = fingerprint_check
        # python-side mirrors for scalar lookups
        self._bits = self.bits.tolist()
        self._rank = self.rank.tolist()
        self._levels = list(zip(self.seeds.tolist(), self.nbits.tolist(), self.word_off.tolist()))
        self._fb = dict(zip(self.fb_keys.tolist(), self.fb_slots.tolist()))

    @property
    def tables(self) -> tuple:
        return (self.bits, self.word_off, self.nbits, self.seeds, self.rank,
                self.fb_keys, self.fb_slots, max(self.n, 1), self.seed0)

    def slot(self, f: int) -> int:
        """Slot of fingerprint ``f``; arbitrary but in range for non-members."""
        bits = self._bits
        for seed, nb, off in self._levels:
            h = mix64(f ^ seed) % nb
            w = off + (h >> 6)
            word = bits[w]
            b = h & 63
            if (word >> b) & 1:
                return self._rank[w] + (word & ((1 << b) - 1)).bit_count()
        s = self._fb.get(f)
        if s is not None:
            return s
        return mix64(f ^ self.seed0) % max(self.n, 1)

    def slots(self, fps: np.ndarray) -> np.ndarray:
        return kernels.mphf_lookup(fps, self.tables)

    def rejects(self, f: int, slot: int) -> bool:
        """True when the optional fingerprint check proves ``f`` is not stored."""
        fc = self.fingerprint_check
        return fc is not None and int(fc[slot]) != f

    @property
    def size_bits(self) -> int:
        return 64 * (self.bits.size + 2 * self.fb_keys.size + 3 * self.seeds.size)


def build_static(fps: np.ndarray, seed: int, gamma: float = 2.0, max_levels: int = 24,
                 check_fingerprints: bool = False) -> StaticIndex:
    """Build a minimal perfect hash over ``fps``.

    Raises RestartNeeded if two inputs share a fingerprint, so the caller can
    redraw its hash base and re-stream the keys.
    """
    fps = np.ascontiguousarray(fps, dtype=np.uint64)
    n = fps.shape[0]
    if np.unique(fps).shape[0] != n:
        raise RestartNeeded("duplicate fingerprint among distinct keys")
    rng = np.random.default_rng([seed & _M64, 0x6D706866])
    seeds_all = rng.integers(0, 2**64 - 1, size=max_levels, dtype=np.uint64, endpoint=True)
    seed0 = int(rng.integers(0, 2**63))

    remaining = fps
    level_bits, word_off, nbits, seeds = [], [], [], []
    off = 0
    for lvl in range(max_levels):
        if remaining.size == 0:
            break
        size = max(64, -(-int(gamma * remaining.size) // 64) * 64)
        pos = (kernels._np.mix64(remaining ^ seeds_all[lvl]) % np.uint64(size)).astype(np.int64)
        counts = np.bincount(pos, minlength=size)
        alone = counts[pos] == 1
        words = np.zeros(size // 64, dtype=np.uint64)
        p = pos[alone]
        np.bitwise_or.at(words, p >> 6, np.uint64(1) << (p & 63).astype(np.uint64))
        level_bits.append(words)
        word_off.append(off)
        nbits.append(size)
        seeds.append(seeds_all[lvl])
        off += size // 64
        remaining = remaining[~alone]
    bits = np.concatenate(level_bits) if level_bits else np.zeros(0, dtype=np.uint64)
    pc = kernels._np.popcount64(bits).astype(np.int64)
    rank = np.concatenate(([0], np.cumsum(pc)[:-1])) if bits.size else np.zeros(0, np.int64)
    placed = int(pc.sum())
    fb_keys = np.sort(remaining)
    fb_slots = placed + np.arange(fb_keys.size, dtype=np.int64)
    idx = StaticIndex(n, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, seed0)

    # membership bitvector pass: every input must claim a distinct slot
    slots = idx.slots(fps)
    claimed = np.zeros(n, dtype=bool)
    if n and (slots.min() < 0 or slots.max() >= n):
        raise RestartNeeded("slot outside 0..n-1")
    claimed[slots] = True
    if not claimed.all():
        raise RestartNeeded("two keys claimed the same slot")
    if check_fingerprints:
        fc = np.zeros(n, dtype=np.uint64)
        fc[slots] = fps
        idx.fingerprint_check = fc
    return idx


def static_slot(f: int, idx: StaticIndex) -> int:
    return idx.slot(f)


@dataclass(frozen=True)
class SlotsRemapped:
    old_to_new: np.ndarray  # int64, -1 for slots that were free
    new_capacity: int


@dataclass(frozen=True)
class InsertOutcome:
    slot: int
    already_present: bool
    remap: Optional[SlotsRemapped] = None


class DynamicIndex:
    def __init__(self, capacity: int = 2):
        self.m = max(2, capacity)
        self.table: dict[int, int] = {}
        self._free = list(range(self.m))
        self.rebuild_work = 0
        self.rebuilds = 0

    @classmethod
    def from_fingerprints(cls, fps) -> "DynamicIndex":
        """Bulk load; input order defines slots 0..n-1."""
        fps = [int(f) for f in fps]
        idx = cls(max(2, 2 * len(fps)))
        for s, f in enumerate(fps):
            if f in idx.table:
                raise RestartNeeded("duplicate fingerprint among distinct keys")
            idx.table[f] = s
        idx._free = list(range(len(fps), idx.m))
        return idx

    @property
    def count(self) -> int:
        return len(self.table)

    def lookup(self, f: int) -> Optional[int]:
        return self.table.get(f)

    def insert(self, f: int) -> InsertOutcome:
        s = self.table.get(f)
        if s is not None:
            return InsertOutcome(s, True)
        remap = None
        if self.count + 1 > self.m:
            remap = self._rebuild(2 * (self.count + 1))
        s = heapq.heappop(self._free)
        self.table[f] = s
        return InsertOutcome(s, False, remap)

    def remove(self, f: int) -> Optional[SlotsRemapped]:
        try:
            s = self.table.pop(f)
        except KeyError:
            raise NotPresent(f"fingerprint {f} not in index") from None
        heapq.heappush(self._free, s)
        if 3 * self.count < self.m:
            new_m = max(2, 2 * self.count)
            if new_m != self.m:
                return self._rebuild(new_m)
        return None

    def _rebuild(self, new_m: int) -> SlotsRemapped:
        old_to_new = np.full(self.m, -1, dtype=np.int64)
        items = sorted(self.table.items(), key=lambda kv: kv[1])
        for new, (f, old) in enumerate(items):
            old_to_new[old] = new
            self.table[f] = new
        self.m = new_m
        self._free = list(range(len(items), new_m))
        self.rebuild_work += len(items)
        self.rebuilds += 1
        return SlotsRemapped(old_to_new, new_m)

    def items_by_slot(self) -> list[tuple[int, int]]:
        return sorted(self.table.items(), key=lambda kv: kv[1])


def dyn_insert(f: int, idx: DynamicIndex) -> InsertOutcome:
    return idx.insert(f)


def dyn_remove(f: int, idx: DynamicIndex) -> Optional[SlotsRemapped]:
    return idx.remove(f)


def dyn_lookup(f: int, idx: DynamicIndex) -> Optional[int]:
    return idx.lookup(f)
