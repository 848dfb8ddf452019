"""Fixed-length jumbled pattern matching over histogram fingerprints.

Nodes are the distinct symbol histograms of a text's length-k windows; two
nodes are adjacent when one replacement (remove a ``b``, add an ``a``) turns one
into the other. Membership of a pattern's histogram is checked with the same
ascend-and-compare scheme as the k-mer graph, where each hop applies an O(1)
fingerprint replacement.

Each node also stores a sigma x sigma bit row: bit ``(b, a)`` is set when the
neighbour ``h - b + a`` is a node. An ascent hop must see the swap bit on both
ends. With it a successful ascent proves, from the root down, that every
re-derived histogram on the path is a node, so answers are exact; without it
a non-member whose slot happens to belong to a member can hop onto some other
member and verify by coincidence.
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import LengthMismatch, PatternLongerThanText, RestartNeeded, TooManyRestarts
from .fingerprint import KrParams
from .forest import ROOT, VIA_SWAP, Forest, ForestParams, Handle, ascend, scan_forest, spanning_forest
from .kernels import _np as knp
from .kmer import Alphabet
from .node_index import StaticIndex, build_static

log = logging.getLogger(__name__)

_CHUNK = 1 << 22  # histogram cells materialised at once during the build


class JumbledIndex:
    dynamic = False

    def __init__(self, alphabet: Alphabet, k: int, params: KrParams, index: StaticIndex,
                 forest: Forest, swap_bits: np.ndarray, n: int, e: int, seed: int = 0,
                 restarts: int = 0):
        self.alphabet = alphabet
        self.k = k
        self.params = params
        self.index = index
        self.forest = forest
        self.swap_bits = swap_bits
        self.n = n
        self.e = e
        self.seed = seed
        self.restarts = restarts
        self.sigma = alphabet.sigma

    @property
    def m(self) -> int:
        return self.n

    # -- context protocol ----------------------------------------------------
    def _swap(self, slot: int, b: int, a: int) -> bool:
        bit = b * self.sigma + a
        return bool((int(self.swap_bits[slot, bit >> 6]) >> (bit & 63)) & 1)

    def follow(self, h: Handle, tag: int, b: int, a: int) -> Optional[Handle]:
        if tag != VIA_SWAP or a == b or h.key[b] == 0 or not self._swap(h.slot, b, a):
            return None
        y = list(h.key)
        y[b] -= 1
        y[a] += 1
        fy = self.params.hfp_replace(h.fp, b, a)
        sy = self.lookup_slot(fy)
        if sy is None or not self._swap(sy, a, b):
            return None
        return Handle(tuple(y), fy, sy)

    def neighbors(self, h: Handle) -> list:
        out = []
        row = self.swap_bits[h.slot]
        for w, word in enumerate(row.tolist()):
            while word:
                low = word & -word
                bit = 64 * w + low.bit_length() - 1
                word ^= low
                b, a = divmod(bit, self.sigma)
                y = self.follow(h, VIA_SWAP, b, a)
                if y is not None:
                    out.append((y, VIA_SWAP, b, a))
        return out

    def reverse_spec(self, child_key, tag: int, b: int, a: int) -> tuple:
        return (VIA_SWAP, a, b)

    def fingerprint(self, key) -> int:
        return self.params.hfp(key)

    def lookup_slot(self, f: int) -> Optional[int]:
        s = self.index.slot(f)
        return None if self.index.rejects(f, s) else s

    # -- queries ---------------------------------------------------------------
    def histogram_of(self, pattern: str) -> tuple:
        if len(pattern) != self.k:
            raise LengthMismatch(f"pattern length {len(pattern)} != k={self.k}")
        codes = self.alphabet.encode_array(pattern)
        return tuple(np.bincount(codes, minlength=self.sigma).tolist())

    def has_match(self, pattern: str) -> bool:
        h = self.histogram_of(pattern)
        f = self.params.hfp(h)
        s = self.lookup_slot(f)
        if s is None:
            return False
        return ascend(self, self.forest, Handle(h, f, s)).verified

    def histograms(self) -> dict[int, tuple]:
        return scan_forest(self, self.forest, set(range(self.n))).keys

    def check_invariants(self) -> list[str]:
        rep = scan_forest(self, self.forest, set(range(self.n)))
        v = list(rep.violations)
        for s, h in rep.keys.items():
            if sum(h) != self.k or min(h) < 0:
                v.append(f"slot {s}: reconstructed histogram {h} is not a k-multiset")
        return v

    def stats(self) -> dict:
        return {"mode": "jumbled", "k": self.k, "sigma": self.sigma, "n": self.n,
                "e": self.e, "trees": self.forest.root_count, "restarts": self.restarts}


def has_jumbled_match(pattern: str, idx: JumbledIndex) -> bool:
    return idx.has_match(pattern)


def _window_histograms(codes: np.ndarray, k: int, sigma: int):
    """Distinct histograms (rows of counts) of the length-k windows of ``codes``."""
    nw = codes.shape[0] - k + 1
    step = max(1, _CHUNK // max(sigma, 1))
    uniq_parts = []
    for lo in range(0, nw, step):
        hi = min(nw, lo + step)
        seg = codes[lo : hi + k - 1].astype(np.int64)
        onehot = np.zeros((seg.size + 1, sigma), dtype=np.int32)
        onehot[np.arange(1, seg.size + 1), seg] = 1
        pref = np.cumsum(onehot, axis=0)
        uniq_parts.append(np.unique(pref[k:] - pref[: hi - lo], axis=0))
    return np.unique(np.concatenate(uniq_parts), axis=0)


def _hist_fps(rows: np.ndarray, params: KrParams) -> np.ndarray:
    f = np.zeros(rows.shape[0], dtype=np.uint64)
    for c in range(rows.shape[1]):
        term = knp.mulmod(rows[:, c].astype(np.uint64) % np.uint64(params.p),
                          np.uint64(params.r_pows[c]), params.p)
        f = knp.addmod(f, term, params.p)
    return f


def build_jumbled(text: Union[str, Sequence[str]], k: int, alphabet: Alphabet, seed: int = 0,
                  max_restarts: int = 20, check_fingerprints: bool = False) -> JumbledIndex:
    """Index the length-k window histograms of ``text`` (one string or several)."""
    texts = [text] if isinstance(text, str) else list(text)
    texts = [t for t in texts if len(t) >= k]
    if not texts:
        raise PatternLongerThanText(f"k={k} exceeds every text length")
    sigma = alphabet.sigma
    code_arrays = [alphabet.encode_array(t) for t in texts]
    rows = np.unique(np.concatenate([_window_histograms(c, k, sigma) for c in code_arrays]), axis=0)
    n = rows.shape[0]
    rng = np.random.default_rng(seed)
    restarts = 0
    while True:
        params = KrParams.draw(k, sigma, rng, seed)
        rpows = np.array(params.r_pows, dtype=np.uint64)
        # slide the window with O(1) replacements; every window fp must be a node fp
        wfps = np.concatenate([kernels.window_hist_fingerprints(c, k, rpows, params.p)
                               for c in code_arrays])
        fps = _hist_fps(rows, params)
        try:
            if np.unique(wfps).size != n or not np.isin(wfps, fps).all():
                raise RestartNeeded("two distinct window histograms share a fingerprint")
            index = build_static(fps, seed, check_fingerprints=check_fingerprints)
            break
        except RestartNeeded:
            restarts += 1
            log.info("histogram fingerprint collision, restart %d", restarts)
            if restarts > max_restarts:
                raise TooManyRestarts(f"gave up after {restarts} restarts") from None
    slots = index.slots(fps)

    # every realizable single swap between stored histograms
    order = np.argsort(fps)
    sorted_fps = fps[order]
    src, dst, bs, as_ = [], [], [], []
    p = params.p
    for b in range(sigma):
        has_b = np.flatnonzero(rows[:, b] > 0)
        if has_b.size == 0:
            continue
        for a in range(sigma):
            if a == b:
                continue
            nf = knp.addmod(knp.submod(fps[has_b], np.uint64(params.r_pows[b]), p),
                            np.uint64(params.r_pows[a]), p)
            pos = np.minimum(np.searchsorted(sorted_fps, nf), n - 1)
            hit = sorted_fps[pos] == nf
            cand, tgt = has_b[hit], order[pos[hit]]
            want = rows[cand].copy()
            want[:, b] -= 1
            want[:, a] += 1
            same = (rows[tgt] == want).all(axis=1)
            src.append(cand[same]); dst.append(tgt[same])
            bs.append(np.full(int(same.sum()), b)); as_.append(np.full(int(same.sum()), a))
    cat = (lambda xs: np.concatenate(xs).astype(np.int64) if xs else np.zeros(0, np.int64))
    src, dst, bs, as_ = cat(src), cat(dst), cat(bs), cat(as_)

    words = -(-(sigma * sigma) // 64)
    swap = np.zeros((n, words), dtype=np.uint64)
    bit = bs * sigma + as_
    np.bitwise_or.at(swap, (slots[src], bit >> 6), np.uint64(1) << (bit & 63).astype(np.uint64))

    fparams = ForestParams(k, alphabet.lam)
    forest = Forest(n, fparams, jumbled=True)
    parent = spanning_forest(n, src, dst, fparams.s_min)
    child = np.flatnonzero(parent >= 0)
    diff = rows[parent[child]] - rows[child]
    forest.tags[slots[child]] = VIA_SWAP
    forest.syms[slots[child]] = np.argmin(diff, axis=1)   # removed from the child
    forest.syms2[slots[child]] = np.argmax(diff, axis=1)  # added
    roots = np.flatnonzero(parent < 0)
    forest.tags[slots[roots]] = ROOT
    for x in roots.tolist():
        forest.samples[int(slots[x])] = tuple(int(c) for c in rows[x])
    return JumbledIndex(alphabet, k, params, index, forest, swap, n, int(src.size // 2),
                        seed=seed, restarts=restarts)
