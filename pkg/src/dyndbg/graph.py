"""The de Bruijn graph: static construction, queries and dynamic updates.

A graph couples three slot-indexed structures: the node index (fingerprint ->
slot), the IN/OUT matrices and the covering forest. Static graphs use a
minimal perfect hash and are immutable; dynamic graphs use
:class:`~dyndbg.node_index.DynamicIndex` and support node and edge insertion
and deletion while keeping every tree of the forest either at least
``S_min = k*lam`` nodes large or equal to its whole connected component, and
never higher than ``3*S_min``.
"""
from __future__ import annotations

import logging
import warnings
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .adjacency import AdjacencyMatrices
from .errors import (
    CorruptForest,
    DistinctKmerCollision,
    EdgeAbsent,
    LengthMismatch,
    NodeAbsent,
    NotChainable,
    RestartNeeded,
    SequenceTooShort,
    StaticGraphError,
    TooManyRestarts,
)
from .fingerprint import KrParams
from .forest import (
    ROOT,
    UNASSIGNED,
    VIA_IN,
    VIA_OUT,
    Forest,
    ForestParams,
    Handle,
    ascend,
    attach,
    climb,
    collect_tree,
    cut,
    evert,
    scan_forest,
    spanning_forest,
)
from .kmer import Alphabet, Kmer, KmerCodec
from .node_index import DynamicIndex, SlotsRemapped, StaticIndex, build_static

log = logging.getLogger(__name__)

KmerLike = Union[str, Kmer]

DEFAULT_MAX_RESTARTS = 20


class DeBruijnGraph:
    def __init__(self, alphabet: Alphabet, k: int, params: KrParams, index, adj: AdjacencyMatrices,
                 forest: Forest, n: int, e: int, seed: int = 0, restarts: int = 0):
        self.alphabet = alphabet
        self.k = k
        self.params = params
        self.index = index
        self.adj = adj
        self.forest = forest
        self.n = n
        self.e = e
        self.seed = seed
        self.restarts = restarts
        self.codec = KmerCodec(alphabet, k)
        self.dynamic = isinstance(index, DynamicIndex)
        self._sample_words = None

    # ------------------------------------------------------------------ basics
    @property
    def mode(self) -> str:
        return "dynamic" if self.dynamic else "static"

    @property
    def m(self) -> int:
        return self.adj.m

    @property
    def forest_params(self) -> ForestParams:
        return self.forest.params

    def _word(self, v: KmerLike) -> int:
        if isinstance(v, int):  # already packed
            return v
        if isinstance(v, Kmer):
            if v.k != self.k or v.alphabet != self.alphabet:
                raise LengthMismatch(f"k-mer does not match graph (k={self.k})")
            return v.word
        return self.codec.encode(v)

    def text(self, word: int) -> str:
        return self.codec.decode(word)

    def fingerprint(self, word: int) -> int:
        return self.params.fp_word(word, self.codec.lam)

    def lookup_slot(self, f: int) -> Optional[int]:
        if self.dynamic:
            return self.index.lookup(f)
        s = self.index.slot(f)
        if self.index.rejects(f, s):
            return None
        return s

    def _handle(self, word: int) -> Optional[Handle]:
        f = self.fingerprint(word)
        s = self.lookup_slot(f)
        return None if s is None else Handle(word, f, s)

    def _require(self, word: int) -> Handle:
        h = self._handle(word)
        if h is None:
            raise NodeAbsent(f"{self.text(word)} is not in the graph")
        return h

    def _mutable(self) -> None:
        if not self.dynamic:
            raise StaticGraphError("static graphs are immutable; thaw() first")

    def _chainable(self, u: int, v: int) -> bool:
        return (u & (self.codec.word_mask >> self.codec.lam)) == (v >> self.codec.lam)

    # ------------------------------------------------------- forest context
    def follow(self, h: Handle, tag: int, sym: int, _sym2: int = 0) -> Optional[Handle]:
        codec, adj = self.codec, self.adj
        if tag == VIA_OUT:
            if not adj.out_bit(h.slot, sym):
                return None
            dropped = codec.first(h.key)
            y = codec.roll_right(h.key, sym)
            fy = self.params.roll_right(h.fp, dropped, sym)
            sy = self.lookup_slot(fy)
            if sy is None or not adj.in_bit(sy, dropped):
                return None
            return Handle(y, fy, sy)
        if tag == VIA_IN:
            if not adj.in_bit(h.slot, sym):
                return None
            dropped = codec.last(h.key)
            y = codec.roll_left(h.key, sym)
            fy = self.params.roll_left(h.fp, dropped, sym)
            sy = self.lookup_slot(fy)
            if sy is None or not adj.out_bit(sy, dropped):
                return None
            return Handle(y, fy, sy)
        return None

    def neighbors(self, h: Handle) -> list:
        out = []
        seen = {h.slot}
        for tag, side in ((VIA_OUT, "out"), (VIA_IN, "in")):
            for c in self.adj.row_symbols(h.slot, side):
                y = self.follow(h, tag, c)
                if y is not None and y.slot not in seen:
                    seen.add(y.slot)
                    out.append((y, tag, c, 0))
        return out

    def reverse_spec(self, child_key: int, tag: int, sym: int, sym2: int = 0) -> tuple:
        if tag == VIA_OUT:
            return (VIA_IN, self.codec.first(child_key), 0)
        return (VIA_OUT, self.codec.last(child_key), 0)

    # ----------------------------------------------------------------- queries
    def is_node(self, v: KmerLike) -> bool:
        h = self._handle(self._word(v))
        if h is None:
            return False
        return ascend(self, self.forest, h).verified

    def has_edge(self, u: KmerLike, v: KmerLike) -> bool:
        wu, wv = self._word(u), self._word(v)
        if not self._chainable(wu, wv):
            raise NotChainable(f"{self.text(wu)} does not overlap {self.text(wv)}")
        hu, hv = self._handle(wu), self._handle(wv)
        if hu is None or hv is None:
            return False
        return self.adj.confirmed(hu.slot, self.codec.last(wv), hv.slot, self.codec.first(wu))

    def _adjacent(self, v: KmerLike, tag: int) -> list[tuple[str, str]]:
        h = self._handle(self._word(v))
        if h is None:
            return []
        side = "out" if tag == VIA_OUT else "in"
        res = []
        for c in self.adj.row_symbols(h.slot, side):
            y = self.follow(h, tag, c)
            if y is not None:
                res.append((self.alphabet.symbols[c], self.text(y.key)))
        return res

    def successors(self, v: KmerLike) -> list[tuple[str, str]]:
        """(symbol, k-mer) pairs reached by out-edges; garbage if v is not a node."""
        return self._adjacent(v, VIA_OUT)

    def predecessors(self, v: KmerLike) -> list[tuple[str, str]]:
        return self._adjacent(v, VIA_IN)

    def is_node_batch(self, kmers: Sequence[str]) -> np.ndarray:
        """Membership for many k-mers; uses the compiled ascent on static graphs."""
        if self.dynamic or not self.codec.fits_uint64 or self.n == 0 or not kmers:
            return np.array([self.is_node(q) for q in kmers], dtype=bool)
        for q in kmers:
            if len(q) != self.k:
                raise LengthMismatch(f"expected a {self.k}-mer, got length {len(q)}")
        codes = self.alphabet.encode_array("".join(kmers)).reshape(len(kmers), self.k)
        words, fps = _words_and_fps(codes, self.codec.lam, self.params)
        if self._sample_words is None:
            sw = np.zeros(self.m, dtype=np.uint64)
            for s, key in self.forest.samples.items():
                sw[s] = key
            self._sample_words = sw
        if self.index.fingerprint_check is not None:
            slots = self.index.slots(fps)
            pre = self.index.fingerprint_check[slots] == fps
        else:
            pre = np.ones(len(kmers), dtype=bool)
        prm = self.params
        res = kernels.batch_ascend(
            words, fps, self.k, self.codec.lam, prm.r, prm.r_pow_k1, prm.r_inv, prm.p,
            self.codec.word_mask, self.forest.tags, self.forest.syms,
            self.adj.out_bits, self.adj.in_bits, self._sample_words,
            self.forest.params.h_max, self.index.tables,
        )
        return res & pre

    # ----------------------------------------------------------------- updates
    def add_node(self, v: KmerLike) -> bool:
        """Insert an isolated node. Returns False if it was already present."""
        self._mutable()
        word = self._word(v)
        f = self.fingerprint(word)
        s = self.index.lookup(f)
        if s is not None:
            if ascend(self, self.forest, Handle(word, f, s)).verified:
                return False
            raise DistinctKmerCollision(
                f"{self.text(word)} shares its fingerprint with a different stored k-mer"
            )
        out = self.index.insert(f)
        if out.remap is not None:
            self._apply_remap(out.remap)
        self.adj.clear_row(out.slot)
        self.forest.set_spec(out.slot, ROOT)
        self.forest.samples[out.slot] = word
        self.n += 1
        return True

    def add_edge(self, u: KmerLike, v: KmerLike) -> bool:
        """Insert edge u -> v between present nodes. Returns False if it existed."""
        self._mutable()
        wu, wv = self._word(u), self._word(v)
        if not self._chainable(wu, wv):
            raise NotChainable(f"{self.text(wu)} does not overlap {self.text(wv)}")
        hu, hv = self._require(wu), self._require(wv)
        a, b = self.codec.last(wv), self.codec.first(wu)
        if self.adj.confirmed(hu.slot, a, hv.slot, b):
            return False
        self.adj.set_edge_bits(hu.slot, a, hv.slot, b)
        self.e += 1
        if hu.slot != hv.slot:
            self._join(hu, hv, (VIA_OUT, a, 0), (VIA_IN, b, 0))
        return True

    def _join(self, hu: Handle, hv: Handle, spec_uv: tuple, spec_vu: tuple) -> None:
        fr, prm = self.forest, self.forest.params
        au = ascend(self, fr, hu, record_path=True)
        av = ascend(self, fr, hv, record_path=True)
        if not (au.verified and av.verified):
            raise CorruptForest("endpoint of a new edge failed verification")
        if au.root.slot == av.root.slot:
            return
        small_u = not collect_tree(self, fr, au.root, prm.s_min - 1).truncated
        small_v = not collect_tree(self, fr, av.root, prm.s_min - 1).truncated
        if not (small_u or small_v):
            return
        if small_u:
            small, small_asc, big, big_asc, spec = hu, au, hv, av, spec_uv
        else:
            small, small_asc, big, big_asc, spec = hv, av, hu, au, spec_vu
        if not (small_u and small_v) and big_asc.depth >= prm.d_attach:
            cut(fr, big_asc.path[prm.s_min])
        evert(self, fr, small_asc.path)
        attach(self, fr, small, big, spec)

    def remove_edge(self, u: KmerLike, v: KmerLike) -> None:
        self._mutable()
        wu, wv = self._word(u), self._word(v)
        if not self._chainable(wu, wv):
            raise NotChainable(f"{self.text(wu)} does not overlap {self.text(wv)}")
        hu, hv = self._require(wu), self._require(wv)
        a, b = self.codec.last(wv), self.codec.first(wu)
        if not self.adj.confirmed(hu.slot, a, hv.slot, b):
            raise EdgeAbsent(f"{self.text(wu)} -> {self.text(wv)} is not an edge")
        self.adj.clear_edge_bits(hu.slot, a, hv.slot, b)
        self.e -= 1
        if hu.slot == hv.slot:
            return
        fr = self.forest
        if fr.spec(hu.slot) == (VIA_OUT, a, 0):
            child, parent = hu, hv
        elif fr.spec(hv.slot) == (VIA_IN, b, 0):
            child, parent = hv, hu
        else:
            return
        # the reverse directed edge keeps the undirected adjacency alive
        if self._chainable(wv, wu):
            a2, b2 = self.codec.last(wu), self.codec.first(wv)
            if self.adj.confirmed(hv.slot, a2, hu.slot, b2):
                if child is hu:
                    fr.set_spec(hu.slot, VIA_IN, b2)
                else:
                    fr.set_spec(hv.slot, VIA_OUT, a2)
                return
        cut(fr, child)
        self._repair(child)
        self._repair(parent)

    def _repair(self, h: Handle) -> None:
        """Restore the size invariant for the tree containing ``h``."""
        fr, prm = self.forest, self.forest.params
        asc = ascend(self, fr, h)
        if not asc.verified:
            raise CorruptForest(f"slot {h.slot} lost its root during repair")
        scan = collect_tree(self, fr, asc.root, prm.s_min - 1)
        if scan.truncated:
            return
        members = {x.slot for x, _ in scan.nodes}
        for x, _ in scan.nodes:
            for y, tag, sym, sym2 in self.neighbors(x):
                if y.slot in members:
                    continue
                evert(self, fr, ascend(self, fr, x, record_path=True).path)
                sub = collect_tree(self, fr, x, prm.s_min)
                ay = ascend(self, fr, y)
                attach(self, fr, x, y, (tag, sym, sym2))
                if ay.depth + 1 + sub.height > prm.h_max:
                    cut(fr, climb(self, fr, sub.deepest, prm.d_attach))
                return
        # no edge leaves the tree: it covers a small component and its root is sampled

    def remove_node(self, v: KmerLike) -> None:
        self._mutable()
        word = self._word(v)
        h = self._require(word)
        codec, adj = self.codec, self.adj
        while True:
            outs = adj.row_symbols(h.slot, "out")
            if outs:
                y = codec.roll_right(word, outs[0])
                hy = self._handle(y)
                if hy is not None and adj.confirmed(h.slot, outs[0], hy.slot, codec.first(word)):
                    self.remove_edge(word, y)
                else:
                    adj._put(adj.out_bits, h.slot, outs[0], False)
                continue
            ins = adj.row_symbols(h.slot, "in")
            if ins:
                y = codec.roll_left(word, ins[0])
                hy = self._handle(y)
                if hy is not None and adj.confirmed(hy.slot, codec.last(word), h.slot, ins[0]):
                    self.remove_edge(y, word)
                else:
                    adj._put(adj.in_bits, h.slot, ins[0], False)
                continue
            break
        if not self.forest.is_root(h.slot):
            raise CorruptForest(f"isolated node at slot {h.slot} is not a root")
        self.forest.clear_slot(h.slot)
        adj.clear_row(h.slot)
        remap = self.index.remove(h.fp)
        if remap is not None:
            self._apply_remap(remap)
        self.n -= 1

    def _apply_remap(self, remap: SlotsRemapped) -> None:
        self.adj.remap(remap.old_to_new, remap.new_capacity)
        self.forest.remap(remap.old_to_new, remap.new_capacity)
        self._sample_words = None

    # ------------------------------------------------------------ whole-graph
    def check_invariants(self, method: str = "auto") -> list[str]:
        """Full scan of index, adjacency and forest; returns violations.

        ``method`` is "vector" (numpy, needs k*lam <= 64), "scalar" (hop by
        hop through the forest primitives) or "auto".
        """
        if method == "auto":
            method = "vector" if self.codec.fits_uint64 else "scalar"
        if method == "vector":
            from .scan import vector_scan

            return vector_scan(self)
        v: list[str] = []
        if self.dynamic:
            idx = self.index
            slots = list(idx.table.values())
            assigned = set(slots)
            if len(assigned) != len(slots):
                v.append("index: two fingerprints share a slot")
            if slots and max(slots) >= idx.m:
                v.append(f"index: slot {max(slots)} >= capacity {idx.m}")
            if idx.count and idx.m > 3 * idx.count:
                v.append(f"index: capacity {idx.m} > 3*count {3 * idx.count}")
            if idx.count != self.n:
                v.append(f"index holds {idx.count} fingerprints but n = {self.n}")
            if self.adj.m != idx.m or self.forest.m != idx.m:
                v.append("slot-indexed arrays do not match index capacity")
            for s in range(self.adj.m):
                if s not in assigned and (self.adj.in_bits[s].any() or self.adj.out_bits[s].any()):
                    v.append(f"slot {s}: free slot has edge bits")
        else:
            assigned = set(range(self.n))
        try:
            rep = scan_forest(self, self.forest, assigned)
        except CorruptForest as exc:
            return v + [f"forest: {exc}"]
        v.extend(rep.violations)
        codec = self.codec
        for s, key in rep.keys.items():
            if self.lookup_slot(self.fingerprint(key)) != s:
                v.append(f"slot {s}: reconstructed k-mer does not hash to its slot")
            for a in self.adj.row_symbols(s, "out"):
                hy = self._handle(codec.roll_right(key, a))
                if hy is None or not self.adj.in_bit(hy.slot, codec.first(key)):
                    v.append(f"slot {s}: OUT bit {a} has no matching IN bit")
            for b in self.adj.row_symbols(s, "in"):
                hy = self._handle(codec.roll_left(key, b))
                if hy is None or not self.adj.out_bit(hy.slot, codec.last(key)):
                    v.append(f"slot {s}: IN bit {b} has no matching OUT bit")
        if self.adj.edge_count() != self.e:
            v.append(f"edge count {self.e} differs from OUT popcount {self.adj.edge_count()}")
        return v

    def node_words(self) -> dict[int, int]:
        """slot -> k-mer word for every node, recovered top-down from the roots."""
        out = {}
        for r, key in self.forest.samples.items():
            h = Handle(key, self.fingerprint(key), r)
            for x, _ in collect_tree(self, self.forest, h, self.m).nodes:
                out[x.slot] = x.key
        return out

    def kmers(self) -> list[str]:
        return sorted(self.text(w) for w in self.node_words().values())

    def edges(self) -> list[tuple[str, str]]:
        res = []
        for s, key in self.node_words().items():
            for a in self.adj.row_symbols(s, "out"):
                res.append((self.text(key), self.text(self.codec.roll_right(key, a))))
        return sorted(res)

    def component_count(self) -> int:
        return scan_forest(self, self.forest, set(self.node_words())).components

    def thaw(self) -> "DeBruijnGraph":
        """Dynamic copy of this graph (rebuilt from its k-mers, same hash base)."""
        words = self.node_words()
        slots = sorted(words)
        keys = [words[s] for s in slots]
        pos = {s: i for i, s in enumerate(slots)}
        src, dst = [], []
        for s in slots:
            key = words[s]
            for a in self.adj.row_symbols(s, "out"):
                hy = self._handle(self.codec.roll_right(key, a))
                src.append(pos[s])
                dst.append(pos[hy.slot])
        fps = np.array([self.fingerprint(w) for w in keys], dtype=np.uint64)
        return _assemble(self.alphabet, self.k, self.params, keys, fps,
                         np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                         dynamic=True, seed=self.seed, restarts=self.restarts)

    def stats(self) -> dict:
        return {
            "mode": self.mode, "k": self.k, "sigma": self.alphabet.sigma, "n": self.n,
            "e": self.e, "m": self.m, "trees": self.forest.root_count,
            "restarts": self.restarts,
        }


# function-style aliases of the methods above
def is_node(v: KmerLike, g: DeBruijnGraph) -> bool:
    return g.is_node(v)


def has_edge(u: KmerLike, v: KmerLike, g: DeBruijnGraph) -> bool:
    return g.has_edge(u, v)


def successors(v: KmerLike, g: DeBruijnGraph) -> list[tuple[str, str]]:
    return g.successors(v)


def predecessors(v: KmerLike, g: DeBruijnGraph) -> list[tuple[str, str]]:
    return g.predecessors(v)


def add_node(v: KmerLike, g: DeBruijnGraph) -> bool:
    return g.add_node(v)


def add_edge(u: KmerLike, v: KmerLike, g: DeBruijnGraph) -> bool:
    return g.add_edge(u, v)


def remove_edge(u: KmerLike, v: KmerLike, g: DeBruijnGraph) -> None:
    g.remove_edge(u, v)


def remove_node(v: KmerLike, g: DeBruijnGraph) -> None:
    g.remove_node(v)


def check_invariants(g: DeBruijnGraph) -> list[str]:
    return g.check_invariants()


def empty_graph(k: int, alphabet: Alphabet, seed: int = 0) -> DeBruijnGraph:
    """A dynamic graph with no nodes."""
    params = KrParams.draw(k, alphabet.sigma, np.random.default_rng(seed), seed)
    idx = DynamicIndex()
    fp_ = ForestParams(k, alphabet.lam)
    return DeBruijnGraph(alphabet, k, params, idx, AdjacencyMatrices(idx.m, alphabet.sigma),
                         Forest(idx.m, fp_), 0, 0, seed=seed)


# ---------------------------------------------------------------------------
# static construction


def _words_and_fps(codes: np.ndarray, lam: int, params: KrParams):
    """Words and fingerprints of the rows of a (q, k) code matrix."""
    from .kernels import _np as knp

    words = np.zeros(codes.shape[0], dtype=np.uint64)
    fps = np.zeros(codes.shape[0], dtype=np.uint64)
    for j in range(codes.shape[1]):
        col = codes[:, j].astype(np.uint64)
        words = (words << np.uint64(lam)) | col
        fps = knp.addmod(knp.mulmod(fps, np.uint64(params.r), params.p), col, params.p)
    return words, fps


def _encode_sequences(sequences: Iterable[str], k: int, alphabet: Alphabet, strict: bool):
    out = []
    for i, s in enumerate(sequences):
        if len(s) < k:
            msg = f"sequence {i} has length {len(s)} < k={k}"
            if strict:
                raise SequenceTooShort(msg)
            warnings.warn(msg + "; skipped", stacklevel=3)
            continue
        out.append(alphabet.encode_array(s))
    return out


def _collect_kmers(code_arrays: list, codec: KmerCodec):
    """Distinct k-mers and distinct directed edges (as node-id pairs)."""
    k, lam = codec.k, codec.lam
    if codec.fits_uint64:
        per_seq = [kernels.window_words(c, k, lam) for c in code_arrays]
        if per_seq:
            allw = np.concatenate(per_seq)
        else:
            allw = np.zeros(0, dtype=np.uint64)
        keys, first_pos, inv = np.unique(allw, return_index=True, return_inverse=True)
        n = keys.shape[0]
        src, dst = [], []
        off = 0
        for w in per_seq:
            ids = inv[off : off + w.shape[0]]
            src.append(ids[:-1])
            dst.append(ids[1:])
            off += w.shape[0]
        src = np.concatenate(src) if src else np.zeros(0, np.int64)
        dst = np.concatenate(dst) if dst else np.zeros(0, np.int64)
        key_list = keys
    else:
        ids: dict[int, int] = {}
        key_list = []
        src_l, dst_l = [], []
        for c in code_arrays:
            w = codec.pack(c[:k].tolist())
            prev = None
            for i in range(c.shape[0] - k + 1):
                if i:
                    w = codec.roll_right(w, int(c[i + k - 1]))
                node = ids.get(w)
                if node is None:
                    node = ids[w] = len(key_list)
                    key_list.append(w)
                if prev is not None:
                    src_l.append(prev)
                    dst_l.append(node)
                prev = node
        n = len(key_list)
        src = np.array(src_l, dtype=np.int64)
        dst = np.array(dst_l, dtype=np.int64)
    if src.size:
        pair = np.unique(src.astype(np.int64) * max(n, 1) + dst)
        src, dst = pair // max(n, 1), pair % max(n, 1)
    return key_list, src.astype(np.int64), dst.astype(np.int64)


def _node_fingerprints(code_arrays, key_list, codec: KmerCodec, params: KrParams) -> np.ndarray:
    if codec.fits_uint64 and params.is_production:
        # roll fingerprints along the texts, then pick one per distinct k-mer
        per_seq_fp = [kernels.window_fingerprints(c, codec.k, params.r, params.r_pow_k1, params.p)
                      for c in code_arrays]
        per_seq_w = [kernels.window_words(c, codec.k, codec.lam) for c in code_arrays]
        if not per_seq_fp:
            return np.zeros(0, dtype=np.uint64)
        allf = np.concatenate(per_seq_fp)
        allw = np.concatenate(per_seq_w)
        pos = np.searchsorted(key_list, allw)
        out = np.zeros(len(key_list), dtype=np.uint64)
        out[pos] = allf
        return out
    return np.array([params.fp_word(int(w), codec.lam) for w in key_list], dtype=np.uint64)


def build_static_graph(sequences: Sequence[str], k: int, alphabet: Alphabet, seed: int = 0,
                       *, dynamic: bool = False, max_restarts: int = DEFAULT_MAX_RESTARTS,
                       strict: bool = False, check_fingerprints: bool = False,
                       params: Optional[KrParams] = None) -> DeBruijnGraph:
    """Build the order-k de Bruijn graph of ``sequences``.

    Las Vegas: the hash base is redrawn until the distinct k-mers get distinct
    fingerprints. With ``dynamic=True`` the result uses a dynamic index and
    accepts updates.
    """
    codec = KmerCodec(alphabet, k)
    code_arrays = _encode_sequences(sequences, k, alphabet, strict)
    key_list, src, dst = _collect_kmers(code_arrays, codec)
    rng = np.random.default_rng(seed)
    restarts = 0
    while True:
        prm = params if params is not None else KrParams.draw(k, alphabet.sigma, rng, seed)
        fps = _node_fingerprints(code_arrays, key_list, codec, prm)
        try:
            return _assemble(alphabet, k, prm, key_list, fps, src, dst, dynamic=dynamic,
                             seed=seed, restarts=restarts, check_fingerprints=check_fingerprints)
        except RestartNeeded:
            restarts += 1
            log.info("fingerprint collision, restart %d", restarts)
            if params is not None or restarts > max_restarts:
                raise TooManyRestarts(f"gave up after {restarts} restarts") from None


def _assemble(alphabet, k, params, key_list, fps, src, dst, *, dynamic, seed, restarts,
              check_fingerprints=False) -> DeBruijnGraph:
    codec = KmerCodec(alphabet, k)
    n = len(key_list)
    if dynamic:
        index = DynamicIndex.from_fingerprints(fps)
        slot_of = np.arange(n, dtype=np.int64)
        m = index.m
    else:
        index = build_static(fps, seed, check_fingerprints=check_fingerprints)
        slot_of = index.slots(fps) if n else np.zeros(0, dtype=np.int64)
        m = n
    sigma = alphabet.sigma
    adj = AdjacencyMatrices(m, sigma)
    if codec.fits_uint64:
        keys = np.asarray(key_list, dtype=np.uint64)
        first = (keys >> np.uint64(codec.high_shift)).astype(np.int64)
        last = (keys & np.uint64(codec.sym_mask)).astype(np.int64)
    else:
        first = np.array([codec.first(w) for w in key_list], dtype=np.int64)
        last = np.array([codec.last(w) for w in key_list], dtype=np.int64)
    if src.size:
        a = last[dst]
        b = first[src]
        one = np.uint64(1)
        np.bitwise_or.at(adj.out_bits, (slot_of[src], a >> 6), one << (a & 63).astype(np.uint64))
        np.bitwise_or.at(adj.in_bits, (slot_of[dst], b >> 6), one << (b & 63).astype(np.uint64))

    fparams = ForestParams(k, alphabet.lam)
    forest = Forest(m, fparams)
    parent = spanning_forest(n, src, dst, fparams.s_min)
    child = np.flatnonzero(parent >= 0)
    par = parent[child]
    directed = np.unique(src * max(n, 1) + dst) if src.size else np.zeros(0, np.int64)
    probe = child * max(n, 1) + par
    hit = np.searchsorted(directed, probe)
    is_out = (hit < directed.size) & (directed[np.minimum(hit, max(directed.size - 1, 0))] == probe) \
        if directed.size else np.zeros(child.size, dtype=bool)
    tags = np.where(is_out, VIA_OUT, VIA_IN).astype(np.uint8)
    syms = np.where(is_out, last[par], first[par]).astype(np.uint16)
    forest.tags[slot_of[child]] = tags
    forest.syms[slot_of[child]] = syms
    roots = np.flatnonzero(parent < 0)
    forest.tags[slot_of[roots]] = ROOT
    for node in roots.tolist():
        forest.samples[int(slot_of[node])] = int(key_list[node])
    e = int(src.size)
    return DeBruijnGraph(alphabet, k, params, index, adj, forest, n, e, seed=seed,
                         restarts=restarts)
