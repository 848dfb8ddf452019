"""Vectorized whole-graph invariant scan (k-mers that fit in 64 bits).

Same checks as the scalar scan in :meth:`DeBruijnGraph.check_invariants`, done
level by level with numpy so it can run after every fuzz mutation.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .forest import ROOT, UNASSIGNED, VIA_IN, VIA_OUT
from .kernels import _np as knp

U64 = np.uint64


def _bits(mat: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    w = mat[rows, cols >> 6]
    return ((w >> (cols & 63).astype(U64)) & U64(1)).astype(bool)


class _Lookup:
    def __init__(self, g):
        self.g = g
        if g.dynamic:
            items = g.index.table
            f = np.fromiter(items.keys(), dtype=U64, count=len(items))
            s = np.fromiter(items.values(), dtype=np.int64, count=len(items))
            order = np.argsort(f)
            self.f, self.s = f[order], s[order]

    def __call__(self, fps: np.ndarray):
        if self.g.dynamic:
            if self.f.size == 0:
                return np.zeros(fps.size, np.int64), np.zeros(fps.size, bool)
            pos = np.minimum(np.searchsorted(self.f, fps), self.f.size - 1)
            return self.s[pos], self.f[pos] == fps
        idx = self.g.index
        slots = idx.slots(fps)
        if idx.fingerprint_check is not None:
            return slots, idx.fingerprint_check[slots] == fps
        return slots, np.ones(fps.size, bool)


def _fp_words(words: np.ndarray, codec, prm) -> np.ndarray:
    f = np.zeros(words.size, dtype=U64)
    for j in range(codec.k - 1, -1, -1):
        c = (words >> U64(j * codec.lam)) & U64(codec.sym_mask)
        f = knp.addmod(knp.mulmod(f, U64(prm.r), prm.p), c, prm.p)
    return f


def vector_scan(g) -> list[str]:
    codec, prm, fr, adj = g.codec, g.params, g.forest, g.adj
    fpar = fr.params
    m, sigma, p = adj.m, codec.sigma, prm.p
    lam, hs = U64(codec.lam), U64(codec.high_shift)
    mask, smask = U64(codec.word_mask), U64(codec.sym_mask)
    viol: list[str] = []
    lookup = _Lookup(g)

    assigned = np.zeros(m, dtype=bool)
    if g.dynamic:
        idx = g.index
        slots = lookup.s
        if np.unique(slots).size != slots.size:
            viol.append("index: two fingerprints share a slot")
        if slots.size and slots.max() >= idx.m:
            viol.append(f"index: slot {int(slots.max())} >= capacity {idx.m}")
        if idx.count and idx.m > 3 * idx.count:
            viol.append(f"index: capacity {idx.m} > 3*count {3 * idx.count}")
        if idx.count != g.n:
            viol.append(f"index holds {idx.count} fingerprints but n = {g.n}")
        if fr.m != m or idx.m != m:
            viol.append("slot-indexed arrays do not match index capacity")
            return viol
        assigned[slots[slots < m]] = True
        free = ~assigned
        if (adj.in_bits[free].any() or adj.out_bits[free].any()):
            viol.append("a free slot has edge bits")
    else:
        assigned[: g.n] = True
    tags = fr.tags
    bad = np.flatnonzero(~assigned & (tags != UNASSIGNED))
    if bad.size:
        viol.append(f"slot {int(bad[0])}: unassigned slot carries tag {int(tags[bad[0]])}")
    bad = np.flatnonzero(assigned & (tags == UNASSIGNED))
    if bad.size:
        viol.append(f"slot {int(bad[0])}: assigned slot has no parent spec")
    roots = np.flatnonzero(assigned & (tags == ROOT))
    if set(fr.samples) != set(roots.tolist()):
        viol.append("root samples out of sync with root tags")
    roots = np.array([r for r in roots.tolist() if r in fr.samples], dtype=np.int64)

    key = np.zeros(m, dtype=U64)
    fpv = np.zeros(m, dtype=U64)
    depth = np.full(m, -1, dtype=np.int64)
    tree = np.full(m, -1, dtype=np.int64)
    rk = np.array([fr.samples[r] for r in roots.tolist()], dtype=U64)
    rf = _fp_words(rk, codec, prm)
    rs, found = lookup(rf)
    ok = found & (rs == roots)
    if not ok.all():
        viol.append(f"slot {int(roots[~ok][0])}: root sample does not map back to its slot")
    front = roots[ok]
    key[front], fpv[front], depth[front], tree[front] = rk[ok], rf[ok], 0, front
    d = 0
    syms = fr.syms.astype(np.int64)
    while front.size:
        kids, kkeys, kfps, ktree = [], [], [], []
        xk, xf = key[front], fpv[front]
        first = (xk >> hs).astype(np.int64)
        last = (xk & smask).astype(np.int64)
        drop_r = knp.mulmod(first.astype(U64), U64(prm.r_pow_k1), p)
        base_r = knp.mulmod(knp.submod(xf, drop_r, p), U64(prm.r), p)
        base_l = knp.mulmod(knp.submod(xf, last.astype(U64), p), U64(prm.r_inv), p)
        for c in range(sigma):
            cc = np.full(front.size, c, dtype=np.int64)
            # out-edge x -> y, child holds VIA_IN(first(x))
            sel = _bits(adj.out_bits, front, cc)
            if sel.any():
                yk = ((xk[sel] << lam) | U64(c)) & mask
                yf = knp.addmod(base_r[sel], U64(c), p)
                ys, hit = lookup(yf)
                hit &= _bits(adj.in_bits, ys, first[sel])
                hit &= (tags[ys] == VIA_IN) & (syms[ys] == first[sel]) & (ys != front[sel])
                kids.append(ys[hit]); kkeys.append(yk[hit]); kfps.append(yf[hit])
                ktree.append(tree[front[sel]][hit])
            # in-edge y -> x, child holds VIA_OUT(last(x))
            sel = _bits(adj.in_bits, front, cc)
            if sel.any():
                yk = (xk[sel] >> lam) | (U64(c) << hs)
                yf = knp.addmod(base_l[sel], knp.mulmod(U64(c), U64(prm.r_pow_k1), p), p)
                ys, hit = lookup(yf)
                hit &= _bits(adj.out_bits, ys, last[sel])
                hit &= (tags[ys] == VIA_OUT) & (syms[ys] == last[sel]) & (ys != front[sel])
                kids.append(ys[hit]); kkeys.append(yk[hit]); kfps.append(yf[hit])
                ktree.append(tree[front[sel]][hit])
        if not kids:
            break
        ys = np.concatenate(kids)
        d += 1
        uniq, first_at = np.unique(ys, return_index=True)
        if uniq.size != ys.size or (depth[uniq] >= 0).any():
            viol.append(f"depth {d}: a slot is reached twice (parent cycle)")
            keep = first_at[depth[uniq] < 0]
        else:
            keep = first_at
        ys = ys[keep]
        key[ys] = np.concatenate(kkeys)[keep]
        fpv[ys] = np.concatenate(kfps)[keep]
        tree[ys] = np.concatenate(ktree)[keep]
        depth[ys] = d
        if d > fpar.h_max:
            viol.append(f"tree height {d} exceeds {fpar.h_max}")
            break
        front = ys
    unreached = np.flatnonzero(assigned & (depth < 0))
    if unreached.size:
        named = ", ".join(f"slot {int(s)}" for s in unreached[:5])
        more = f" (+{unreached.size - 5} more)" if unreached.size > 5 else ""
        viol.append(f"{named}{more}: not reached from any sampled root")

    # edge bits must pair up; collect confirmed edges for components
    nodes = np.flatnonzero(depth >= 0)
    xk, xf = key[nodes], fpv[nodes]
    first = (xk >> hs).astype(np.int64)
    last = (xk & smask).astype(np.int64)
    drop_r = knp.mulmod(first.astype(U64), U64(prm.r_pow_k1), p)
    base_r = knp.mulmod(knp.submod(xf, drop_r, p), U64(prm.r), p)
    base_l = knp.mulmod(knp.submod(xf, last.astype(U64), p), U64(prm.r_inv), p)
    eu, ev = [], []
    for c in range(sigma):
        cc = np.full(nodes.size, c, dtype=np.int64)
        sel = _bits(adj.out_bits, nodes, cc)
        if sel.any():
            ys, hit = lookup(knp.addmod(base_r[sel], U64(c), p))
            hit &= _bits(adj.in_bits, ys, first[sel])
            if not hit.all():
                viol.append(f"slot {int(nodes[sel][~hit][0])}: OUT bit {c} has no matching IN bit")
            eu.append(nodes[sel][hit]); ev.append(ys[hit])
        sel = _bits(adj.in_bits, nodes, cc)
        if sel.any():
            yf = knp.addmod(base_l[sel], knp.mulmod(U64(c), U64(prm.r_pow_k1), p), p)
            ys, hit = lookup(yf)
            hit &= _bits(adj.out_bits, ys, last[sel])
            if not hit.all():
                viol.append(f"slot {int(nodes[sel][~hit][0])}: IN bit {c} has no matching OUT bit")
    total_out = int(knp.popcount64(adj.out_bits).sum())
    if total_out != g.e:
        viol.append(f"edge count {g.e} differs from OUT popcount {total_out}")

    eu = np.concatenate(eu) if eu else np.zeros(0, np.int64)
    ev = np.concatenate(ev) if ev else np.zeros(0, np.int64)
    graph = coo_matrix((np.ones(eu.size, dtype=np.int8), (eu, ev)), shape=(m, m))
    _, label = connected_components(graph, directed=False)
    label = label[nodes]
    comp_size = np.bincount(label)
    n_comp = np.unique(label).size
    tree_size = np.bincount(tree[nodes], minlength=m)
    good_roots = roots[ok]
    if good_roots.size:
        small = good_roots[tree_size[good_roots] < fpar.s_min]
        if small.size:
            lab_of = np.full(m, -1, dtype=np.int64)
            lab_of[nodes] = label
            short = comp_size[lab_of[small]] != tree_size[small]
            if short.any():
                r = int(small[short][0])
                viol.append(f"slot {r}: tree of size {int(tree_size[r])} < {fpar.s_min} "
                            f"does not cover its component")
    if good_roots.size > nodes.size / fpar.s_min + n_comp:
        viol.append(f"{good_roots.size} roots exceed n/S_min + components")
    return viol
