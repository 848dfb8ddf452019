"""Pure-numpy (and plain Python, where the loop is inherently sequential)
implementations of the hot kernels. Results are bit-identical to ``_jit``."""
from __future__ import annotations

import numpy as np

U64 = np.uint64
M61 = U64((1 << 61) - 1)
MASK31 = U64((1 << 31) - 1)
MASK30 = U64((1 << 30) - 1)
ALL64 = U64(0xFFFFFFFFFFFFFFFF)

ROOT, VIA_OUT, VIA_IN = 1, 2, 3


def mulmod(a: np.ndarray, b, p: int) -> np.ndarray:
    """Elementwise ``a * b mod p`` for uint64 inputs already reduced mod p."""
    a = np.asarray(a, dtype=U64)
    b = np.asarray(b, dtype=U64)
    if p != int(M61):
        # toy moduli are below 2**32, products fit in 64 bits
        return (a * b) % U64(p)
    a_hi, a_lo = a >> U64(31), a & MASK31
    b_hi, b_lo = b >> U64(31), b & MASK31
    mid = a_hi * b_lo + a_lo * b_hi
    res = ((a_hi * b_hi) << U64(1)) + (mid >> U64(30)) + ((mid & MASK30) << U64(31)) + a_lo * b_lo
    res = (res & M61) + (res >> U64(61))
    res = (res & M61) + (res >> U64(61))
    with np.errstate(over="ignore"):
        return np.where(res >= M61, res - M61, res)


def addmod(a, b, p: int):
    s = np.asarray(a, dtype=U64) + np.asarray(b, dtype=U64)
    with np.errstate(over="ignore"):
        return np.where(s >= U64(p), s - U64(p), s)


def submod(a, b, p: int):
    return addmod(a, U64(p) - np.asarray(b, dtype=U64), p)


def mix64(x):
    """splitmix64 finaliser; wraps modulo 2**64."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=U64) + U64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
        return z ^ (z >> U64(31))


def popcount64(x):
    x = np.asarray(x, dtype=U64)
    with np.errstate(over="ignore"):
        x = x - ((x >> U64(1)) & U64(0x5555555555555555))
        x = (x & U64(0x3333333333333333)) + ((x >> U64(2)) & U64(0x3333333333333333))
        x = (x + (x >> U64(4))) & U64(0x0F0F0F0F0F0F0F0F)
        return (x * U64(0x0101010101010101)) >> U64(56)


# ---------------------------------------------------------------------------
# sliding-window fingerprints: Horner across k shifted views, O(k) passes


def window_fingerprints(codes: np.ndarray, k: int, r: int, r_pow_k1: int, p: int) -> np.ndarray:
    nw = codes.shape[0] - k + 1
    if nw <= 0:
        return np.empty(0, dtype=U64)
    c = codes.astype(U64)
    acc = np.zeros(nw, dtype=U64)
    rr = U64(r)
    for j in range(k):
        acc = addmod(mulmod(acc, rr, p), c[j : j + nw], p)
    return acc


def window_hist_fingerprints(codes: np.ndarray, k: int, rpows: np.ndarray, p: int) -> np.ndarray:
    nw = codes.shape[0] - k + 1
    if nw <= 0:
        return np.empty(0, dtype=U64)
    sigma = rpows.shape[0]
    acc = np.zeros(nw, dtype=U64)
    for c in range(sigma):
        pref = np.concatenate(([0], np.cumsum(codes == c, dtype=np.int64)))
        cnt = (pref[k:] - pref[:-k]).astype(U64)
        acc = addmod(acc, mulmod(cnt, U64(rpows[c]), p), p)
    return acc


# ---------------------------------------------------------------------------
# minimal perfect hash lookup, all keys of a batch advanced level by level


def mphf_lookup(keys, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n, seed0):
    keys = np.asarray(keys, dtype=U64)
    res = np.full(keys.shape[0], -1, dtype=np.int64)
    pending = np.arange(keys.shape[0])
    for lvl in range(seeds.shape[0]):
        if pending.size == 0:
            break
        h = mix64(keys[pending] ^ seeds[lvl]) % nbits[lvl]
        w = word_off[lvl] + (h >> U64(6)).astype(np.int64)
        b = h & U64(63)
        word = bits[w]
        hit = ((word >> b) & U64(1)).astype(bool)
        below = word[hit] & ((U64(1) << b[hit]) - U64(1))
        res[pending[hit]] = rank[w[hit]] + popcount64(below).astype(np.int64)
        pending = pending[~hit]
    if pending.size:
        kp = keys[pending]
        if fb_keys.size:
            idx = np.searchsorted(fb_keys, kp)
            idx_c = np.minimum(idx, fb_keys.size - 1)
            found = fb_keys[idx_c] == kp
            res[pending[found]] = fb_slots[idx_c[found]]
            pending = pending[~found]
            kp = keys[pending]
        if pending.size:
            res[pending] = (mix64(kp ^ U64(seed0)) % U64(n)).astype(np.int64)
    return res


# ---------------------------------------------------------------------------
# static forest construction


def bfs_forest(indptr: np.ndarray, indices: np.ndarray, n: int):
    """BFS spanning forest; sources are the lowest unvisited node ids.

    All components are expanded level by level at once; inside a level the
    first discoverer in FIFO order wins, so the visit order equals the
    queue-based version's.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    parent = np.full(n, -1, dtype=np.int64)
    tree = np.empty(n, dtype=np.int64)
    if n == 0:
        return np.empty(0, dtype=np.int64), parent, tree
    g = csr_matrix((np.ones(indices.shape[0], dtype=np.int8), indices, indptr), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    _, sources = np.unique(labels, return_index=True)  # lowest id of each component
    rank = np.empty(sources.size, dtype=np.int64)
    rank[np.argsort(sources)] = np.arange(sources.size)
    seen = np.zeros(n, dtype=bool)
    front = np.sort(sources).astype(np.int64)
    seen[front] = True
    levels = [front]
    while True:
        starts = indptr[front]
        counts = indptr[front + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        base = np.repeat(starts - (np.cumsum(counts) - counts), counts)
        cand = indices[np.arange(total) + base]
        who = np.repeat(front, counts)
        fresh = ~seen[cand]
        cand, who = cand[fresh], who[fresh]
        if cand.size == 0:
            break
        _, first = np.unique(cand, return_index=True)
        first.sort()
        front = cand[first]
        parent[front] = who[first]
        seen[front] = True
        levels.append(front)
    nodes = np.concatenate(levels)
    lvl = np.concatenate([np.full(x.size, i, dtype=np.int64) for i, x in enumerate(levels)])
    comp = rank[labels[nodes]]
    order = nodes[np.lexsort((np.arange(nodes.size), lvl, comp))]
    tree[:] = sources[labels]
    return order, parent, tree


def cut_pass(order: np.ndarray, parent: np.ndarray, tree: np.ndarray, s_min: int) -> np.ndarray:
    n = order.shape[0]
    order_l = order.tolist()
    parent_l = parent.tolist()
    h = [0] * n
    is_root = [False] * n
    for x in reversed(order_l):
        p = parent_l[x]
        if p < 0 or h[x] >= s_min:
            is_root[x] = True
        elif h[x] + 1 > h[p]:
            h[p] = h[x] + 1
    root_of = [0] * n
    size = [0] * n
    last_cut = {}
    tree_l = tree.tolist()
    for x in order_l:
        p = parent_l[x]
        if is_root[x]:
            root_of[x] = x
            if p >= 0 and tree_l[x] not in last_cut:
                last_cut[tree_l[x]] = x
        else:
            root_of[x] = root_of[p]
        size[root_of[x]] += 1
    for x in order_l:
        if parent_l[x] < 0 and size[x] < s_min and x in last_cut:
            is_root[last_cut[x]] = False
    return np.array(is_root, dtype=bool)


# ---------------------------------------------------------------------------
# CRC-64/XZ


def _crc_table() -> list[int]:
    poly = 0xC96C5795D7870F42
    table = []
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ poly if c & 1 else c >> 1
        table.append(c)
    return table


CRC_TABLE = _crc_table()


def crc64(data: bytes) -> int:
    crc = 0xFFFFFFFFFFFFFFFF
    t = CRC_TABLE
    for b in data:
        crc = t[(crc ^ b) & 0xFF] ^ (crc >> 8)
    return crc ^ 0xFFFFFFFFFFFFFFFF


# ---------------------------------------------------------------------------
# batched membership by forest ascent, all queries advanced in lock-step


def _bit(mat: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    cols = cols.astype(np.int64)
    words = mat[rows, cols >> 6]
    return ((words >> (cols & 63).astype(U64)) & U64(1)).astype(bool)


def batch_ascend(words, fps, k, lam, r, r_pow_k1, r_inv, p, word_mask,
                 tags, syms, out_bits, in_bits, sample_words, h_max, mphf):
    nq = words.shape[0]
    res = np.zeros(nq, dtype=bool)
    w = words.astype(U64).copy()
    f = fps.astype(U64).copy()
    s = mphf_lookup(f, *mphf)
    act = np.arange(nq)
    high = U64(lam * (k - 1))
    lam_u = U64(lam)
    sym_mask = U64((1 << lam) - 1)
    for step in range(h_max + 1):
        if act.size == 0:
            break
        t = tags[s[act]]
        at_root = t == ROOT
        idx = act[at_root]
        res[idx] = w[idx] == sample_words[s[idx]]
        if step == h_max:
            break
        nxt = []
        for tag in (VIA_OUT, VIA_IN):
            idx = act[t == tag]
            if idx.size == 0:
                continue
            sym = syms[s[idx]].astype(U64)
            if tag == VIA_OUT:
                ok = _bit(out_bits, s[idx], sym)
                idx, sym = idx[ok], sym[ok]
                dropped = w[idx] >> high
                w[idx] = ((w[idx] << lam_u) & U64(word_mask)) | sym
                fr = submod(f[idx], mulmod(dropped, U64(r_pow_k1), p), p)
                f[idx] = addmod(mulmod(fr, U64(r), p), sym, p)
                s[idx] = mphf_lookup(f[idx], *mphf)
                ok = _bit(in_bits, s[idx], dropped)
            else:
                ok = _bit(in_bits, s[idx], sym)
                idx, sym = idx[ok], sym[ok]
                dropped = w[idx] & sym_mask
                w[idx] = (w[idx] >> lam_u) | (sym << high)
                fr = mulmod(submod(f[idx], dropped, p), U64(r_inv), p)
                f[idx] = addmod(fr, mulmod(sym, U64(r_pow_k1), p), p)
                s[idx] = mphf_lookup(f[idx], *mphf)
                ok = _bit(out_bits, s[idx], dropped)
            nxt.append(idx[ok])
        act = np.concatenate(nxt) if nxt else act[:0]
    return res
