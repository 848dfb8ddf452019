"""numba-compiled kernels. Importing this module requires numba."""
import numpy as np
from numba import njit

U64 = np.uint64
M61 = U64((1 << 61) - 1)
MASK31 = U64((1 << 31) - 1)
MASK30 = U64((1 << 30) - 1)
ZERO = U64(0)
ONE = U64(1)
SH1 = U64(1)
SH6 = U64(6)
SH8 = U64(8)
SH30 = U64(30)
SH31 = U64(31)
SH61 = U64(61)
LOW6 = U64(63)
LOW8 = U64(0xFF)
ALL64 = U64(0xFFFFFFFFFFFFFFFF)

ROOT, VIA_OUT, VIA_IN = 1, 2, 3


@njit(cache=True, inline="always")
def mulmod(a, b, p):
    if p != M61:
        return (a * b) % p
    a_hi = a >> SH31
    a_lo = a & MASK31
    b_hi = b >> SH31
    b_lo = b & MASK31
    mid = a_hi * b_lo + a_lo * b_hi
    res = ((a_hi * b_hi) << SH1) + (mid >> SH30) + ((mid & MASK30) << SH31) + a_lo * b_lo
    res = (res & M61) + (res >> SH61)
    res = (res & M61) + (res >> SH61)
    if res >= M61:
        res -= M61
    return res


@njit(cache=True, inline="always")
def addmod(a, b, p):
    s = a + b
    if s >= p:
        s -= p
    return s


@njit(cache=True, inline="always")
def submod(a, b, p):
    return addmod(a, p - b, p)


@njit(cache=True, inline="always")
def mix64(x):
    z = x + U64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> SH30)) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> SH31)


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> SH1) & U64(0x5555555555555555))
    x = (x & U64(0x3333333333333333)) + ((x >> U64(2)) & U64(0x3333333333333333))
    x = (x + (x >> U64(4))) & U64(0x0F0F0F0F0F0F0F0F)
    return (x * U64(0x0101010101010101)) >> U64(56)


@njit(cache=True)
def window_fingerprints(codes, k, r, r_pow_k1, p):
    nw = codes.shape[0] - k + 1
    if nw <= 0:
        return np.empty(0, dtype=np.uint64)
    out = np.empty(nw, dtype=np.uint64)
    r = U64(r)
    r_pow_k1 = U64(r_pow_k1)
    p = U64(p)
    f = ZERO
    for i in range(k):
        f = addmod(mulmod(f, r, p), U64(codes[i]), p)
    out[0] = f
    for i in range(1, nw):
        t = submod(f, mulmod(U64(codes[i - 1]), r_pow_k1, p), p)
        f = addmod(mulmod(t, r, p), U64(codes[i + k - 1]), p)
        out[i] = f
    return out


@njit(cache=True)
def window_hist_fingerprints(codes, k, rpows, p):
    nw = codes.shape[0] - k + 1
    if nw <= 0:
        return np.empty(0, dtype=np.uint64)
    out = np.empty(nw, dtype=np.uint64)
    p = U64(p)
    f = ZERO
    for i in range(k):
        f = addmod(f, rpows[codes[i]], p)
    out[0] = f
    for i in range(1, nw):
        f = addmod(submod(f, rpows[codes[i - 1]], p), rpows[codes[i + k - 1]], p)
        out[i] = f
    return out


@njit(cache=True, inline="always")
def _mphf_slot(key, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n, seed0):
    for lvl in range(seeds.shape[0]):
        h = mix64(key ^ seeds[lvl]) % nbits[lvl]
        w = word_off[lvl] + np.int64(h >> SH6)
        b = h & LOW6
        word = bits[w]
        if (word >> b) & ONE:
            return rank[w] + np.int64(popcount64(word & ((ONE << b) - ONE)))
    if fb_keys.shape[0] > 0:
        i = np.searchsorted(fb_keys, key)
        if i < fb_keys.shape[0] and fb_keys[i] == key:
            return fb_slots[i]
    return np.int64(mix64(key ^ seed0) % n)


@njit(cache=True)
def mphf_lookup(keys, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n, seed0):
    out = np.empty(keys.shape[0], dtype=np.int64)
    n = U64(n)
    seed0 = U64(seed0)
    for i in range(keys.shape[0]):
        out[i] = _mphf_slot(keys[i], bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n, seed0)
    return out


@njit(cache=True)
def bfs_forest(indptr, indices, n):
    parent = np.full(n, -1, dtype=np.int64)
    tree = np.empty(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.bool_)
    head = 0
    tail = 0
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        tree[s] = s
        order[tail] = s
        tail += 1
        while head < tail:
            x = order[head]
            head += 1
            for e in range(indptr[x], indptr[x + 1]):
                y = indices[e]
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    tree[y] = s
                    order[tail] = y
                    tail += 1
    return order, parent, tree


@njit(cache=True)
def cut_pass(order, parent, tree, s_min):
    n = order.shape[0]
    h = np.zeros(n, dtype=np.int64)
    is_root = np.zeros(n, dtype=np.bool_)
    for idx in range(n - 1, -1, -1):
        x = order[idx]
        p = parent[x]
        if p < 0 or h[x] >= s_min:
            is_root[x] = True
        elif h[x] + 1 > h[p]:
            h[p] = h[x] + 1
    root_of = np.empty(n, dtype=np.int64)
    size = np.zeros(n, dtype=np.int64)
    last_cut = np.full(n, -1, dtype=np.int64)
    for idx in range(n):
        x = order[idx]
        p = parent[x]
        if is_root[x]:
            root_of[x] = x
            if p >= 0 and last_cut[tree[x]] < 0:
                last_cut[tree[x]] = x
        else:
            root_of[x] = root_of[p]
        size[root_of[x]] += 1
    for idx in range(n):
        x = order[idx]
        if parent[x] < 0 and size[x] < s_min and last_cut[x] >= 0:
            is_root[last_cut[x]] = False
    return is_root


@njit(cache=True)
def crc64(data, table):
    crc = ALL64
    for i in range(data.shape[0]):
        crc = table[(crc ^ U64(data[i])) & LOW8] ^ (crc >> SH8)
    return crc ^ ALL64


@njit(cache=True, inline="always")
def _bit(mat, row, col):
    return (mat[row, col >> 6] >> U64(col & 63)) & ONE


@njit(cache=True)
def batch_ascend(words, fps, k, lam, r, r_pow_k1, r_inv, p, word_mask,
                 tags, syms, out_bits, in_bits, sample_words, h_max,
                 bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n, seed0):
    nq = words.shape[0]
    res = np.zeros(nq, dtype=np.bool_)
    high = U64(lam * (k - 1))
    lam_u = U64(lam)
    sym_mask = U64((1 << lam) - 1)
    r = U64(r)
    r_pow_k1 = U64(r_pow_k1)
    r_inv = U64(r_inv)
    p = U64(p)
    word_mask = U64(word_mask)
    n_u = U64(n)
    seed0 = U64(seed0)
    for q in range(nq):
        w = words[q]
        f = fps[q]
        s = _mphf_slot(f, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n_u, seed0)
        for step in range(h_max + 1):
            t = tags[s]
            if t == ROOT:
                res[q] = w == sample_words[s]
                break
            if step == h_max:
                break
            if t == VIA_OUT:
                a = np.int64(syms[s])
                if not _bit(out_bits, s, a):
                    break
                b = w >> high
                w = ((w << lam_u) & word_mask) | U64(a)
                f = addmod(mulmod(submod(f, mulmod(b, r_pow_k1, p), p), r, p), U64(a), p)
                s = _mphf_slot(f, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n_u, seed0)
                if not _bit(in_bits, s, np.int64(b)):
                    break
            elif t == VIA_IN:
                b = np.int64(syms[s])
                if not _bit(in_bits, s, b):
                    break
                a = w & sym_mask
                w = (w >> lam_u) | (U64(b) << high)
                f = addmod(mulmod(submod(f, a, p), r_inv, p), mulmod(U64(b), r_pow_k1, p), p)
                s = _mphf_slot(f, bits, word_off, nbits, seeds, rank, fb_keys, fb_slots, n_u, seed0)
                if not _bit(out_bits, s, np.int64(a)):
                    break
            else:
                break
    return res
