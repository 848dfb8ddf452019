"""Compare the numba and numpy kernel backends on identical inputs.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeats 3]

Prints one CSV row per kernel and backend (seconds, best of ``repeats``) and
checks that both backends return identical results.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from dyndbg import kernels
from dyndbg.bench import random_text
from dyndbg.graph import build_static_graph
from dyndbg.kmer import DNA


def _best(fn, repeats: int):
    best, out = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    n, k = args.n, 15

    text = random_text(n + k - 1, DNA, 7)
    codes = DNA.encode_array(text)
    g = build_static_graph([text[: min(n, 200_000) + k - 1]], k, DNA, seed=7)
    prm = g.params
    rpows = np.array(prm.r_pows, dtype=np.uint64)
    wf = kernels.window_fingerprints(codes, k, prm.r, prm.r_pow_k1, prm.p)
    rng = np.random.default_rng(1)
    queries = [text[i : i + k] for i in rng.integers(0, min(n, 200_000), 20_000)]
    src = rng.integers(0, n // 10, n // 5)
    dst = rng.integers(0, n // 10, n // 5)
    m = n // 10
    u, v = np.concatenate((src, dst)), np.concatenate((dst, src))
    order = np.argsort(u, kind="stable")
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(u, minlength=m), out=indptr[1:])
    blob = codes.tobytes()[: 1 << 20]

    cases = {
        "window_fingerprints": lambda: kernels.window_fingerprints(codes, k, prm.r, prm.r_pow_k1, prm.p),
        "window_hist_fingerprints": lambda: kernels.window_hist_fingerprints(codes, k, rpows, prm.p),
        "mphf_lookup": lambda: kernels.mphf_lookup(wf[:200_000], g.index.tables),
        "bfs_forest": lambda: kernels.bfs_forest(indptr, v[order], m),
        "crc64_1MiB": lambda: kernels.crc64(blob),
        "batch_ascend_20k": lambda: g.is_node_batch(queries),
    }
    backends = ["numba", "numpy"] if kernels.HAVE_NUMBA else ["numpy"]
    print("kernel,backend,seconds,speedup_vs_numpy,identical")
    for name, fn in cases.items():
        res = {}
        for be in backends:
            with kernels.using(be):
                fn()  # compile / warm up
                res[be] = _best(fn, args.repeats)
        base = res["numpy"][0]
        ok = _same(res[backends[0]][1], res["numpy"][1])
        for be in backends:
            t = res[be][0]
            print(f"{name},{be},{t:.4f},{base / t:.1f},{ok}")


if __name__ == "__main__":
    main()
