"""Timing helpers shared by ``dyndbg bench`` and the scaling acceptance check."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from statistics import median
from typing import Iterable, Optional

import numpy as np

from .graph import DeBruijnGraph, build_static_graph
from .kmer import Alphabet

CSV_HEADER = "mode,n,k,sigma,op,ns_per_op"


@dataclass
class Row:
    mode: str
    n: int
    k: int
    sigma: int
    op: str
    ns_per_op: float

    def csv(self) -> str:
        return f"{self.mode},{self.n},{self.k},{self.sigma},{self.op},{self.ns_per_op:.0f}"


def random_text(length: int, alphabet: Alphabet, seed: int) -> str:
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, alphabet.sigma, size=length)
    return alphabet.decode(codes.tolist())


def random_graph(n: int, k: int, alphabet: Alphabet, seed: int = 0,
                 dynamic: bool = False) -> tuple[DeBruijnGraph, str]:
    text = random_text(n + k - 1, alphabet, seed)
    return build_static_graph([text], k, alphabet, seed=seed, dynamic=dynamic), text


def membership_latency(g: DeBruijnGraph, text: str, queries: int, seed: int = 0,
                       repeats: int = 5) -> float:
    """Median per-query latency (ns) of is_node over present and absent k-mers."""
    rng = random.Random(seed)
    k, syms = g.k, g.alphabet.symbols
    qs = []
    for i in range(queries):
        if i % 2:
            j = rng.randrange(len(text) - k + 1)
            qs.append(text[j : j + k])
        else:
            qs.append("".join(rng.choice(syms) for _ in range(k)))
    for q in qs[:50]:  # warm caches
        g.is_node(q)
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        for q in qs:
            g.is_node(q)
        samples.append((time.perf_counter_ns() - t0) / len(qs))
    return median(samples)


def batch_latency(g: DeBruijnGraph, text: str, queries: int, seed: int = 0) -> float:
    rng = random.Random(seed)
    k = g.k
    qs = [text[j : j + k] for j in (rng.randrange(len(text) - k + 1) for _ in range(queries))]
    g.is_node_batch(qs[:10])
    t0 = time.perf_counter_ns()
    g.is_node_batch(qs)
    return (time.perf_counter_ns() - t0) / len(qs)


def update_latency(n: int, k: int, alphabet: Alphabet, ops: int, seed: int = 0) -> list[Row]:
    g, text = random_graph(n, k, alphabet, seed, dynamic=True)
    rng = random.Random(seed)
    syms = alphabet.symbols
    fresh = ["".join(rng.choice(syms) for _ in range(k)) for _ in range(ops)]
    rows = []
    t0 = time.perf_counter_ns()
    added = [x for x in fresh if g.add_node(x)]
    rows.append(Row("update", n, k, alphabet.sigma, "add_node", (time.perf_counter_ns() - t0) / ops))
    # give every fresh node a fresh successor so add_edge has work to do
    pairs = []
    for x in added:
        y = x[1:] + rng.choice(syms)
        if y != x and g.add_node(y):
            pairs.append((x, y))
    t0 = time.perf_counter_ns()
    for x, y in pairs:
        g.add_edge(x, y)
    if pairs:
        rows.append(Row("update", n, k, alphabet.sigma, "add_edge",
                        (time.perf_counter_ns() - t0) / len(pairs)))
        t0 = time.perf_counter_ns()
        for x, y in pairs:
            g.remove_edge(x, y)
        rows.append(Row("update", n, k, alphabet.sigma, "remove_edge",
                        (time.perf_counter_ns() - t0) / len(pairs)))
    t0 = time.perf_counter_ns()
    doomed = added + [y for _, y in pairs]
    for x in doomed:
        g.remove_node(x)
    if doomed:
        rows.append(Row("update", n, k, alphabet.sigma, "remove_node",
                        (time.perf_counter_ns() - t0) / len(doomed)))
    return rows


def run(mode: str, sizes: Iterable[int], k: int = 15, alphabet: Optional[Alphabet] = None,
        queries: int = 2000, seed: int = 0) -> list[Row]:
    alphabet = alphabet or Alphabet("ACGT")
    rows: list[Row] = []
    for n in sizes:
        if mode == "membership":
            t0 = time.perf_counter_ns()
            g, text = random_graph(n, k, alphabet, seed)
            rows.append(Row(mode, g.n, k, alphabet.sigma, "build",
                            (time.perf_counter_ns() - t0) / max(g.n, 1)))
            rows.append(Row(mode, g.n, k, alphabet.sigma, "is_node",
                            membership_latency(g, text, queries, seed)))
            if g.codec.fits_uint64:
                rows.append(Row(mode, g.n, k, alphabet.sigma, "is_node_batch",
                                batch_latency(g, text, queries, seed)))
        elif mode == "update":
            rows.extend(update_latency(n, k, alphabet, min(queries, n), seed))
        else:
            raise ValueError(f"unknown bench mode {mode!r}")
    return rows
