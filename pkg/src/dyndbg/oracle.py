"""Reference implementations and differential fuzzing.

:class:`NaiveGraph` keeps the k-mers as Python strings in sets; it is the
ground truth the fuzzer compares the succinct graph against.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import EdgeAbsent, LengthMismatch, NodeAbsent, NotChainable, UnknownSymbol
from .kmer import Alphabet
from .ops import MUTATIONS, Op, Script, outcome


class NaiveGraph:
    def __init__(self, k: int, alphabet: Alphabet):
        self.k = k
        self.alphabet = alphabet
        self.nodes: set[str] = set()
        self.edge_set: set[tuple[str, str]] = set()

    @classmethod
    def from_sequences(cls, seqs: Iterable[str], k: int, alphabet: Alphabet) -> "NaiveGraph":
        g = cls(k, alphabet)
        for s in seqs:
            if len(s) < k:
                continue
            for ch in set(s):
                if ch not in alphabet.symbols:
                    raise UnknownSymbol(f"{ch!r} not in alphabet")
            win = [s[i : i + k] for i in range(len(s) - k + 1)]
            g.nodes.update(win)
            g.edge_set.update(zip(win, win[1:]))
        return g

    def _validate(self, x: str) -> str:
        if len(x) != self.k:
            raise LengthMismatch(f"expected length {self.k}, got {len(x)}")
        for ch in x:
            if ch not in self.alphabet.symbols:
                raise UnknownSymbol(f"{ch!r} not in alphabet")
        return x

    def _pair(self, u: str, v: str) -> None:
        self._validate(u)
        self._validate(v)
        if u[1:] != v[:-1]:
            raise NotChainable(f"{u} does not overlap {v}")

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def e(self) -> int:
        return len(self.edge_set)

    def is_node(self, v: str) -> bool:
        return self._validate(v) in self.nodes

    def has_edge(self, u: str, v: str) -> bool:
        self._pair(u, v)
        return (u, v) in self.edge_set

    def successors(self, v: str) -> list[tuple[str, str]]:
        self._validate(v)
        return sorted((c, v[1:] + c) for c in self.alphabet.symbols if (v, v[1:] + c) in self.edge_set)

    def predecessors(self, v: str) -> list[tuple[str, str]]:
        self._validate(v)
        return sorted((c, c + v[:-1]) for c in self.alphabet.symbols if (c + v[:-1], v) in self.edge_set)

    def add_node(self, v: str) -> bool:
        self._validate(v)
        if v in self.nodes:
            return False
        self.nodes.add(v)
        return True

    def add_edge(self, u: str, v: str) -> bool:
        self._pair(u, v)
        for x in (u, v):
            if x not in self.nodes:
                raise NodeAbsent(f"{x} is not in the graph")
        if (u, v) in self.edge_set:
            return False
        self.edge_set.add((u, v))
        return True

    def remove_edge(self, u: str, v: str) -> None:
        self._pair(u, v)
        for x in (u, v):
            if x not in self.nodes:
                raise NodeAbsent(f"{x} is not in the graph")
        if (u, v) not in self.edge_set:
            raise EdgeAbsent(f"{u} -> {v} is not an edge")
        self.edge_set.discard((u, v))

    def remove_node(self, v: str) -> None:
        self._validate(v)
        if v not in self.nodes:
            raise NodeAbsent(f"{v} is not in the graph")
        self.nodes.discard(v)
        self.edge_set = {(a, b) for a, b in self.edge_set if v not in (a, b)}

    def check_invariants(self) -> list[str]:
        return []

    def kmers(self) -> list[str]:
        return sorted(self.nodes)

    def edges(self) -> list[tuple[str, str]]:
        return sorted(self.edge_set)


def naive_jumbled_match(text: str, k: int, pattern: str) -> bool:
    """Does some length-k window of ``text`` hold the same symbols as ``pattern``?"""
    if len(pattern) != k:
        raise LengthMismatch(f"pattern length {len(pattern)} != k={k}")
    want = sorted(pattern)
    return any(sorted(text[i : i + k]) == want for i in range(len(text) - k + 1))


# ---------------------------------------------------------------------------
# fuzzing

# share of each operation in the generated stream
OP_MIX = (("addedge", 35), ("deledge", 15), ("addnode", 15), ("delnode", 5),
          ("query", 20), ("adjacent", 10))


def _random_kmer(rng: random.Random, k: int, syms: str) -> str:
    return "".join(rng.choice(syms) for _ in range(k))


def _pick_kmer(rng: random.Random, g: NaiveGraph, nodes: list, hit: float = 0.7) -> str:
    syms = g.alphabet.symbols
    if nodes and rng.random() < hit:
        x = rng.choice(nodes)
        r = rng.random()
        if r < 0.5:
            return x
        if r < 0.75:
            return x[1:] + rng.choice(syms)
        return rng.choice(syms) + x[:-1]
    return _random_kmer(rng, g.k, syms)


def generate_op(rng: random.Random, g: NaiveGraph) -> Op:
    names, weights = zip(*OP_MIX)
    kind = rng.choices(names, weights)[0]
    syms = g.alphabet.symbols
    nodes = sorted(g.nodes)
    if kind == "addedge":
        u = _pick_kmer(rng, g, nodes, 0.9)
        cands = [u[1:] + c for c in syms if u[1:] + c in g.nodes]
        if cands and rng.random() < 0.8:
            v = rng.choice(cands)
        elif rng.random() < 0.1:
            v = _random_kmer(rng, g.k, syms)
        else:
            v = u[1:] + rng.choice(syms)
        return Op("addedge", (u, v))
    if kind == "deledge":
        if g.edge_set and rng.random() < 0.8:
            u, v = rng.choice(sorted(g.edge_set))
        else:
            u = _pick_kmer(rng, g, nodes)
            v = u[1:] + rng.choice(syms)
        return Op("deledge", (u, v))
    if kind == "addnode":
        return Op("addnode", (_pick_kmer(rng, g, nodes),))
    if kind == "delnode":
        if nodes and rng.random() < 0.9:
            return Op("delnode", (rng.choice(nodes),))
        return Op("delnode", (_pick_kmer(rng, g, nodes),))
    if kind == "query":
        return Op("query", (_pick_kmer(rng, g, nodes),))
    u = _pick_kmer(rng, g, nodes)
    r = rng.random()
    if r < 0.5:
        return Op("hasedge", (u, u[1:] + rng.choice(syms)))
    return Op("succ" if r < 0.75 else "pred", (u,))


@dataclass
class Failure:
    step: int
    op: Op
    expected: object
    got: object


@dataclass
class FuzzResult:
    ok: bool
    ops: list = field(default_factory=list)
    failure: Optional[Failure] = None
    shrunk: Optional[Script] = None
    checks: int = 0

    @property
    def repro(self) -> str:
        return self.shrunk.render() if self.shrunk is not None else ""


def _new_pair(script: Script):
    from .graph import build_static_graph, empty_graph

    alpha = Alphabet(script.symbols)
    naive = NaiveGraph.from_sequences(script.seqs, script.k, alpha)
    if script.seqs:
        g = build_static_graph(script.seqs, script.k, alpha, seed=script.seed, dynamic=True)
    else:
        g = empty_graph(script.k, alpha, seed=script.seed)
    return g, naive


def replay(script: Script, check: bool = True,
           on_step: Optional[Callable] = None) -> tuple[Optional[Failure], int]:
    """Run a script on both implementations; first divergence or None."""
    g, naive = _new_pair(script)
    checks = 0
    if check:
        bad = g.check_invariants()
        checks += 1
        if bad:
            return Failure(-1, Op("check"), [], bad[:5]), checks
    for i, op in enumerate(script.ops):
        try:
            want = outcome(naive, op)
            got = outcome(g, op)
        except Exception as exc:  # a crash is a divergence too
            return Failure(i, op, "no crash", f"{type(exc).__name__}: {exc}"), checks
        if op.name == "check":
            want = ("ok", [])
        if want != got:
            return Failure(i, op, want, got), checks
        if check and op.name in MUTATIONS:
            checks += 1
            try:
                bad = g.check_invariants()
            except Exception as exc:
                bad = [f"{type(exc).__name__}: {exc}"]
            if bad:
                return Failure(i, op, [], bad[:5]), checks
        if on_step is not None:
            on_step(i, g, naive)
    return None, checks


def shrink(script: Script, check: bool = True, max_rounds: int = 8) -> Script:
    """Greedy op deletion while the failure persists."""
    cur = Script(script.k, script.symbols, script.seed, list(script.seqs), list(script.ops))
    fail, _ = replay(cur, check)
    if fail is None:
        return cur
    cur.ops = cur.ops[: fail.step + 1]
    for _ in range(max_rounds):
        changed = False
        chunk = max(1, len(cur.ops) // 2)
        while chunk >= 1:
            i = 0
            while i < len(cur.ops):
                trial = Script(cur.k, cur.symbols, cur.seed, cur.seqs, cur.ops[:i] + cur.ops[i + chunk :])
                f, _ = replay(trial, check)
                if f is not None:
                    cur.ops = trial.ops[: f.step + 1] if f.step >= 0 else []
                    changed = True
                else:
                    i += chunk
            chunk //= 2
        if cur.seqs:
            trial = Script(cur.k, cur.symbols, cur.seed, [], cur.ops)
            if replay(trial, check)[0] is not None:
                cur.seqs = []
                changed = True
        if not changed:
            break
    return cur


def generate_script(seed: int, n_ops: int, k: int = 8, symbols: str = "ACGT",
                    init_len: int = 0) -> Script:
    """Random op script; ops are drawn from the naive graph's evolving state."""
    rng = random.Random(seed)
    seqs = [_random_kmer(rng, init_len, symbols)] if init_len >= k else []
    script = Script(k, symbols, seed, seqs, [])
    naive = NaiveGraph.from_sequences(seqs, k, Alphabet(symbols))
    for _ in range(n_ops):
        op = generate_op(rng, naive)
        outcome(naive, op)
        script.ops.append(op)
    return script


def fuzz_run(seed: int, n_ops: int, k: int = 8, symbols: str = "ACGT", init_len: int = 0,
             check: bool = True, do_shrink: bool = True) -> FuzzResult:
    """Generate ``n_ops`` random operations and compare against NaiveGraph.

    Most operations hit existing nodes and edges. ``init_len`` > 0 bulk-loads
    a random text first, which gives deep trees from the start.
    """
    script = generate_script(seed, n_ops, k, symbols, init_len)
    fail, checks = replay(script, check)
    res = FuzzResult(fail is None, script.ops, fail, checks=checks)
    if fail is not None and do_shrink:
        res.shrunk = shrink(script, check)
    elif fail is not None:
        res.shrunk = script
    return res
