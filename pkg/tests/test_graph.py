import random
from itertools import product

import numpy as np
import pytest

from dyndbg.errors import (DistinctKmerCollision, EdgeAbsent, NodeAbsent, NotChainable,
                           SequenceTooShort, StaticGraphError)
from dyndbg.fingerprint import KrParams
from dyndbg.forest import ROOT, VIA_IN, VIA_OUT
from dyndbg.graph import (add_edge, add_node, build_static_graph, check_invariants, empty_graph,
                          has_edge, is_node, predecessors, remove_edge, remove_node, successors)
from dyndbg.kmer import DNA, PROTEIN
from dyndbg.oracle import NaiveGraph

from conftest import random_dna


def all_kmers(k, syms="ACGT"):
    return ["".join(t) for t in product(syms, repeat=k)]


def forest_state(g):
    f = g.forest
    return f.tags.tobytes(), f.syms.tobytes(), dict(f.samples)


def test_build_examples():
    g = build_static_graph(["ACGT"], 3, DNA)
    assert (g.n, g.e) == (2, 1) and has_edge("ACG", "CGT", g)
    g = build_static_graph(["AAAA"], 3, DNA)
    assert (g.n, g.e) == (1, 1) and has_edge("AAA", "AAA", g)
    g = build_static_graph(["ACGT", "CGTA"], 3, DNA)
    assert (g.n, g.e) == (3, 2)
    assert sorted(g.kmers()) == ["ACG", "CGT", "GTA"]


def test_short_sequences():
    with pytest.warns(UserWarning):
        g = build_static_graph(["AC", "ACGT"], 3, DNA)
    assert g.n == 2
    with pytest.raises(SequenceTooShort):
        build_static_graph(["AC"], 3, DNA, strict=True)


def test_queries_examples():
    g = build_static_graph(["ACGT"], 3, DNA)
    assert is_node("ACG", g) and not is_node("GGG", g)
    assert not has_edge("CGT", "GTA", g)
    with pytest.raises(NotChainable):
        has_edge("ACG", "TTT", g)
    assert successors("ACG", g) == [("T", "CGT")]
    assert predecessors("ACG", g) == []
    g = build_static_graph(["AAAA"], 3, DNA)
    assert successors("AAA", g) == [("A", "AAA")]


def test_static_is_immutable():
    g = build_static_graph(["ACGT"], 3, DNA)
    with pytest.raises(StaticGraphError):
        g.add_node("TTT")
    d = g.thaw()
    assert d.dynamic and d.add_node("TTT") and d.is_node("ACG")
    assert d.check_invariants() == []


def test_exhaustive_against_naive():
    rng = random.Random(8)
    seqs = [random_dna(rng, 60) for _ in range(5)]
    g = build_static_graph(seqs, 5, DNA, seed=3)
    ref = NaiveGraph.from_sequences(seqs, 5, DNA)
    assert (g.n, g.e) == (ref.n, ref.e)
    for x in all_kmers(5):
        assert g.is_node(x) == ref.is_node(x)
    for x in ref.kmers():
        assert sorted(g.successors(x)) == sorted(ref.successors(x))
        assert sorted(g.predecessors(x)) == sorted(ref.predecessors(x))
    assert g.check_invariants() == []
    got = g.is_node_batch(all_kmers(5))
    assert got.tolist() == [ref.is_node(x) for x in all_kmers(5)]


def test_protein_and_long_k():
    rng = random.Random(2)
    text = "".join(rng.choice(PROTEIN.symbols) for _ in range(400))
    g = build_static_graph([text], 40, PROTEIN, seed=1)  # 200-bit words: python-int path
    assert not g.codec.fits_uint64
    assert all(g.is_node(text[i : i + 40]) for i in range(0, 361, 7))
    assert not g.is_node("A" * 40)
    assert g.check_invariants() == []


def test_add_node_examples():
    g = empty_graph(3, DNA)
    assert add_node("TTT", g) and (g.n, g.forest.root_count) == (1, 1)
    assert add_node("TTT", g) is False and g.n == 1
    g = empty_graph(3, DNA)
    for x in all_kmers(3)[:10]:
        add_node(x, g)
    assert g.forest.root_count == 10 and g.check_invariants() == []


def test_add_edge_examples():
    g = empty_graph(3, DNA)
    add_node("ACG", g)
    add_node("CGT", g)
    assert add_edge("ACG", "CGT", g)
    assert g.forest.root_count == 1 and g.check_invariants() == []
    assert add_edge("ACG", "CGT", g) is False
    with pytest.raises(NodeAbsent):
        add_edge("CGT", "GTA", g)
    with pytest.raises(NotChainable):
        add_edge("ACG", "TTT", g)


def test_edge_inside_big_tree_leaves_forest():
    rng = random.Random(5)
    text = random_dna(rng, 400)
    g = build_static_graph([text], 4, DNA, seed=2, dynamic=True)
    ref = NaiveGraph.from_sequences([text], 4, DNA)
    cand = [(u, u[1:] + c) for u in ref.kmers() for c in "ACGT"
            if ref.is_node(u[1:] + c) and not ref.has_edge(u, u[1:] + c)]
    assert cand
    for u, v in cand[:20]:
        before = forest_state(g)
        add_edge(u, v, g)
        # all 256 4-mers fit in one component with big trees, so the forest stays put
        assert forest_state(g) == before
    assert g.check_invariants() == []


def test_attach_below_deep_nodes():
    rng = random.Random(11)
    text = random_dna(rng, 3000)
    g = build_static_graph([text], 8, DNA, seed=4, dynamic=True)
    ref = NaiveGraph.from_sequences([text], 8, DNA)
    nodes = ref.kmers()
    rng.shuffle(nodes)
    done = 0
    for x in nodes:
        y = x[1:] + rng.choice("ACGT")
        if ref.is_node(y):
            continue
        g.add_node(y)
        ref.add_node(y)
        g.add_edge(x, y)
        ref.add_edge(x, y)
        done += 1
        if done % 10 == 0:
            assert g.check_invariants() == []
        if done == 60:
            break
    assert g.check_invariants() == []
    assert sorted(g.edges()) == sorted(ref.edges())


def test_remove_edge_examples():
    g = empty_graph(3, DNA)
    add_node("ACG", g)
    add_node("CGT", g)
    add_edge("ACG", "CGT", g)
    remove_edge("ACG", "CGT", g)
    assert g.forest.root_count == 2 and g.check_invariants() == []
    with pytest.raises(EdgeAbsent):
        remove_edge("ACG", "CGT", g)
    with pytest.raises(NodeAbsent):
        remove_edge("TAC", "ACG", g)


def test_remove_non_tree_edge_keeps_forest():
    g = build_static_graph(["ACGTACGTA"], 3, DNA, dynamic=True)  # 4-cycle
    assert (g.n, g.e) == (4, 4)
    f = g.forest
    for u, v in g.edges():
        hu, hv = g._handle(g._word(u)), g._handle(g._word(v))
        tu, tv = f.spec(hu.slot)[0], f.spec(hv.slot)[0]
        tree = ((tu == VIA_OUT and f.syms[hu.slot] == DNA.code(v[-1]))
                or (tv == VIA_IN and f.syms[hv.slot] == DNA.code(u[0])))
        if not tree:
            before = forest_state(g)
            remove_edge(u, v, g)
            assert forest_state(g) == before
            assert not g.has_edge(u, v)
            break
    else:
        pytest.fail("a 4-cycle must have a non-tree edge")
    assert g.check_invariants() == []


def test_remove_bridges_random():
    rng = random.Random(21)
    text = random_dna(rng, 2000)
    g = build_static_graph([text], 8, DNA, seed=9, dynamic=True)
    ref = NaiveGraph.from_sequences([text], 8, DNA)
    edges = ref.edges()
    rng.shuffle(edges)
    for i, (u, v) in enumerate(edges[:150]):
        g.remove_edge(u, v)
        ref.remove_edge(u, v)
        if i % 15 == 0:
            assert g.check_invariants() == []
    assert g.check_invariants() == []
    assert g.component_count() == len(_components(ref))


def _components(ref):
    seen, comps = set(), []
    for x in ref.kmers():
        if x in seen:
            continue
        stack, comp = [x], set()
        while stack:
            y = stack.pop()
            if y in comp:
                continue
            comp.add(y)
            stack += [z for _, z in ref.successors(y)] + [z for _, z in ref.predecessors(y)]
        seen |= comp
        comps.append(comp)
    return comps


def test_remove_node_examples():
    g = empty_graph(3, DNA)
    add_node("TTT", g)
    add_node("ACG", g)
    remove_node("TTT", g)
    assert g.n == 1 and not is_node("TTT", g) and is_node("ACG", g)
    with pytest.raises(NodeAbsent):
        remove_node("TTT", g)
    g = build_static_graph(["ACGTA"], 3, DNA, dynamic=True)
    remove_node("CGT", g)
    assert g.component_count() == 2 and g.check_invariants() == []
    assert not is_node("CGT", g) and is_node("ACG", g) and is_node("GTA", g)
    g = build_static_graph(["AAAAC"], 3, DNA, dynamic=True)
    remove_node("AAA", g)
    assert g.n == 1 and g.e == 0 and g.check_invariants() == []


def test_corrupted_spec_is_reported():
    rng = random.Random(4)
    g = build_static_graph([random_dna(rng, 500)], 6, DNA, seed=1)
    assert check_invariants(g) == []
    f = g.forest
    victim = int(np.flatnonzero(f.tags != ROOT)[0])
    f.syms[victim] = (f.syms[victim] + 1) % 4
    for method in ("scalar", "vector"):
        report = g.check_invariants(method=method)
        assert report and any(f"slot {victim}" in v for v in report), method


def test_scalar_and_vector_scans_agree_under_faults():
    rng = random.Random(6)
    for trial in range(15):
        g = build_static_graph([random_dna(rng, 800)], 7, DNA, seed=trial, dynamic=True)
        f = g.forest
        kind = trial % 3
        s = rng.randrange(g.m)
        if kind == 0:
            f.tags[s] = ROOT
        elif kind == 1:
            f.syms[s] = (f.syms[s] + 1) % 4
        else:
            g.adj.out_bits[s] = 0
        a = bool(g.check_invariants(method="scalar"))
        b = bool(g.check_invariants(method="vector"))
        assert a == b


def test_toy_collision_is_caught():
    prm = KrParams.toy()
    g = build_static_graph(["ACGT"], 3, DNA, dynamic=True, params=prm)
    # TAT and GGA share fingerprints with ACG and CGT under p=97, r=10
    assert not g.is_node("TAT") and not g.is_node("GGA")
    with pytest.raises(DistinctKmerCollision):
        g.add_node("TAT")
    s = build_static_graph(["ACGT"], 3, DNA, params=prm)
    assert [s.is_node(x) for x in ("ACG", "CGT", "TAT", "GGA")] == [True, True, False, False]


def test_build_is_deterministic():
    rng = random.Random(1)
    text = random_dna(rng, 3000)
    a = build_static_graph([text], 11, DNA, seed=77)
    b = build_static_graph([text], 11, DNA, seed=77)
    assert a.params == b.params
    assert np.array_equal(a.forest.tags, b.forest.tags)
    assert a.forest.samples == b.forest.samples


def test_forest_bounds_after_build():
    rng = random.Random(3)
    g = build_static_graph([random_dna(rng, 20_000)], 9, DNA, seed=5)
    kl = g.k * DNA.lam
    assert g.forest.root_count <= g.n // kl + g.component_count()
    assert g.check_invariants() == []
