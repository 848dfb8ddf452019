import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyndbg.errors import AlreadyRoot, EdgeNotConfirmed, NotARoot
from dyndbg.forest import (ROOT, UNASSIGNED, VIA_IN, VIA_OUT, ForestParams, ascend, attach,
                           collect_tree, cut, evert, spanning_forest)
from dyndbg.graph import build_static_graph
from dyndbg.kmer import DNA


def path_graph(text, k=3):
    """Graph of ``text`` with the forest reset to one path-shaped tree rooted at the first k-mer."""
    g = build_static_graph([text], k, DNA, seed=1, dynamic=True)
    words = [g._word(text[i : i + k]) for i in range(len(text) - k + 1)]
    hs = [g._handle(w) for w in words]
    f = g.forest
    f.samples.clear()
    f.set_spec(hs[0].slot, ROOT)
    f.samples[hs[0].slot] = hs[0].key
    for prev, h in zip(hs, hs[1:]):
        f.set_spec(h.slot, VIA_IN, g.codec.first(prev.key))
    return g, hs


def test_params():
    p = ForestParams(k=3, lam=2)
    assert (p.s_min, p.h_max, p.d_attach) == (6, 18, 12)


def test_ascend_examples():
    g = build_static_graph(["ACGT"], 3, DNA, seed=0)
    for v in ("ACG", "CGT"):
        a = ascend(g, g.forest, g._handle(g._word(v)))
        assert a.verified and a.depth <= 1
    root = next(iter(g.forest.samples))
    a = ascend(g, g.forest, g._handle(g.forest.samples[root]))
    assert a.verified and a.depth == 0
    assert not g.is_node("GGG")


def test_evert_counts_and_roots():
    g, hs = path_graph("ACGTTAC")  # 5-node path
    assert evert(g, g.forest, [hs[0]]) == 0
    path = ascend(g, g.forest, hs[2], record_path=True).path
    assert len(path) == 3
    assert evert(g, g.forest, path) == 3
    assert g.forest.is_root(hs[2].slot)
    g.forest.samples[hs[2].slot] = hs[2].key
    assert g.check_invariants() == []
    for h in hs:
        assert ascend(g, g.forest, h).root.slot == hs[2].slot


def test_evert_two_nodes_reverses_edge():
    g, hs = path_graph("ACGT")
    child, root = hs[1], hs[0]
    evert(g, g.forest, [child, root])
    g.forest.samples[child.slot] = child.key
    assert g.forest.is_root(child.slot)
    tag, sym, _ = g.forest.spec(root.slot)
    assert (tag, sym) == (VIA_OUT, DNA.code("T"))


def test_cut_and_attach():
    g, hs = path_graph("ACGT")
    cut(g.forest, hs[1])
    assert g.forest.root_count == 2 and len(g.forest.samples) == 2
    with pytest.raises(AlreadyRoot):
        cut(g.forest, hs[1])
    attach(g, g.forest, hs[1], hs[0], (VIA_IN, DNA.code("A"), 0))
    assert g.forest.root_count == 1 and hs[1].slot not in g.forest.samples
    assert g.check_invariants() == []
    with pytest.raises(NotARoot):
        attach(g, g.forest, hs[1], hs[0], (VIA_IN, DNA.code("A"), 0))


def test_attach_unconfirmed():
    g = build_static_graph(["ACGT", "GGGG"], 3, DNA, seed=0, dynamic=True)
    u, v = g._handle(g._word("GGG")), g._handle(g._word("ACG"))
    with pytest.raises(EdgeNotConfirmed):
        attach(g, g.forest, u, v, (VIA_OUT, 0, 0))


def test_cut_below_terminates_at_cut_node():
    g, hs = path_graph("ACGTTAC")
    cut(g.forest, hs[2])
    for h in hs[2:]:
        assert ascend(g, g.forest, h).root.slot == hs[2].slot
    scan = collect_tree(g, g.forest, hs[2], 100)
    assert scan.height == 4 - 2


def test_collect_tree_examples():
    g, hs = path_graph("ACGTTAC")
    scan = collect_tree(g, g.forest, hs[0], 10)
    assert (scan.size, scan.height, scan.deepest.slot) == (5, 4, hs[4].slot)
    assert not scan.truncated
    g2, hs2 = path_graph("ACGT")
    assert collect_tree(g2, g2.forest, hs2[0], 1).truncated
    g3 = build_static_graph(["AAA"], 3, DNA, seed=0)  # single node, self-loop
    root = g3._handle(g3._word("AAA"))
    scan = collect_tree(g3, g3.forest, root, 10)
    assert (scan.size, scan.height) == (1, 0)


def test_build_forest_examples():
    g = build_static_graph(["ACGT"], 3, DNA, seed=0)
    assert g.forest.root_count == 1 and len(g.forest.samples) == 1
    assert spanning_forest(0, np.zeros(0), np.zeros(0), 6).size == 0


def test_path_of_three_smin():
    s_min, h_max = 6, 18
    n = 3 * s_min
    src = np.arange(n - 1)
    parent = spanning_forest(n, src, src + 1, s_min)
    roots = int((parent < 0).sum())
    assert 1 <= roots <= 3
    depth = np.zeros(n, dtype=int)
    for x in range(n):
        d, y = 0, x
        while parent[y] >= 0:
            y, d = parent[y], d + 1
        depth[x] = d
    assert depth.max() <= h_max


def _tree_stats(parent):
    n = parent.size
    root_of = np.empty(n, dtype=int)
    depth = np.empty(n, dtype=int)
    for x in range(n):
        d, y = 0, x
        while parent[y] >= 0:
            y, d = parent[y], d + 1
            assert d <= n, "parent cycle"
        root_of[x], depth[x] = y, d
    return root_of, depth


@given(st.integers(2, 120), st.integers(1, 8), st.data())
@settings(max_examples=80, deadline=None)
def test_spanning_forest_invariants(n, s_min, data):
    import scipy.sparse as sp
    from scipy.sparse.csgraph import connected_components

    m = data.draw(st.integers(0, 3 * n))
    src = np.array(data.draw(st.lists(st.integers(0, n - 1), min_size=m, max_size=m)), dtype=int)
    dst = np.array(data.draw(st.lists(st.integers(0, n - 1), min_size=m, max_size=m)), dtype=int)
    parent = spanning_forest(n, src, dst, s_min)
    adj = sp.coo_matrix((np.ones(m), (src, dst)), shape=(n, n))
    ncomp, comp = connected_components(adj, directed=False)
    edges = set(zip(src.tolist(), dst.tolist()))
    for x, p in enumerate(parent.tolist()):
        if p >= 0:
            assert (x, p) in edges or (p, x) in edges
    root_of, depth = _tree_stats(parent)
    assert depth.max() <= 3 * s_min
    sizes = np.bincount(root_of, minlength=n)
    for r in np.flatnonzero(parent < 0):
        comp_size = int((comp == comp[r]).sum())
        assert sizes[r] >= s_min or sizes[r] == comp_size
        assert (comp[root_of == r] == comp[r]).all()
    assert int((parent < 0).sum()) <= n // s_min + ncomp


def test_scan_flags_unassigned_and_cycles():
    g, hs = path_graph("ACGTTAC")
    g.forest.set_spec(hs[3].slot, UNASSIGNED)
    assert any(f"slot {hs[3].slot}" in v for v in g.check_invariants(method="scalar"))
    g, hs = path_graph("ACGT")
    # make the root point at its child: a 2-cycle with no root
    g.forest.set_spec(hs[0].slot, VIA_OUT, DNA.code("T"))
    g.forest.samples.clear()
    assert g.check_invariants(method="scalar")
    assert g.check_invariants(method="vector")
