import random

import numpy as np
import pytest

from dyndbg.adjacency import (AdjacencyMatrices, IndexOutOfRange, clear_edge_bits, confirmed,
                              payload_bytes, row_symbols, set_edge_bits)

A, C, G, T = range(4)


def test_examples():
    adj = AdjacencyMatrices(2, 4)
    set_edge_bits(adj, 0, T, 1, A)  # ACG -> CGT
    assert adj.out_bit(0, T) and adj.in_bit(1, A)
    assert confirmed(adj, 0, T, 1, A)
    assert not confirmed(adj, 1, A, 0, T)
    assert row_symbols(adj, 0, "out") == [T]
    assert row_symbols(adj, 0, "in") == []
    set_edge_bits(adj, 0, T, 1, A)
    clear_edge_bits(adj, 0, T, 1, A)
    assert not adj.out_bit(0, T) and not adj.in_bit(1, A)
    clear_edge_bits(adj, 0, T, 1, A)
    assert row_symbols(adj, 0, "out") == [] and row_symbols(adj, 1, "in") == []


def test_half_set_is_not_confirmed():
    adj = AdjacencyMatrices(2, 4)
    set_edge_bits(adj, 0, T, 1, A)
    adj._put(adj.in_bits, 1, A, False)
    assert not confirmed(adj, 0, T, 1, A)


def test_full_row():
    adj = AdjacencyMatrices(3, 70)
    for c in range(70):
        set_edge_bits(adj, 2, c, 0, c)
    assert row_symbols(adj, 2, "out") == list(range(70))
    assert row_symbols(adj, 0, "in") == list(range(70))


def test_range_errors():
    adj = AdjacencyMatrices(2, 4)
    with pytest.raises(IndexOutOfRange):
        set_edge_bits(adj, 2, 0, 0, 0)
    with pytest.raises(IndexOutOfRange):
        set_edge_bits(adj, 0, 4, 0, 0)
    with pytest.raises(ValueError):
        row_symbols(adj, 0, "sideways")


def test_monotone_random_triples():
    rng = random.Random(3)
    adj = AdjacencyMatrices(64, 20)
    for _ in range(10_000):
        i, j = rng.randrange(64), rng.randrange(64)
        a, b = rng.randrange(20), rng.randrange(20)
        set_edge_bits(adj, i, a, j, b)
        assert confirmed(adj, i, a, j, b)
        clear_edge_bits(adj, i, a, j, b)
        assert not confirmed(adj, i, a, j, b)


@pytest.mark.parametrize("m,sigma", [(1, 2), (7, 4), (33, 20), (5, 256), (100, 3)])
def test_pack_is_exactly_2m_sigma_bits(m, sigma):
    rng = np.random.default_rng(m * sigma)
    adj = AdjacencyMatrices(m, sigma)
    for _ in range(3 * m):
        set_edge_bits(adj, int(rng.integers(m)), int(rng.integers(sigma)),
                      int(rng.integers(m)), int(rng.integers(sigma)))
    blob = adj.pack()
    assert len(blob) == payload_bytes(2, m, sigma) == -(-(2 * m * sigma) // 8)
    back = AdjacencyMatrices.unpack(blob, m, sigma)
    assert np.array_equal(back.in_bits, adj.in_bits)
    assert np.array_equal(back.out_bits, adj.out_bits)


def test_remap_moves_rows():
    adj = AdjacencyMatrices(4, 4)
    set_edge_bits(adj, 3, G, 1, C)
    adj.remap(np.array([-1, 0, -1, 1]), 2)
    assert adj.m == 2
    assert adj.out_bit(1, G) and adj.in_bit(0, C)
    assert adj.edge_count() == 1
