import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyndbg.errors import NotPresent, RestartNeeded
from dyndbg.node_index import (DynamicIndex, build_static, dyn_insert, dyn_lookup, dyn_remove,
                               static_slot)


def test_static_small_examples():
    idx = build_static(np.array([12], dtype=np.uint64), seed=0)
    assert static_slot(12, idx) == 0
    assert static_slot(999, idx) == 0
    idx = build_static(np.array([12, 26], dtype=np.uint64), seed=0)
    assert {static_slot(12, idx), static_slot(26, idx)} == {0, 1}
    with pytest.raises(RestartNeeded):
        build_static(np.array([12, 12], dtype=np.uint64), seed=0)


def test_static_bijection_1e5():
    rng = np.random.default_rng(4)
    fps = np.unique(rng.integers(0, 2**61 - 1, size=100_000, dtype=np.uint64))
    idx = build_static(fps, seed=4)
    slots = idx.slots(fps)
    assert np.array_equal(np.sort(slots), np.arange(fps.size))
    # scalar path agrees with the vector path
    for i in range(0, fps.size, 997):
        assert idx.slot(int(fps[i])) == slots[i]


def test_static_total_on_non_members():
    fps = np.arange(1, 2001, dtype=np.uint64) * 7919
    idx = build_static(fps, seed=1)
    probe = np.arange(10**9, 10**9 + 5000, dtype=np.uint64)
    s = idx.slots(probe)
    assert s.min() >= 0 and s.max() < fps.size


def test_fingerprint_check_rejects_non_members():
    fps = np.arange(1, 501, dtype=np.uint64) * 31
    idx = build_static(fps, seed=2, check_fingerprints=True)
    assert not idx.rejects(31, idx.slot(31))
    assert idx.rejects(32, idx.slot(32))


@given(st.sets(st.integers(0, 2**61 - 2), min_size=1, max_size=300), st.integers(0, 2**32))
@settings(max_examples=60)
def test_static_bijection_property(keys, seed):
    fps = np.array(sorted(keys), dtype=np.uint64)
    idx = build_static(fps, seed)
    assert sorted(idx.slots(fps).tolist()) == list(range(len(keys)))


def test_dynamic_examples():
    idx = DynamicIndex()
    assert idx.m == 2
    out = dyn_insert(12, idx)
    assert (out.slot, out.already_present, idx.count) == (0, False, 1)
    again = dyn_insert(12, idx)
    assert again.already_present and again.slot == 0
    assert dyn_lookup(12, idx) == 0
    assert dyn_lookup(99, idx) is None
    dyn_insert(13, idx)
    out = dyn_insert(26, idx)
    assert out.remap is not None and out.remap.new_capacity == 6 and idx.m == 6
    dyn_remove(26, idx)
    dyn_remove(13, idx)
    dyn_remove(12, idx)
    assert idx.count == 0 and dyn_lookup(12, idx) is None
    with pytest.raises(NotPresent):
        dyn_remove(12, idx)


def test_dynamic_shrink_rule():
    idx = DynamicIndex(12)
    for f in (1, 2, 3, 4):
        dyn_insert(f, idx)
    assert idx.m == 12
    remap = dyn_remove(4, idx)
    assert remap is not None and remap.new_capacity == 6 and idx.m == 6
    live = sorted(idx.table.values())
    assert live == [0, 1, 2]


def test_lowest_free_slot_first():
    idx = DynamicIndex(8)
    for f in range(5):
        dyn_insert(f, idx)
    dyn_remove(1, idx)
    assert dyn_insert(100, idx).slot == 1


def test_dynamic_range_and_amortized_work():
    rng = random.Random(0)
    idx = DynamicIndex()
    live: list[int] = []
    ops = 100_000
    for _ in range(ops):
        if live and rng.random() < 0.45:
            f = live.pop(rng.randrange(len(live)))
            dyn_remove(f, idx)
        else:
            f = rng.getrandbits(61)
            out = dyn_insert(f, idx)
            assert out.slot < idx.m
            if not out.already_present:
                live.append(f)
        if idx.count:
            assert idx.m <= 3 * idx.count
        assert idx.count == len(live)
    assert len(set(idx.table.values())) == idx.count
    assert max(idx.table.values()) < 3 * idx.count
    c = idx.rebuild_work / ops
    print(f"rebuild work per op: {c:.3f}")
    assert idx.rebuild_work <= 4 * ops
