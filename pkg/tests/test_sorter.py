"""Sorting-block tests: record blocks, networks, vectorized reductions."""

from __future__ import annotations

import numpy as np
import pytest

from polarkit.sorter import (MetricRecord, bbs_2l_l, bitonic_bbs_2l_l,
                             block_reduce, min2, topk_stable)


def _records(values):
    return [MetricRecord(float(v), i) for i, v in enumerate(values)]


def _oracle(records, k):
    order = sorted(range(len(records)), key=lambda i: (records[i].metric, i))
    return [records[i] for i in order[:k]]


def test_bbs_example():
    out = bbs_2l_l(_records([5, 3, 8, 1, 9, 2, 7, 4]))
    assert [r.metric for r in out] == [1.0, 2.0, 3.0, 4.0]
    assert [r.payload for r in out] == [3, 5, 1, 7]


def test_bbs_ties_keep_position_order():
    out = bbs_2l_l(_records([2, 2, 2, 2, 2, 2, 2, 2]))
    assert [r.payload for r in out] == [0, 1, 2, 3]
    out = bbs_2l_l(_records([1, 2, 3, 4, 5, 6, 7, 8]))
    assert [r.payload for r in out] == [0, 1, 2, 3]


def test_bbs_validation():
    with pytest.raises(ValueError):
        bbs_2l_l(_records([1, 2, 3]))
    with pytest.raises(ValueError):
        bbs_2l_l([])


def test_bbs_random_against_full_sort():
    rng = np.random.default_rng(2)
    for _ in range(500):
        count = 2 * int(rng.integers(1, 9))
        values = rng.integers(0, 6, count).astype(float)
        recs = _records(values)
        assert bbs_2l_l(recs) == _oracle(recs, count // 2)


def test_min2():
    out = min2(_records([4, 1, 3, 2]))
    assert [r.metric for r in out] == [1.0, 2.0]
    assert [r.payload for r in out] == [1, 3]
    assert [r.payload for r in min2(_records([7, 7, 7]))] == [0, 1]
    assert [r.metric for r in min2(_records([9, 5]))] == [5.0, 9.0]
    with pytest.raises(ValueError):
        min2(_records([1]))


def test_bitonic_matches_functional():
    rng = np.random.default_rng(6)
    for count in (4, 8, 16):
        for _ in range(300):
            values = rng.integers(0, 5, count).astype(float)
            recs = _records(values)
            assert bitonic_bbs_2l_l(recs) == bbs_2l_l(recs)
    with pytest.raises(ValueError):
        bitonic_bbs_2l_l(_records([1, 2, 3, 4, 5, 6]))


def test_composition_recovers_global_minima():
    # two 2L->L blocks feeding one more reduce 4L records losslessly
    rng = np.random.default_rng(10)
    for _ in range(200):
        recs = _records(rng.integers(0, 10, 16).astype(float))
        first = bbs_2l_l(recs[:8])
        second = bbs_2l_l(recs[8:])
        final = bbs_2l_l(first + second)
        assert sorted(r.metric for r in final) == \
            sorted(r.metric for r in _oracle(recs, 4))
        assert {r.payload for r in final} == {r.payload for r in _oracle(recs, 4)}


def test_topk_stable():
    rng = np.random.default_rng(3)
    m = rng.integers(0, 4, (20, 12)).astype(float)
    idx = topk_stable(m, 5, axis=1)
    for row in range(20):
        oracle = sorted(range(12), key=lambda i: (m[row, i], i))[:5]
        assert idx[row].tolist() == oracle
    flat = np.array([3.0, 1.0, 1.0, 0.5])
    assert topk_stable(flat, 2).tolist() == [3, 1]


def test_block_reduce_matches_global():
    rng = np.random.default_rng(4)
    for k in (2, 4, 8):
        for m in (1, 2, 3):
            values = rng.integers(0, 7, k << m).astype(float)
            got = block_reduce(values, k)
            oracle = sorted(range(values.size), key=lambda i: (values[i], i))[:k]
            assert sorted(got.tolist()) == sorted(oracle)
            assert values[got].tolist() == sorted(values)[:k]


def test_block_reduce_identity_and_ties():
    assert block_reduce(np.array([5.0, 1.0]), 2).tolist() == [0, 1]
    assert block_reduce(np.full(16, 2.0), 4).tolist() == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        block_reduce(np.zeros(12), 8)
    with pytest.raises(ValueError):
        block_reduce(np.zeros(6), 2)
