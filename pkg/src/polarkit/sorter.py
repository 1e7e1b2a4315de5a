"""Partial sorting blocks used by the survivor selection.

The workhorse reduces 2L metric records to the L smallest, output ascending.
Two realizations are kept deliberately: a functional one (stable sort) used
by the decoders, and a compare-exchange network mirroring a hardware bitonic
sorter. Ties break by record position, which callers arrange to be the
(path, candidate) generation order, so both realizations agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np


@dataclass(frozen=True)
class MetricRecord:
    metric: float
    payload: Any = None


def _check_even(records: Sequence[MetricRecord]) -> int:
    count = len(records)
    if count == 0 or count % 2:
        raise ValueError("record count must be even and positive")
    return count


def bbs_2l_l(records: Sequence[MetricRecord]) -> list[MetricRecord]:
    """The L smallest of 2L records, ascending, ties by input position."""
    count = _check_even(records)
    order = sorted(range(count), key=lambda i: (records[i].metric, i))
    return [records[i] for i in order[: count // 2]]


def min2(records: Sequence[MetricRecord]) -> list[MetricRecord]:
    """The two smallest records, ascending, ties by input position."""
    if len(records) < 2:
        raise ValueError("need at least two records")
    order = sorted(range(len(records)), key=lambda i: (records[i].metric, i))
    return [records[i] for i in order[:2]]


def bitonic_bbs_2l_l(records: Sequence[MetricRecord]) -> list[MetricRecord]:
    """Compare-exchange realization of bbs_2l_l.

    Runs a full bitonic sort on (metric, position) keys and keeps the lower
    half. Positions make the keys distinct, so the network output is the
    unique sorted order and matches the functional block.
    """
    count = _check_even(records)
    if count & (count - 1):
        raise ValueError("network size must be a power of two")
    keys = [(rec.metric, i) for i, rec in enumerate(records)]

    def exchange(i: int, j: int, ascending: bool):
        if (keys[i] > keys[j]) == ascending:
            keys[i], keys[j] = keys[j], keys[i]

    def merge(lo: int, cnt: int, ascending: bool):
        if cnt == 1:
            return
        half = cnt // 2
        for i in range(lo, lo + half):
            exchange(i, i + half, ascending)
        merge(lo, half, ascending)
        merge(lo + half, half, ascending)

    def sort(lo: int, cnt: int, ascending: bool):
        if cnt == 1:
            return
        half = cnt // 2
        sort(lo, half, True)
        sort(lo + half, half, False)
        merge(lo, cnt, ascending)

    sort(0, count, True)
    return [records[pos] for _, pos in keys[: count // 2]]


def topk_stable(metrics: np.ndarray, k: int, axis: int = -1) -> np.ndarray:
    """Indices of the k smallest along an axis, ascending, ties by index.

    Vectorized counterpart of the record blocks; a stable argsort gives the
    same tie behavior as position-ordered records.
    """
    order = np.argsort(metrics, axis=axis, kind="stable")
    return np.take(order, np.arange(k), axis=axis)


def block_reduce(metrics: np.ndarray, k: int) -> np.ndarray:
    """Reduce a flat metric array to k survivors via contiguous 2k-blocks.

    Repeatedly applies the 2k -> k block to adjacent groups until k entries
    remain, returning their indices into the original array in selection
    order. Requires len(metrics) to be k times a power of two. Because each
    stage keeps the k smallest of its block, the composition returns exactly
    the k globally smallest (stable in the original order).
    """
    metrics = np.asarray(metrics)
    count = metrics.size
    if count < k or count % k or ((count // k) & (count // k - 1)):
        raise ValueError("length must be k times a power of two")
    idx = np.arange(count)
    while idx.size > k:
        blocks = metrics[idx].reshape(-1, 2 * k)
        keep = topk_stable(blocks, k, axis=1)
        idx = np.take_along_axis(idx.reshape(-1, 2 * k), keep, axis=1).ravel()
    return idx
