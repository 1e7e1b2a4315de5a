"""Shared helpers: channel frame generation and lockstep list-state drivers.

The lockstep drivers run a lazily copied and an eagerly copied state side by
side through the same decisions and assert that every observed LLR view and
metric agrees exactly. They return the number of compared entries so callers
can enforce a case budget.
"""

from __future__ import annotations

import math

import numpy as np

from polarkit.code import encode, polar_transform
from polarkit.crc import attach_crc
from polarkit.rlld import RlldDecoder, lmld_expand, node_metrics, slmld_expand
from polarkit.scl import ListState, assign_slots, expand_and_prune
from polarkit.sim import NOISELESS_LLR, ChannelConfig
from polarkit.tree import RATE0


def channel_frames(code, rng, ebn0_db=2.0, count=64, noiseless=False):
    """Random frames through BPSK/AWGN: (payloads, u, x, llrs), batched."""
    payloads = rng.integers(0, 2, (count, code.payload_len), dtype=np.int8)
    if code.crc is not None:
        data = np.stack([attach_crc(code.crc, p) for p in payloads])
    else:
        data = payloads
    u = np.zeros((count, code.block_len), dtype=np.int8)
    u[:, code.info_idx] = data
    x = encode(code, u)
    symbols = 1.0 - 2.0 * x.astype(np.float64)
    if noiseless:
        return payloads, u, x, NOISELESS_LLR * symbols
    sigma2 = ChannelConfig(ebn0_db, code.k / code.block_len).sigma2
    y = symbols + rng.normal(scale=math.sqrt(sigma2), size=x.shape)
    return payloads, u, x, 2.0 * y / sigma2


def lockstep_cs(code, llrs, list_size):
    """Bit-by-bit list decode on lazy and eager states simultaneously."""
    n, size = code.n, code.block_len
    lazy = ListState(n, list_size, llrs)
    eager = ListState(n, list_size, llrs, eager=True)
    starts = [0] + [n - ((i & -i).bit_length() - 1) for i in range(1, size)]
    nxt = starts[1:] + [n + 1]
    zeros = np.zeros((list_size, 1), dtype=np.int8)
    compared = 0
    n_act = 1
    for i in range(size):
        for st in (lazy, eager):
            st.llr_comp(starts[i], n)
        a_l = lazy.p[n][:, 0]
        a_e = eager.p[n][:, 0]
        assert np.array_equal(a_l, a_e)
        assert np.array_equal(lazy.pm, eager.pm)
        compared += a_l.size
        if code.frozen[i]:
            for st, alpha in ((lazy, a_l), (eager, a_e)):
                np.add(st.pm, np.maximum(-alpha, 0.0), out=st.pm)
                st.psum_store(n, i, zeros)
        else:
            srcs, bits, metrics = expand_and_prune(
                lazy.pm, np.maximum(-a_l, 0.0), np.maximum(a_l, 0.0),
                list_size, n_finite=2 * n_act)
            n_act = len(srcs)
            slots = assign_slots(srcs, bits, metrics, list_size)
            decisions = np.asarray(slots[1], dtype=np.int8)
            for st in (lazy, eager):
                st.clone_and_prune(slots[0], slots[2], slots[3], nxt[i])
                st.u[:, i] = decisions
                st.psum_store(n, i, decisions[:, None])
    assert np.array_equal(lazy.u, eager.u)
    assert np.array_equal(lazy.pm, eager.pm)
    return compared


def lockstep_rlld(code, llrs, list_size, w_t=16, w_ml=16, mode="lmld"):
    """Node-schedule list decode on lazy and eager states simultaneously."""
    dec = RlldDecoder(code, list_size, w_t, w_ml, mode=mode)
    lazy = ListState(code.n, list_size, llrs)
    eager = ListState(code.n, list_size, llrs, eager=True)
    compared = 0
    n_act = 1
    for op, node, i_s, top, has_compute, next_i_s, inputs, words in dec._steps:
        if has_compute:
            lazy.llr_comp(i_s, top)
            eager.llr_comp(i_s, top)
        lo, hi = node.idx0, node.idx1 + 1
        if op == "decode_t0":
            if node.kind == RATE0:
                beta = np.zeros((list_size, node.width), dtype=np.int8)
            else:
                a_l = lazy.node_llr(node.layer)
                a_e = eager.node_llr(node.layer)
                assert np.array_equal(a_l, a_e)
                compared += a_l.size
                beta = (a_l < 0).astype(np.int8)
                lazy.u[:, lo:hi] = polar_transform(beta)
                eager.u[:, lo:hi] = polar_transform(beta)
            lazy.psum_store(node.layer, node.idx1, beta)
            eager.psum_store(node.layer, node.idx1, beta)
            continue
        a_l = lazy.node_llr(node.layer)
        a_e = eager.node_llr(node.layer)
        assert np.array_equal(a_l, a_e)
        assert np.array_equal(lazy.pm, eager.pm)
        compared += a_l.size
        nm = node_metrics(a_l, words)
        if mode == "lmld":
            srcs, js, metrics = lmld_expand(lazy.pm, nm, list_size,
                                            n_finite=n_act * nm.shape[1])
        else:
            srcs, js, metrics = slmld_expand(lazy.pm, nm, list_size)
        n_act = len(srcs)
        slots = assign_slots(srcs, js, metrics, list_size)
        for st in (lazy, eager):
            st.clone_and_prune(slots[0], slots[2], slots[3], next_i_s)
            st.u[:, lo:hi] = inputs[slots[1]]
            st.psum_store(node.layer, node.idx1, words[slots[1]])
    assert np.array_equal(lazy.u, eager.u)
    assert np.array_equal(lazy.pm, eager.pm)
    return compared
