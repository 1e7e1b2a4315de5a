"""Node-schedule list decoder.

Instead of forking at every information bit, the decoder walks the pruned
tree's schedule. Terminals classed t0 decode in one shot per path with no
metric update. Terminals classed t1 expand every path over the node's
constituent codebook: each candidate adds the node metric (the mass of
channel-side evidence it contradicts) to the path metric, and the list keeps
the globally best continuations.

Two selection strategies are provided. The exact one ranks all
list_size * 2^d extended metrics at once. The staged one first reduces each
path's candidates to at most list_size using the grouped min-2 plus
2L-to-L blocks of a hardware sorter arrangement, then reduces the
list_size * list_size extended metrics with the same blocks; it matches the
exact strategy whenever 2^d is at most twice the list size.
"""

from __future__ import annotations

import numpy as np

from .code import PolarCode, constituent_codebook, polar_transform
from .scl import DecodeResult, ListState, _finalize, assign_slots
from .sorter import block_reduce, topk_stable
from .tree import (ML, RATE0, RATE1, Action, CodeTree, TreeNode,
                   boundary_layers, build_tree, prune_and_label, schedule)


def llr_comp(state: ListState, node: TreeNode, rate0: bool | None = None) -> None:
    """Materialize the LLR layers a scheduled node needs."""
    i_s, _ = boundary_layers(state.n, node.idx0, node.idx1)
    if rate0 is None:
        rate0 = node.kind == RATE0
    top = node.layer - 1 if rate0 else node.layer
    state.llr_comp(i_s, top)


def psum_comp(state: ListState, node: TreeNode, beta: np.ndarray) -> int:
    """Store a node's decisions and propagate partial sums upward."""
    return state.psum_store(node.layer, node.idx1, beta)


def decode_t0(state: ListState, node: TreeNode) -> np.ndarray:
    """Instant per-path decision for a t0 terminal; no metric update."""
    if node.kind == RATE0:
        return np.zeros((state.L, node.width), dtype=np.int8)
    alpha = state.node_llr(node.layer)
    return (alpha < 0).astype(np.int8)


def node_metrics(alpha: np.ndarray, codewords: np.ndarray) -> np.ndarray:
    """Mismatch mass of every candidate codeword against per-path LLRs.

    alpha has shape (L, w), codewords (J, w); the result (L, J) sums |alpha|
    over the positions where the candidate differs from the elementwise hard
    decision, so a candidate equal to the hard decision costs zero.
    """
    hard = alpha < 0
    disagree = np.asarray(codewords, dtype=bool)[None, :, :] != hard[:, None, :]
    return np.einsum("lw,ljw->lj", np.abs(alpha), disagree)


def lmld_expand(pm: np.ndarray, nm: np.ndarray, list_size: int,
                n_finite: int | None = None):
    """Exact selection over all extended metrics.

    Candidates are ordered path-major, codeword index minor; ties keep that
    order. Returns (sources, codeword indices, metrics) of the at most
    list_size smallest finite candidates, ascending. n_finite, when given,
    is the known number of finite candidates.
    """
    count = nm.shape[1]
    ext = (pm[:, None] + nm).ravel()
    if n_finite is None:
        n_finite = int(np.isfinite(ext).sum())
    keep = min(list_size, n_finite)
    pick = np.argsort(ext, kind="stable")[:keep]
    return pick // count, pick % count, ext[pick]


def slmld_expand(pm: np.ndarray, nm: np.ndarray, list_size: int):
    """Staged selection: per-path reduction, then global block reduction.

    Stage one reduces each path's node metrics to at most list_size
    survivors: all of them when 2^d <= L, one 2L-to-L block when 2^d = 2L,
    and otherwise L contiguous groups of q = 2^d / L with a min-2 pick per
    group feeding one 2L-to-L block (lossy relative to a full per-path
    sort). Stage two adds the path metrics and reduces the path-major
    list_size * list_size array with 2L-to-L blocks over contiguous spans.
    """
    if list_size & (list_size - 1):
        raise ValueError("staged selection needs a power-of-two list size")
    paths, count = nm.shape
    if count <= list_size:
        sel = topk_stable(nm, count, axis=1)
        m1 = np.take_along_axis(nm, sel, axis=1)
        js1 = sel
    elif count == 2 * list_size:
        sel = topk_stable(nm, list_size, axis=1)
        m1 = np.take_along_axis(nm, sel, axis=1)
        js1 = sel
    else:
        q = count // list_size
        groups = nm.reshape(paths, list_size, q)
        two = topk_stable(groups, 2, axis=2)
        pair_m = np.take_along_axis(groups, two, axis=2)
        pair_j = two + (np.arange(list_size) * q)[None, :, None]
        flat_m = pair_m.reshape(paths, 2 * list_size)
        flat_j = pair_j.reshape(paths, 2 * list_size)
        sel = topk_stable(flat_m, list_size, axis=1)
        m1 = np.take_along_axis(flat_m, sel, axis=1)
        js1 = np.take_along_axis(flat_j, sel, axis=1)

    cols = m1.shape[1]
    ext = (pm[:, None] + m1).ravel()
    pick = block_reduce(ext, list_size)
    metrics = ext[pick]
    # a degenerate reduce (L inputs) returns its input order; the block
    # contract is ascending output, ties by generation order
    order = np.argsort(metrics, kind="stable")
    pick = pick[order]
    metrics = metrics[order]
    finite = np.isfinite(metrics)
    pick = pick[finite]
    return pick // cols, js1.ravel()[pick], metrics[finite]


class RlldDecoder:
    """Schedule-driven list decoder over a pruned, labeled tree."""

    def __init__(self, code: PolarCode, list_size: int = 4, w_t: int = 32,
                 w_ml: int = 16, i_ml_max: int = 8, mode: str = "lmld",
                 eager: bool = False, check: bool = False):
        if mode not in ("lmld", "slmld"):
            raise ValueError(f"unknown selection mode {mode!r}")
        if mode == "slmld" and list_size not in (2, 4, 8):
            raise ValueError("staged selection supports list sizes 2, 4, 8")
        self.code = code
        self.L = list_size
        self.mode = mode
        self.eager = eager
        self.check = check
        self.tree = prune_and_label(build_tree(code), w_t, w_ml, i_ml_max)
        self.actions = schedule(self.tree)
        self.n_t1 = sum(1 for a in self.actions if a.op == "decode_t1")

        # flatten the schedule into per-terminal step records
        terminals = [a for a in self.actions if a.op in ("decode_t0", "decode_t1")]
        steps = []
        for pos, act in enumerate(terminals):
            node = act.node
            if pos + 1 < len(terminals):
                nxt = terminals[pos + 1]
                next_i_s = nxt.i_s
            else:
                next_i_s = code.n + 1
            if node.list_class == "t1":
                if node.kind == RATE1:
                    local = np.zeros(node.width, dtype=bool)
                else:
                    local = node.frozen_local
                inputs, words = constituent_codebook(local)
            else:
                inputs = words = None
            has_compute = max(act.i_s, 1) <= act.top
            steps.append((act.op, node, act.i_s, act.top, has_compute,
                          next_i_s, inputs, words))
        self._steps = steps

    def decode(self, channel_llrs: np.ndarray) -> DecodeResult:
        code, L = self.code, self.L
        st = ListState(code.n, L, channel_llrs, eager=self.eager)
        exact = self.mode == "lmld"
        n_act = 1
        for op, node, i_s, top, has_compute, next_i_s, inputs, words in self._steps:
            if has_compute:
                st.llr_comp(i_s, top)
            lo, hi = node.idx0, node.idx1 + 1
            if op == "decode_t0":
                if node.kind == RATE0:
                    beta = np.zeros((L, node.width), dtype=np.int8)
                else:
                    beta = (st.node_llr(node.layer) < 0).astype(np.int8)
                    st.u[:, lo:hi] = polar_transform(beta)
                st.psum_store(node.layer, node.idx1, beta)
                continue
            alpha = st.node_llr(node.layer)
            nm = node_metrics(alpha, words)
            if exact:
                srcs, js, metrics = lmld_expand(
                    st.pm, nm, L, n_finite=n_act * nm.shape[1])
            else:
                srcs, js, metrics = slmld_expand(st.pm, nm, L)
            n_act = len(srcs)
            if self.check:
                self._check_expansion(st, node, nm, srcs, js, metrics)
            slot_src, slot_tag, slot_pm, slot_act = assign_slots(srcs, js, metrics, L)
            st.clone_and_prune(slot_src, slot_pm, slot_act, next_i_s)
            st.u[:, lo:hi] = inputs[slot_tag]
            st.psum_store(node.layer, node.idx1, words[slot_tag])
        return _finalize(st, code, n_activations=self.n_t1)

    def _check_expansion(self, st, node, nm, srcs, js, metrics):
        """Debug invariants: metric additivity and selection optimality."""
        assert np.all(np.isfinite(metrics))
        assert np.all(st.active[srcs])
        for s, j, m in zip(srcs, js, metrics):
            assert m == st.pm[s] + nm[s, j]
        if node.kind == RATE1:
            # every active path's hard decision lives in the full codebook
            assert np.all(nm[st.active].min(axis=1) == 0.0)
        if self.mode == "lmld":
            flat = (st.pm[:, None] + nm).ravel()
            oracle = sorted(range(flat.size), key=lambda i: (flat[i], i))
            oracle = [i for i in oracle if np.isfinite(flat[i])][: len(metrics)]
            count = nm.shape[1]
            assert [(s, j) for s, j in zip(srcs, js)] == \
                [(i // count, i % count) for i in oracle]


def rlld_decode(code: PolarCode, channel_llrs: np.ndarray, list_size: int = 4,
                w_t: int = 32, w_ml: int = 16, i_ml_max: int = 8,
                mode: str = "lmld", eager: bool = False,
                check: bool = False) -> DecodeResult:
    """One-shot interface over RlldDecoder."""
    dec = RlldDecoder(code, list_size, w_t, w_ml, i_ml_max, mode, eager, check)
    return dec.decode(channel_llrs)
