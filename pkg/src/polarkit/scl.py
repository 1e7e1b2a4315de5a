"""List decoding: shared state machinery and the bit-by-bit baseline.

Path state follows the memory discipline of the hardware-oriented
formulation: one LLR bank per layer holding one row per path, a reference
array that lets freshly cloned paths keep reading their ancestor's rows
until they overwrite a layer themselves, and per-path partial-sum banks
that are copied eagerly at every clone. The channel row (layer 0) is shared
by all paths and never written.

The path metric is cumulative mismatch: deciding against the sign of the
local LLR costs its magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import PolarCode, extract_info
from .crc import check_crc


@dataclass
class DecodeResult:
    """Best-path outcome of a list decode."""

    u: np.ndarray
    x: np.ndarray
    payload: np.ndarray
    crc_ok: bool | None
    metric: float
    metrics: np.ndarray
    n_activations: int | None = None


def bit_metric_update(metric, llr, decision):
    """Penalize a decision that disagrees with the hard decision by |llr|."""
    llr = np.asarray(llr, dtype=np.float64)
    mismatch = (llr < 0) != (np.asarray(decision) == 1)
    return metric + np.where(mismatch, np.abs(llr), 0.0)


def expand_and_prune(pm: np.ndarray, branch0: np.ndarray, branch1: np.ndarray,
                     list_size: int, n_finite: int | None = None
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two-way path expansion with global pruning.

    Candidate metrics are pm + branch per decision bit, laid out path-major
    (path 0 bit 0, path 0 bit 1, path 1 bit 0, ...). Keeps the list_size
    smallest finite candidates; ties prefer the lower path index, then
    decision 0. Returns (source paths, decision bits, metrics), ascending.
    Callers that track the live path count can pass n_finite to skip the
    scan for it.
    """
    cand = np.empty(2 * pm.shape[0])
    cand[0::2] = pm + branch0
    cand[1::2] = pm + branch1
    if n_finite is None:
        n_finite = int(np.isfinite(cand).sum())
    keep = min(list_size, n_finite)
    pick = np.argsort(cand, kind="stable")[:keep]
    return pick >> 1, (pick & 1).astype(np.int8), cand[pick]


def assign_slots(srcs, tags, metrics, list_size: int):
    """Place survivors on list slots.

    In (source, tag) order, the first survivor of each source keeps that
    slot; the rest fill the remaining slots in ascending order. Returns
    per-slot lists (source, tag, metric, active); unclaimed slots carry
    (own index, 0, inf, False).
    """
    src_l = np.asarray(srcs).tolist()
    tag_l = np.asarray(tags).tolist()
    met_l = np.asarray(metrics).tolist()
    slot_src = list(range(list_size))
    slot_tag = [0] * list_size
    slot_pm = [float("inf")] * list_size
    slot_act = [False] * list_size

    order = sorted(range(len(src_l)), key=lambda s: (src_l[s], tag_l[s]))
    claimed = 0
    pending: list[int] = []
    for s in order:
        src = src_l[s]
        if claimed >> src & 1:
            pending.append(s)
        else:
            claimed |= 1 << src
            slot_tag[src] = tag_l[s]
            slot_pm[src] = met_l[s]
            slot_act[src] = True
    if pending:
        free = (l for l in range(list_size) if not claimed >> l & 1)
        for s, slot in zip(pending, free):
            slot_src[slot] = src_l[s]
            slot_tag[slot] = tag_l[s]
            slot_pm[slot] = met_l[s]
            slot_act[slot] = True
    return slot_src, slot_tag, slot_pm, slot_act


class ListState:
    """LLR banks, partial sums, references, and metrics for L paths."""

    def __init__(self, n: int, list_size: int, channel_llrs: np.ndarray,
                 eager: bool = False):
        self.n = n
        self.L = list_size
        size = 1 << n
        llrs = np.asarray(channel_llrs, dtype=np.float64).reshape(1, size)
        self.p: list[np.ndarray] = [llrs]
        for t in range(1, n + 1):
            self.p.append(np.zeros((list_size, size >> t)))
        # partial-sum banks for all layers live in one block so clones are
        # a single gather; c_views[t] has one (width, 2) pair per path
        self.c = np.zeros((list_size, 2 * size - 1, 2), dtype=np.int8)
        self.c_views = []
        offset = 0
        for t in range(n + 1):
            width = size >> t
            self.c_views.append(self.c[:, offset : offset + width, :])
            offset += width
        self.r = np.zeros((list_size, n + 1), dtype=np.int64)
        self.pm = np.full(list_size, np.inf)
        self.pm[0] = 0.0
        self.active = np.zeros(list_size, dtype=bool)
        self.active[0] = True
        self.u = np.zeros((list_size, size), dtype=np.int8)
        self.eager = eager
        self._own = np.arange(list_size)
        self._identity = list(range(list_size))
        self._pbuf = [np.empty((list_size, size >> t), dtype=np.int8)
                      for t in range(n + 1)]

    def llr_comp(self, i_s: int, top: int) -> None:
        """Materialize layers max(i_s, 1)..top for every path.

        The layer equal to i_s combines with the stored left-sibling partial
        sums; deeper layers run the check-side combine. Every written layer
        becomes self-owned in the reference array.
        """
        start = max(i_s, 1)
        if start > top:
            return
        p = self.p
        if start == 1:
            # the channel row is shared by every path
            prev = np.broadcast_to(p[0][0], (self.L, p[0].shape[1]))
        else:
            refs = self.r[:, start - 1]
            prev = p[start - 1] if (refs == self._own).all() else p[start - 1][refs]
        for t in range(start, top + 1):
            a = prev[:, 0::2]
            b = prev[:, 1::2]
            dst = p[t]
            if t == i_s:
                bits = self.c_views[t][:, :, 0]
                np.multiply(a, 1.0 - 2.0 * bits, out=dst)
                dst += b
            else:
                np.minimum(np.abs(a), np.abs(b), out=dst)
                np.negative(dst, out=dst, where=(a < 0) != (b < 0))
            # freshly written layers feed the next one directly; the
            # reference rows below record the same fact for later nodes
            prev = dst
        self.r[:, start : top + 1] = self._own[:, None]

    def node_llr(self, t: int) -> np.ndarray:
        """Per-path LLR rows for the node currently materialized at layer t."""
        return self.p[t][self.r[:, t]]

    def psum_store(self, t_v: int, idx1: int, beta: np.ndarray) -> int:
        """Store a node's partial sums and ascend while it is a right child.

        Returns the layer where the ascent stopped.
        """
        t = t_v
        cur = np.asarray(beta, dtype=np.int8)
        while True:
            view = self.c_views[t]
            right = t > 0 and (idx1 >> (self.n - t)) & 1
            view[:, :, 1 if right else 0] = cur
            if not right:
                return t
            parent = self._pbuf[t - 1]
            np.bitwise_xor(view[:, :, 0], view[:, :, 1], out=parent[:, 0::2])
            parent[:, 1::2] = view[:, :, 1]
            cur = parent
            t -= 1

    def lazy_copy(self, l: int, l_prime: int, i_s: int) -> None:
        """Duplicate path l onto slot l_prime ahead of a node starting at i_s.

        Partial sums, decisions, and references copy over; references from
        layer i_s up point at the new slot, so the clone writes its own rows
        from there while still reading the shared history below.
        """
        self.c[l_prime] = self.c[l]
        self.u[l_prime] = self.u[l]
        self.r[l_prime] = self.r[l]
        self.r[l_prime, max(i_s, 1) :] = l_prime
        self.pm[l_prime] = self.pm[l]
        self.active[l_prime] = True
        if self.eager:
            for t in range(1, self.n + 1):
                self.p[t][l_prime] = self.p[t][self.r[l_prime, t]]
                self.r[l_prime, t] = l_prime

    def clone_and_prune(self, slot_src, slot_pm, slot_act,
                        next_i_s: int) -> None:
        """Reassign all slots after pruning; slot d continues slot_src[d].

        next_i_s is the start layer of the next scheduled node: references
        below it stay inherited, references from it up become self-owned.
        """
        if list(slot_src) != self._identity:
            self.c[...] = self.c[slot_src]
            self.u[...] = self.u[slot_src]
            self.r[...] = self.r[slot_src]
        tail = max(next_i_s, 1)
        if tail <= self.n:
            self.r[:, tail:] = self._own[:, None]
        self.pm[...] = slot_pm
        self.active[...] = slot_act
        if self.eager:
            for t in range(1, self.n + 1):
                self.p[t][...] = self.p[t][self.r[:, t]]
                self.r[:, t] = self._own


def _finalize(state: ListState, code: PolarCode,
              n_activations: int | None = None) -> DecodeResult:
    """Pick the reported path: lowest metric passing CRC, else lowest metric."""
    order = np.argsort(state.pm, kind="stable")
    crc_ok: bool | None = None
    best = int(order[0])
    if code.crc is not None:
        crc_ok = False
        for l in order:
            l = int(l)
            if not state.active[l]:
                break
            if check_crc(code.crc, extract_info(code, state.u[l])):
                best = l
                crc_ok = True
                break
    info = extract_info(code, state.u[best])
    payload = info[: code.payload_len] if code.crc else info
    return DecodeResult(
        u=state.u[best].copy(),
        x=state.c_views[0][best, :, 0].copy(),
        payload=payload.copy(),
        crc_ok=crc_ok,
        metric=float(state.pm[best]),
        metrics=np.sort(state.pm[state.active]),
        n_activations=n_activations,
    )


class CaSclDecoder:
    """Bit-by-bit list decoder with CRC-aided selection.

    Every input bit is a scheduling target: frozen bits keep all paths and
    accrue the mismatch penalty of forcing a zero, information bits fork
    every path both ways and keep the best list_size continuations.
    """

    def __init__(self, code: PolarCode, list_size: int = 4, eager: bool = False):
        self.code = code
        self.L = list_size
        self.eager = eager
        n = code.n
        size = code.block_len
        starts = np.empty(size, dtype=np.int64)
        starts[0] = 0
        for i in range(1, size):
            starts[i] = n - ((i & -i).bit_length() - 1)
        self._starts = starts
        self._next_start = np.append(starts[1:], n + 1)

    def decode(self, channel_llrs: np.ndarray) -> DecodeResult:
        code = self.code
        n, size, L = code.n, code.block_len, self.L
        st = ListState(n, L, channel_llrs, eager=self.eager)
        frozen = code.frozen
        starts = self._starts
        next_start = self._next_start
        zeros = np.zeros((L, 1), dtype=np.int8)
        n_act = 1
        for i in range(size):
            st.llr_comp(starts[i], n)
            alpha = st.p[n][:, 0]
            if frozen[i]:
                np.add(st.pm, np.maximum(-alpha, 0.0), out=st.pm)
                st.psum_store(n, i, zeros)
            else:
                srcs, bits, metrics = expand_and_prune(
                    st.pm, np.maximum(-alpha, 0.0), np.maximum(alpha, 0.0), L,
                    n_finite=2 * n_act)
                n_act = len(srcs)
                slot_src, slot_tag, slot_pm, slot_act = assign_slots(
                    srcs, bits, metrics, L)
                st.clone_and_prune(slot_src, slot_pm, slot_act, next_start[i])
                decisions = np.asarray(slot_tag, dtype=np.int8)
                st.u[:, i] = decisions
                st.psum_store(n, i, decisions[:, None])
        return _finalize(st, code)


def ca_scl_decode(code: PolarCode, channel_llrs: np.ndarray, list_size: int = 4,
                  eager: bool = False) -> DecodeResult:
    """One-shot interface over CaSclDecoder."""
    return CaSclDecoder(code, list_size, eager=eager).decode(channel_llrs)
