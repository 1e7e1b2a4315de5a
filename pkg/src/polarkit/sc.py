"""Successive cancellation decoding and its node-based shortcuts.

All kernels follow the min-sum convention: the check-side combine keeps the
smaller magnitude with the product sign, the variable-side combine adds or
subtracts according to the already-decided partial sum, and hard decisions
map nonnegative LLRs to 0.
"""

from __future__ import annotations

import numpy as np

from .code import PolarCode, constituent_codebook, polar_transform
from .tree import ARB, ML, RATE0, RATE1, CodeTree, TreeNode, build_tree, prune_and_label


def f_min_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Check-side combine: sign(a) sign(b) min(|a|, |b|), zero treated as +."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sgn = np.where((a < 0) != (b < 0), -1.0, 1.0)
    return sgn * np.minimum(np.abs(a), np.abs(b))


def g_update(a: np.ndarray, b: np.ndarray, bit: np.ndarray) -> np.ndarray:
    """Variable-side combine: b + (1 - 2 bit) a."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return b + (1.0 - 2.0 * np.asarray(bit)) * a


def hard_decision(llr: np.ndarray) -> np.ndarray:
    """0 for llr >= 0, else 1."""
    return (np.asarray(llr) < 0).astype(np.int8)


def combine(beta_left: np.ndarray, beta_right: np.ndarray) -> np.ndarray:
    """Parent partial sums: (left xor right, right) interleaved."""
    beta_left = np.asarray(beta_left, dtype=np.int8)
    beta_right = np.asarray(beta_right, dtype=np.int8)
    out = np.empty(beta_left.shape[:-1] + (2 * beta_left.shape[-1],), dtype=np.int8)
    out[..., 0::2] = beta_left ^ beta_right
    out[..., 1::2] = beta_right
    return out


def ml_node_decode(alpha: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    """Best constituent codeword(s) by correlation with the LLRs.

    Maximizes sum_i (1 - 2 x_i) alpha_i over the codebook; ties resolve to
    the lowest codeword index. alpha may be (w,) or batched (..., w).
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    scores = alpha @ (1.0 - 2.0 * np.asarray(codebook, dtype=np.float64)).T
    best = np.argmax(scores, axis=-1)
    return np.asarray(codebook, dtype=np.int8)[best]


def _sc_batch(frozen: np.ndarray, llrs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Plain SC over a batch of frames. Returns (u, x), each (B, N)."""

    def recurse(alpha: np.ndarray, lo: int, hi: int):
        if hi - lo == 1:
            if frozen[lo]:
                beta = np.zeros_like(alpha, dtype=np.int8)
            else:
                beta = hard_decision(alpha)
            return beta, beta.copy()
        a, b = alpha[:, 0::2], alpha[:, 1::2]
        mid = (lo + hi) // 2
        beta_l, u_l = recurse(f_min_sum(a, b), lo, mid)
        beta_r, u_r = recurse(g_update(a, b, beta_l), mid, hi)
        return combine(beta_l, beta_r), np.concatenate([u_l, u_r], axis=1)

    x, u = recurse(llrs, 0, frozen.size)
    return u, x


def sc_decode(code: PolarCode, channel_llrs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bit-by-bit successive cancellation. Returns (u estimate, codeword estimate)."""
    llrs = np.atleast_2d(np.asarray(channel_llrs, dtype=np.float64))
    u, x = _sc_batch(code.frozen, llrs)
    if np.ndim(channel_llrs) == 1:
        return u[0], x[0]
    return u, x


def _tree_batch(ctree: CodeTree, llrs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Tree-directed decode over a batch, with terminal shortcuts."""
    size = ctree.block_len
    batch = llrs.shape[0]
    u = np.empty((batch, size), dtype=np.int8)

    def recurse(node: TreeNode, alpha: np.ndarray) -> np.ndarray:
        if node.is_terminal():
            lo, hi = node.idx0, node.idx1 + 1
            if node.kind == RATE0:
                u[:, lo:hi] = 0
                return np.zeros((batch, node.width), dtype=np.int8)
            if node.kind == RATE1:
                beta = hard_decision(alpha)
                u[:, lo:hi] = polar_transform(beta)
                return beta
            inputs, words = constituent_codebook(node.frozen_local)
            scores = alpha @ (1.0 - 2.0 * words.astype(np.float64)).T
            best = np.argmax(scores, axis=-1)
            u[:, lo:hi] = inputs[best]
            return words[best].copy()
        a, b = alpha[:, 0::2], alpha[:, 1::2]
        beta_l = recurse(node.left, f_min_sum(a, b))
        beta_r = recurse(node.right, g_update(a, b, beta_l))
        return combine(beta_l, beta_r)

    x = recurse(ctree.root, llrs)
    return u, x


def _shortcut_decode(code: PolarCode, channel_llrs, ctree: CodeTree):
    llrs = np.atleast_2d(np.asarray(channel_llrs, dtype=np.float64))
    u, x = _tree_batch(ctree, llrs)
    if np.ndim(channel_llrs) == 1:
        return u[0], x[0]
    return u, x


def ssc_decode(code: PolarCode, channel_llrs: np.ndarray,
               ctree: CodeTree | None = None):
    """Simplified SC: rate-0 and rate-1 subtrees decoded in one shot.

    Bit-identical to sc_decode, only faster.
    """
    if ctree is None:
        ctree = prune_and_label(build_tree(code), w_t=0, w_ml=0)
    return _shortcut_decode(code, channel_llrs, ctree)


def ml_ssc_decode(code: PolarCode, channel_llrs: np.ndarray, w_ml: int = 16,
                  i_ml_max: int = 8, ctree: CodeTree | None = None):
    """SSC with small arbitrary subtrees decoded by codebook correlation."""
    if ctree is None:
        ctree = prune_and_label(build_tree(code), w_t=0, w_ml=w_ml, i_ml_max=i_ml_max)
    return _shortcut_decode(code, channel_llrs, ctree)
