"""Frozen-set construction for the synthetic bit channels.

Two constructions are provided. The erasure-style recursion tracks a
Bhattacharyya-type upper bound per channel, starting from a chosen erasure
probability. The density-evolution construction tracks the mean of Gaussian
LLR densities for BPSK on AWGN at a chosen design Eb/N0, using the standard
piecewise curve fit for the check-side mean transfer.
"""

from __future__ import annotations

import numpy as np


def bhattacharyya_profile(n: int, z0: float = 0.5) -> np.ndarray:
    """Per-channel bound after n splitting levels, index order matches u.

    Lower is more reliable. The doubling step maps z to (2z - z^2, z^2),
    check branch first, so the final array is ordered by the natural input
    index (most significant path bit chosen first).
    """
    if not 0.0 < z0 < 1.0:
        raise ValueError("initial erasure probability must lie in (0, 1)")
    z = np.array([z0], dtype=np.float64)
    for _ in range(n):
        up = 2.0 * z - z * z
        lo = z * z
        z = np.stack([up, lo], axis=1).ravel()
    return z


def _check_mean(m: np.ndarray) -> np.ndarray:
    """Mean LLR out of the check-side combine, piecewise fit."""
    out = np.empty_like(m)
    a = m > 12.0
    b = (m > 3.5) & ~a
    c = (m > 1.0) & ~a & ~b
    d = ~(a | b | c)
    out[a] = 0.9861 * m[a] - 2.3152
    out[b] = m[b] * (0.009005 * m[b] + 0.7694) - 0.9507
    out[c] = m[c] * (0.062883 * m[c] + 0.3678) - 0.1627
    out[d] = m[d] * (0.2202 * m[d] + 0.06448)
    return out


def ga_profile(n: int, rate: float, design_ebn0_db: float) -> np.ndarray:
    """Per-channel mean LLR after n levels of density evolution.

    Higher is more reliable. The channel prior is the BPSK/AWGN LLR mean
    2/sigma^2 with sigma^2 = 1 / (2 * rate * 10^(EbN0/10)).
    """
    if not 0.0 < rate <= 1.0:
        raise ValueError("rate must lie in (0, 1]")
    sigma_sq = 1.0 / (2.0 * rate * 10.0 ** (design_ebn0_db / 10.0))
    m = np.array([2.0 / sigma_sq], dtype=np.float64)
    for _ in range(n):
        up = _check_mean(m)
        lo = 2.0 * m
        m = np.stack([up, lo], axis=1).ravel()
    return m


def reliability(n: int, method: str = "ga", design_param: float | None = None,
                rate: float = 0.5) -> np.ndarray:
    """Reliability score per input index, higher means keep as information."""
    if method == "ga":
        snr = 2.0 if design_param is None else float(design_param)
        return ga_profile(n, rate, snr)
    if method == "bhattacharyya":
        z0 = 0.5 if design_param is None else float(design_param)
        return -bhattacharyya_profile(n, z0)
    raise ValueError(f"unknown construction method {method!r}")


def frozen_mask(n: int, k: int, method: str = "ga",
                design_param: float | None = None) -> np.ndarray:
    """Boolean mask of length 2^n, True marks the N-k least reliable inputs.

    Ties freeze the lower index first (stable order), so the mask is a pure
    function of the arguments.
    """
    size = 1 << n
    if not 0 <= k <= size:
        raise ValueError(f"k={k} outside [0, {size}]")
    if k == 0:
        return np.ones(size, dtype=bool)
    rel = reliability(n, method, design_param, rate=k / size)
    order = np.argsort(rel, kind="stable")
    mask = np.zeros(size, dtype=bool)
    mask[order[: size - k]] = True
    return mask
