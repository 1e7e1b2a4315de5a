"""Code container, encoder, and payload mapping.

The encoder realizes x = u B F^{x n} over GF(2), where B is the bit-reversal
permutation and F = [[1, 0], [1, 1]]. With that convention the recursive
structure pairs adjacent positions at every level: a parent codeword
interleaves (left xor right, right) at even/odd indices, and the transform is
its own inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .construction import frozen_mask
from .crc import CrcConfig, attach_crc, get_crc


@lru_cache(maxsize=None)
def bit_reversal(n: int) -> np.ndarray:
    """Index permutation reversing n address bits."""
    idx = np.arange(1 << n)
    rev = np.zeros_like(idx)
    for _ in range(n):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    rev.setflags(write=False)
    return rev


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """Apply B F^{x n} along the last axis. Involutive."""
    bits = np.asarray(bits, dtype=np.int8)
    size = bits.shape[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"length {size} is not a power of two")
    out = bits[..., bit_reversal(n)].copy()
    half = 1
    while half < size:
        view = out.reshape(*out.shape[:-1], size // (2 * half), 2, half)
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return out


@dataclass(frozen=True, eq=False)
class PolarCode:
    """Immutable code description: length, frozen mask, optional CRC."""

    n: int
    frozen: np.ndarray
    crc: CrcConfig | None = None
    method: str = "ga"
    design_param: float | None = None
    info_idx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mask = np.asarray(self.frozen, dtype=bool)
        if mask.shape != (1 << self.n,):
            raise ValueError("frozen mask length must be 2^n")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "frozen", mask)
        info = np.flatnonzero(~mask)
        info.setflags(write=False)
        object.__setattr__(self, "info_idx", info)
        if self.crc is not None and self.payload_len < 0:
            raise ValueError("CRC wider than the information set")

    @property
    def block_len(self) -> int:
        return 1 << self.n

    @property
    def k(self) -> int:
        return int(self.info_idx.size)

    @property
    def payload_len(self) -> int:
        return self.k - (self.crc.width if self.crc else 0)

    @property
    def rate(self) -> float:
        return self.k / self.block_len

    def frozen_indices(self) -> np.ndarray:
        return np.flatnonzero(self.frozen)


def construct_code(n: int, k: int, method: str = "ga",
                   design_param: float | None = None,
                   crc: CrcConfig | str | None = None) -> PolarCode:
    """Build a code by freezing the least reliable inputs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    cfg = get_crc(crc)
    return PolarCode(n, frozen_mask(n, k, method, design_param), cfg,
                     method, design_param)


def encode(code: PolarCode, u: np.ndarray, validate: bool = True) -> np.ndarray:
    """Codeword(s) for full input vector(s) u of shape (..., N)."""
    u = np.asarray(u, dtype=np.int8)
    if u.shape[-1] != code.block_len:
        raise ValueError("input length does not match the code")
    if validate and np.any(u[..., code.frozen]):
        raise ValueError("frozen positions must carry zeros")
    return polar_transform(u)


def map_payload(code: PolarCode, payload: np.ndarray) -> np.ndarray:
    """Place payload (plus CRC when configured) on the information set."""
    payload = np.asarray(payload, dtype=np.int8).ravel()
    if payload.size != code.payload_len:
        raise ValueError(f"expected {code.payload_len} payload bits, got {payload.size}")
    data = attach_crc(code.crc, payload) if code.crc else payload
    u = np.zeros(code.block_len, dtype=np.int8)
    u[code.info_idx] = data
    return u


def extract_info(code: PolarCode, u: np.ndarray) -> np.ndarray:
    """Information bits (payload plus CRC) from a full input vector."""
    return np.asarray(u, dtype=np.int8)[..., code.info_idx]


_codebook_cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}


def constituent_codebook(frozen_local: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All codewords of the subcode defined by a local frozen pattern.

    Returns (inputs, codewords), each of shape (2^d, w) with d free positions.
    Candidate j sets the free positions to the bits of j, most significant
    first in ascending position order, so j = 0 is the all-zero word.
    """
    frozen_local = np.asarray(frozen_local, dtype=bool)
    key = frozen_local.tobytes()
    hit = _codebook_cache.get(key)
    if hit is not None:
        return hit
    w = frozen_local.size
    free = np.flatnonzero(~frozen_local)
    d = free.size
    count = 1 << d
    inputs = np.zeros((count, w), dtype=np.int8)
    if d:
        j = np.arange(count, dtype=np.int64)[:, None]
        inputs[:, free] = ((j >> np.arange(d - 1, -1, -1)) & 1).astype(np.int8)
    words = polar_transform(inputs)
    inputs.setflags(write=False)
    words.setflags(write=False)
    _codebook_cache[key] = (inputs, words)
    return inputs, words


def save_code(code: PolarCode, path) -> None:
    """Write the frozen set: one header line "N K", then the frozen indices
    in ascending order, one per line."""
    idx = code.frozen_indices()
    with open(path, "w") as fh:
        fh.write(f"{code.block_len} {code.k}\n")
        for i in idx:
            fh.write(f"{int(i)}\n")


def load_code(path, crc: CrcConfig | str | None = None) -> PolarCode:
    """Read a frozen-set file written by save_code."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError("truncated code file")
    size, k = int(tokens[0]), int(tokens[1])
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"block length {size} is not a power of two")
    idx = np.array([int(t) for t in tokens[2:]], dtype=np.int64)
    if idx.size != size - k:
        raise ValueError(f"expected {size - k} frozen indices, found {idx.size}")
    if idx.size and (idx.min() < 0 or idx.max() >= size or np.any(np.diff(idx) <= 0)):
        raise ValueError("frozen indices must be ascending and inside [0, N)")
    mask = np.zeros(size, dtype=bool)
    mask[idx] = True
    return PolarCode(n, mask, get_crc(crc))
