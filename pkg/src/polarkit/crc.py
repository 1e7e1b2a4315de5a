"""Parameterized CRC over bit arrays.

The codec appends the checksum as ``width`` bits, most significant bit first,
directly after the payload bits. Reflected configurations consume the bit
stream low-bit-first per byte, matching the usual byte-wise conventions when
the payload happens to be byte aligned.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_ALLOWED_WIDTHS = (8, 16, 24, 32)


@dataclass(frozen=True)
class CrcConfig:
    """Generator polynomial and register conventions for one CRC variant."""

    name: str
    width: int
    poly: int
    init: int
    reflect: bool
    xor_out: int

    def __post_init__(self):
        if self.width not in _ALLOWED_WIDTHS:
            raise ValueError(f"unsupported CRC width {self.width}")
        if not (0 < self.poly < (1 << self.width)):
            raise ValueError("polynomial must fit the register width and be nonzero")
        mask = (1 << self.width) - 1
        if self.init & ~mask or self.xor_out & ~mask:
            raise ValueError("init/xor_out wider than the register")


CRC_PRESETS: dict[str, CrcConfig] = {
    "crc8": CrcConfig("crc8", 8, 0x07, 0x00, False, 0x00),
    "crc16": CrcConfig("crc16", 16, 0x1021, 0xFFFF, False, 0x0000),
    "crc32": CrcConfig("crc32", 32, 0x04C11DB7, 0xFFFFFFFF, True, 0xFFFFFFFF),
}


def get_crc(name_or_config) -> CrcConfig | None:
    if name_or_config is None or isinstance(name_or_config, CrcConfig):
        return name_or_config
    key = str(name_or_config).lower()
    if key in ("none", ""):
        return None
    if key not in CRC_PRESETS:
        raise KeyError(f"unknown CRC preset {name_or_config!r}")
    return CRC_PRESETS[key]


def _reverse_bits(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


@lru_cache(maxsize=None)
def _byte_table(width: int, poly: int, reflect: bool) -> np.ndarray:
    """256-entry step table for one register configuration."""
    table = np.zeros(256, dtype=np.uint64)
    if reflect:
        rpoly = _reverse_bits(poly, width)
        for byte in range(256):
            reg = byte
            for _ in range(8):
                reg = (reg >> 1) ^ rpoly if reg & 1 else reg >> 1
            table[byte] = reg
    else:
        top = 1 << (width - 1)
        mask = (1 << width) - 1
        for byte in range(256):
            reg = byte << (width - 8)
            for _ in range(8):
                reg = ((reg << 1) ^ poly) & mask if reg & top else (reg << 1) & mask
            table[byte] = reg
    return table


def crc_bits(config: CrcConfig, bits: np.ndarray) -> int:
    """Checksum of a 0/1 bit array, fed in stream order."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    reg = config.init
    mask = (1 << config.width) - 1
    table = _byte_table(config.width, config.poly, config.reflect)

    n_whole = bits.size & ~7
    if n_whole:
        order = "little" if config.reflect else "big"
        packed = np.packbits(bits[:n_whole], bitorder=order)
        if config.reflect:
            for byte in packed:
                reg = int(table[(reg ^ int(byte)) & 0xFF]) ^ (reg >> 8)
        else:
            shift = config.width - 8
            for byte in packed:
                reg = int(table[((reg >> shift) ^ int(byte)) & 0xFF]) ^ ((reg << 8) & mask)

    # tail shorter than a byte runs bit-serial
    if config.reflect:
        rpoly = _reverse_bits(config.poly, config.width)
        for b in bits[n_whole:]:
            reg ^= int(b)
            reg = (reg >> 1) ^ rpoly if reg & 1 else reg >> 1
    else:
        top = 1 << (config.width - 1)
        for b in bits[n_whole:]:
            reg ^= int(b) << (config.width - 1)
            reg = ((reg << 1) ^ config.poly) & mask if reg & top else (reg << 1) & mask

    return reg ^ config.xor_out


def crc_bytes(config: CrcConfig, data: bytes) -> int:
    """Checksum of a byte string under the usual byte-feeding order."""
    order = "little" if config.reflect else "big"
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder=order)
    return crc_bits(config, bits)


def checksum_to_bits(config: CrcConfig, value: int) -> np.ndarray:
    out = np.zeros(config.width, dtype=np.int8)
    for i in range(config.width):
        out[i] = (value >> (config.width - 1 - i)) & 1
    return out


def attach_crc(config: CrcConfig, payload: np.ndarray) -> np.ndarray:
    """payload bits -> payload bits followed by the checksum bits."""
    payload = np.asarray(payload, dtype=np.int8).ravel()
    value = crc_bits(config, payload)
    return np.concatenate([payload, checksum_to_bits(config, value)])


def check_crc(config: CrcConfig, bits: np.ndarray) -> bool:
    """True when the trailing ``width`` bits match the payload checksum."""
    bits = np.asarray(bits, dtype=np.int8).ravel()
    if bits.size < config.width:
        return False
    payload, tail = bits[: -config.width], bits[-config.width :]
    return crc_bits(config, payload) == int(
        np.dot(tail.astype(np.int64), 1 << np.arange(config.width - 1, -1, -1, dtype=np.int64))
    )
