"""Encoder and code-container tests against an explicit matrix oracle."""

from __future__ import annotations

import numpy as np
import pytest

from polarkit.code import (PolarCode, bit_reversal, constituent_codebook,
                           construct_code, encode, extract_info, load_code,
                           map_payload, polar_transform, save_code)
from polarkit.crc import CRC_PRESETS, check_crc


def generator_matrix(n: int) -> np.ndarray:
    """B F^{x n} built from explicit kronecker powers, GF(2)."""
    f = np.array([[1, 0], [1, 1]], dtype=np.int64)
    g = np.array([[1]], dtype=np.int64)
    for _ in range(n):
        g = np.kron(g, f)
    size = 1 << n
    b = np.zeros((size, size), dtype=np.int64)
    b[np.arange(size), bit_reversal(n)] = 1
    return (b @ g) % 2


def all_inputs(n: int) -> np.ndarray:
    size = 1 << n
    j = np.arange(1 << size, dtype=np.int64)[:, None]
    return ((j >> np.arange(size - 1, -1, -1)) & 1).astype(np.int8)


def test_bit_reversal_permutation():
    assert bit_reversal(3).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]
    for n in (1, 2, 4, 6):
        rev = bit_reversal(n)
        assert np.array_equal(rev[rev], np.arange(1 << n))


def test_transform_matches_matrix_exhaustive():
    for n in (1, 2, 3, 4):
        g = generator_matrix(n)
        u = all_inputs(n)
        assert np.array_equal(polar_transform(u), (u @ g) % 2)


def test_transform_matches_matrix_random_large():
    rng = np.random.default_rng(2)
    for n in (6, 10):
        g = generator_matrix(n)
        u = rng.integers(0, 2, (200, 1 << n), dtype=np.int8)
        assert np.array_equal(polar_transform(u), (u @ g) % 2)


def test_transform_known_vectors():
    assert np.array_equal(polar_transform([0] * 8), [0] * 8)
    e7 = np.eye(8, dtype=np.int8)[7]
    assert np.array_equal(polar_transform(e7), [1] * 8)
    e2 = np.array([0, 0, 1, 0], dtype=np.int8)
    g4 = generator_matrix(2)
    oracle = (e2 @ g4) % 2
    assert np.array_equal(oracle, [1, 1, 0, 0])
    assert np.array_equal(polar_transform(e2), oracle)


def test_transform_involutive_and_linear():
    rng = np.random.default_rng(4)
    u = rng.integers(0, 2, (64, 256), dtype=np.int8)
    assert np.array_equal(polar_transform(polar_transform(u)), u)
    a = rng.integers(0, 2, (1000, 128), dtype=np.int8)
    b = rng.integers(0, 2, (1000, 128), dtype=np.int8)
    assert np.array_equal(polar_transform(a ^ b),
                          polar_transform(a) ^ polar_transform(b))


def test_transform_bad_length():
    with pytest.raises(ValueError):
        polar_transform([0, 1, 0])


def test_code_properties():
    code = construct_code(4, 11, crc="crc8")
    assert code.block_len == 16 and code.k == 11
    assert code.payload_len == 3
    assert code.rate == 11 / 16
    assert np.array_equal(np.sort(np.concatenate(
        [code.info_idx, code.frozen_indices()])), np.arange(16))
    with pytest.raises(ValueError):
        code.frozen[0] = False  # mask is read-only
    with pytest.raises(ValueError):
        PolarCode(3, np.zeros(7, dtype=bool))
    with pytest.raises(ValueError):
        construct_code(4, 7, crc="crc8")  # CRC wider than the info set
    with pytest.raises(ValueError):
        construct_code(0, 1)


def test_encode_validates_frozen_positions():
    code = construct_code(3, 4)
    u = np.zeros(8, dtype=np.int8)
    u[code.frozen_indices()[0]] = 1
    with pytest.raises(ValueError):
        encode(code, u)
    encode(code, u, validate=False)
    with pytest.raises(ValueError):
        encode(code, np.zeros(4, dtype=np.int8))


def test_payload_round_trip():
    rng = np.random.default_rng(9)
    plain = construct_code(6, 20)
    with_crc = construct_code(6, 30, crc="crc16")
    for code in (plain, with_crc):
        payload = rng.integers(0, 2, code.payload_len, dtype=np.int8)
        u = map_payload(code, payload)
        assert not u[code.frozen].any()
        info = extract_info(code, u)
        assert np.array_equal(info[: code.payload_len], payload)
        if code.crc:
            assert check_crc(code.crc, info)
    with pytest.raises(ValueError):
        map_payload(plain, np.zeros(19, dtype=np.int8))


def test_constituent_codebook_width_two():
    inputs, words = constituent_codebook(np.array([False, False]))
    assert inputs.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert words.tolist() == [[0, 0], [1, 1], [1, 0], [0, 1]]


def test_constituent_codebook_patterns():
    _, words = constituent_codebook(np.array([True, True, True, True]))
    assert words.tolist() == [[0, 0, 0, 0]]
    inputs, words = constituent_codebook(np.array([True, True, True, False]))
    assert inputs.tolist() == [[0, 0, 0, 0], [0, 0, 0, 1]]
    assert words.tolist() == [[0, 0, 0, 0], [1, 1, 1, 1]]


def test_constituent_codebook_cached_and_frozen():
    pattern = np.array([True, False, True, False])
    first = constituent_codebook(pattern)
    second = constituent_codebook(pattern.copy())
    assert first[0] is second[0] and first[1] is second[1]
    with pytest.raises(ValueError):
        first[1][0, 0] = 1


def test_constituent_codebook_matches_encoder():
    rng = np.random.default_rng(12)
    pattern = rng.integers(0, 2, 8).astype(bool)
    inputs, words = constituent_codebook(pattern)
    assert np.array_equal(words, polar_transform(inputs))
    assert not inputs[:, pattern].any()


def test_save_load_round_trip(tmp_path):
    code = construct_code(5, 17, method="bhattacharyya", design_param=0.4)
    path = tmp_path / "code.txt"
    save_code(code, path)
    text = path.read_text().split()
    assert text[0] == "32" and text[1] == "17"
    loaded = load_code(path, crc="crc8")
    assert np.array_equal(loaded.frozen, code.frozen)
    assert loaded.crc is CRC_PRESETS["crc8"]


def test_load_rejects_malformed(tmp_path):
    def write(text):
        p = tmp_path / "bad.txt"
        p.write_text(text)
        return p

    with pytest.raises(ValueError):
        load_code(write("8"))
    with pytest.raises(ValueError):
        load_code(write("6 2\n0\n1\n2\n3\n"))
    with pytest.raises(ValueError):
        load_code(write("8 4\n0\n1\n2\n"))
    with pytest.raises(ValueError):
        load_code(write("8 4\n0\n2\n1\n3\n"))
    with pytest.raises(ValueError):
        load_code(write("8 4\n0\n1\n2\n8\n"))
