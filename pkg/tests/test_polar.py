"""Polar construction, encoding, and the dense reference PCM."""

import json

import numpy as np
import pytest

from polarbec.gf2 import DenseBitMatrix
from polarbec.polar import (
    CodeSpecError,
    PolarCodeSpec,
    bec_channel_reliabilities,
    code_spec_from_json,
    code_spec_to_json,
    construct_info_set,
    encode,
    encode_wires,
    generator_matrix,
    polar_transform,
    standard_dense_pcm,
)


def test_reliabilities_one_stage():
    assert np.allclose(bec_channel_reliabilities(1, 0.5), [0.75, 0.25])


def test_reliabilities_two_stages():
    # two applications of z -> (2z - z^2, z^2)
    assert np.allclose(bec_channel_reliabilities(2, 0.5),
                       [0.9375, 0.5625, 0.4375, 0.0625])


def test_reliabilities_mean_is_conserved():
    for n in range(1, 8):
        for eps in (0.1, 0.37, 0.5, 0.9):
            z = bec_channel_reliabilities(n, eps)
            assert np.isclose(z.mean(), eps)
            assert (z >= 0).all() and (z <= 1).all()


def test_info_set_picks_most_reliable():
    assert construct_info_set(4, 2, 0.5).info_set == (2, 3)


def test_info_set_full_rate():
    assert construct_info_set(2, 2, 0.5).info_set == (0, 1)


def test_info_set_rate_zero():
    spec = construct_info_set(8, 0, 0.5)
    assert spec.info_set == ()
    assert np.array_equal(encode(spec, np.zeros(0, dtype=np.uint8)),
                          np.zeros(8, dtype=np.uint8))


def test_info_set_bad_K():
    with pytest.raises(CodeSpecError):
        construct_info_set(8, 9, 0.5)


def test_encode_n1_rows_of_F():
    spec = construct_info_set(2, 2, 0.5)
    assert list(encode(spec, [1, 0])) == [1, 0]
    assert list(encode(spec, [0, 1])) == [1, 1]


def test_encode_n2_last_row():
    spec = construct_info_set(4, 4, 0.5)
    assert list(encode(spec, [0, 0, 0, 1])) == [1, 1, 1, 1]


def test_encode_n2_row_sum():
    spec = construct_info_set(4, 4, 0.5)
    assert list(encode(spec, [0, 0, 1, 1])) == [0, 0, 1, 1]


def test_generator_n1():
    assert np.array_equal(generator_matrix(2).to_array(), [[1, 0], [1, 1]])


def test_generator_n2_rows():
    expect = [[1, 0, 0, 0], [1, 0, 1, 0], [1, 1, 0, 0], [1, 1, 1, 1]]
    assert np.array_equal(generator_matrix(4).to_array(), expect)


@pytest.mark.parametrize("n", range(1, 7))
def test_generator_is_involution(n):
    g = generator_matrix(1 << n)
    assert g.matmul(g) == DenseBitMatrix.identity(1 << n)


@pytest.mark.parametrize("N", [2, 4, 8])
def test_butterfly_matches_generator_exhaustively(N):
    g = generator_matrix(N).to_array()
    for word in range(1 << N):
        u = np.array([(word >> i) & 1 for i in range(N)], dtype=np.uint8)
        assert np.array_equal(polar_transform(u), (u @ g) % 2)


@pytest.mark.parametrize("N", [16, 32, 64])
def test_butterfly_matches_generator_randomized(N):
    g = generator_matrix(N).to_array()
    rng = np.random.default_rng(N)
    u = rng.integers(0, 2, size=(50, N), dtype=np.uint8)
    assert np.array_equal(polar_transform(u), (u @ g) % 2)


def test_all_codewords_distinct():
    spec = construct_info_set(16, 8, 0.5)
    payloads = np.array([[(w >> i) & 1 for i in range(8)]
                         for w in range(256)], dtype=np.uint8)
    words = {encode(spec, p).tobytes() for p in payloads}
    assert len(words) == 256


def test_encode_wires_consistent_with_codeword():
    spec = construct_info_set(16, 8, 0.5)
    rng = np.random.default_rng(0)
    payload = rng.integers(0, 2, size=8, dtype=np.uint8)
    wires = encode_wires(spec, payload)
    assert len(wires) == spec.n + 1
    assert np.array_equal(wires[0], spec.full_input(payload))


def test_standard_pcm_two_bit_code():
    spec = PolarCodeSpec(2, (1,), 0.5)
    assert np.array_equal(standard_dense_pcm(spec).to_array(), [[1, 1]])


def test_standard_pcm_annihilates_codewords():
    spec = construct_info_set(8, 4, 0.5)
    h = standard_dense_pcm(spec)
    for w in range(16):
        payload = np.array([(w >> i) & 1 for i in range(4)], dtype=np.uint8)
        assert not h.mat_vec(encode(spec, payload)).any()


@pytest.mark.parametrize("N,K", [(4, 2), (8, 4), (16, 9)])
def test_standard_pcm_rank(N, K):
    spec = construct_info_set(N, K, 0.5)
    assert standard_dense_pcm(spec).rank() == N - K


def test_code_spec_json_roundtrip():
    spec = construct_info_set(16, 10, 0.4)
    text = code_spec_to_json(spec, crc_degree=6, crc_poly=0x03)
    again, degree, poly = code_spec_from_json(text)
    assert again == spec
    assert degree == 6 and poly == 0x03
    obj = json.loads(text)
    assert obj["info_set"] == list(spec.info_set)


def test_code_spec_json_rejects_bad_K():
    spec = construct_info_set(8, 4, 0.5)
    obj = json.loads(code_spec_to_json(spec))
    obj["K"] = 5
    with pytest.raises(CodeSpecError):
        code_spec_from_json(json.dumps(obj))
