"""CRC parity construction, codeword-domain mapping, greedy thinning."""

import numpy as np
import pytest

from polarbec.crc import (
    CrcSpec,
    attach_crc,
    augment,
    codeword_domain_constraints,
    crc_parity_matrix,
    greedy_density_reduction,
    prune_with_crc,
)
from polarbec.factor_graph import (
    PrunedPcm,
    nullspace_cvn_projection,
    prune_code,
)
from polarbec.gf2 import DenseBitMatrix, bits_to_int, rank_of_bitrows
from polarbec.polar import construct_info_set, encode


def _poly_divide(bits, degree, poly):
    """Independent CRC oracle: schoolbook long division on a bit list."""
    work = list(int(b) for b in bits) + [0] * degree
    g = [1] + [(poly >> (degree - 1 - i)) & 1 for i in range(degree)]
    for i in range(len(bits)):
        if work[i]:
            for j, gbit in enumerate(g):
                work[i + j] ^= gbit
    return work[-degree:]


@pytest.mark.parametrize("degree,poly", [(6, 0b000011), (3, 0b011), (8, 0x07)])
def test_remainder_matches_long_division(degree, poly):
    crc = CrcSpec(degree, poly)
    rng = np.random.default_rng(degree)
    for _ in range(50):
        payload = rng.integers(0, 2, size=int(rng.integers(1, 40)),
                               dtype=np.uint8)
        assert list(crc.remainder(payload)) == _poly_divide(payload, degree,
                                                            poly)


def test_remainder_is_linear():
    crc = CrcSpec(6, 0b000011)
    rng = np.random.default_rng(0)
    a = rng.integers(0, 2, size=20, dtype=np.uint8)
    b = rng.integers(0, 2, size=20, dtype=np.uint8)
    assert np.array_equal(crc.remainder(a ^ b),
                          crc.remainder(a) ^ crc.remainder(b))


def test_parity_matrix_rank_and_support():
    spec = construct_info_set(64, 38, 0.5)
    crc = CrcSpec(6, 0b000011)
    h = crc_parity_matrix(spec, crc)
    assert h.rows == 6
    assert h.rank() == 6
    info = set(spec.info_set)
    arr = h.to_array()
    for j in range(64):
        if j not in info:
            assert not arr[:, j].any()


def test_parity_matrix_zero_payload():
    spec = construct_info_set(16, 8, 0.5)
    crc = CrcSpec(2, 0b11)
    h = crc_parity_matrix(spec, crc)
    assert not h.mat_vec(np.zeros(16, dtype=np.uint8)).any()


def test_parity_matrix_accepts_valid_rejects_flipped():
    spec = construct_info_set(32, 16, 0.5)
    crc = CrcSpec(6, 0b000011)
    h = crc_parity_matrix(spec, crc)
    rng = np.random.default_rng(5)
    for _ in range(30):
        payload = rng.integers(0, 2, size=10, dtype=np.uint8)
        info = crc.append(payload)
        u = spec.full_input(info)
        assert not h.mat_vec(u).any()
        flip = int(rng.integers(0, 16))
        u_bad = u.copy()
        u_bad[spec.info_set[flip]] ^= 1
        assert h.mat_vec(u_bad).any()


def test_codeword_domain_consistency():
    spec = construct_info_set(16, 8, 0.5)
    crc = CrcSpec(2, 0b11)
    hc = codeword_domain_constraints(spec, crc)
    h = crc_parity_matrix(spec, crc)
    rng = np.random.default_rng(9)
    for _ in range(100):
        payload = rng.integers(0, 2, size=8, dtype=np.uint8)
        u = spec.full_input(payload)
        c = encode(spec, payload)
        assert np.array_equal(hc.mat_vec(c), h.mat_vec(u))
    assert hc.rank() == 2


def test_codeword_domain_matches_dense_multiply():
    from polarbec.polar import generator_matrix

    spec = construct_info_set(8, 4, 0.5)
    crc = CrcSpec(2, 0b11)
    expect = (crc_parity_matrix(spec, crc).to_array()
              @ generator_matrix(spec).to_array().T) % 2
    assert np.array_equal(codeword_domain_constraints(spec, crc).to_array(),
                          expect)


def test_greedy_reduction_replaces_heavier_row():
    rows = DenseBitMatrix.from_array([[1, 1, 1, 0], [1, 1, 0, 0]])
    out = greedy_density_reduction(rows)
    got = {tuple(r) for r in out.to_array()}
    assert got == {(0, 0, 1, 0), (1, 1, 0, 0)}


def test_greedy_reduction_fixpoint():
    rows = DenseBitMatrix.from_array([[1, 0], [0, 1]])
    out = greedy_density_reduction(rows)
    assert np.array_equal(out.to_array(), [[1, 0], [0, 1]])


def test_greedy_reduction_preserves_row_space():
    rng = np.random.default_rng(21)
    for _ in range(100):
        a = rng.integers(0, 2, size=(6, 32), dtype=np.uint8)
        m = DenseBitMatrix.from_array(a)
        out = greedy_density_reduction(m)
        stacked = out.stack(m)
        assert stacked.rank() == m.rank()
        total = sum(out.row_weight(i) for i in range(out.rows))
        assert total <= sum(m.row_weight(i) for i in range(m.rows))


def test_augment_with_no_rows_is_identity():
    spec = construct_info_set(16, 8, 0.5)
    pruned = prune_code(spec)
    aug = augment(pruned, DenseBitMatrix(0, 16))
    assert aug.combined == pruned.matrix


def test_augment_row_count_and_rank():
    spec = construct_info_set(16, 8, 0.5)
    pruned = prune_code(spec)
    aug = attach_crc(pruned, spec, CrcSpec(2, 0b11))
    assert aug.combined.rows == pruned.matrix.rows + 2
    assert aug.combined.rank() == aug.combined.rows


def test_augmented_nullspace_is_crc_subcode():
    spec = construct_info_set(16, 8, 0.5)
    crc = CrcSpec(2, 0b11)
    aug = attach_crc(prune_code(spec), spec, crc)
    as_pruned = PrunedPcm(matrix=aug.combined, cvn_cols=aug.cvn_cols,
                          N=16, K=8)
    proj = nullspace_cvn_projection(as_pruned)
    # basis of the CRC-valid subcode from payload unit vectors
    basis = []
    for i in range(6):
        payload = np.zeros(6, dtype=np.uint8)
        payload[i] = 1
        basis.append(bits_to_int(encode(spec, crc.append(payload))))
    assert rank_of_bitrows(proj, 16) == 6
    assert rank_of_bitrows(basis, 16) == 6
    assert rank_of_bitrows(proj + basis, 16) == 6
    # exhaustive: every CRC-valid codeword satisfies the combined matrix
    for w in range(64):
        payload = np.array([(w >> i) & 1 for i in range(6)], dtype=np.uint8)
        c = encode(spec, crc.append(payload))
        x = np.zeros(aug.combined.cols, dtype=np.uint8)
        x[aug.cvn_cols] = c
        # rows supported on CVNs only are the CRC rows; they must hold
        for r in range(pruned_rows(aug), aug.combined.rows):
            acc = sum(int(x[c2]) for c2 in aug.combined.row_support[r]) % 2
            assert acc == 0


def pruned_rows(aug):
    return aug.base.matrix.rows


def test_prepruning_pipeline_same_code_but_larger():
    N, K = 64, 35
    spec = construct_info_set(N, K, 0.5)
    crc = CrcSpec(3, 0b011)
    plain = prune_code(spec)
    post = attach_crc(plain, spec, crc)
    pre = prune_with_crc(spec, crc)
    assert pre.n_prime > plain.n_prime
    post_as_pruned = PrunedPcm(matrix=post.combined, cvn_cols=post.cvn_cols,
                               N=N, K=K)
    b1 = nullspace_cvn_projection(post_as_pruned)
    b2 = nullspace_cvn_projection(pre)
    k_eff = K - 3
    assert rank_of_bitrows(b1, N) == k_eff
    assert rank_of_bitrows(b2, N) == k_eff
    assert rank_of_bitrows(b1 + b2, N) == k_eff
