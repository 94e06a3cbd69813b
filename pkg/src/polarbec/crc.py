"""CRC constraints for concatenated CRC-polar codes.

The CRC here is the plain polynomial remainder (no preset, no final
inversion), so the check is linear over GF(2) and can be written as a
parity matrix on the input word.  Constraints are mapped to the
codeword domain through G_N^T, thinned by a greedy pairwise-weight
reduction, and appended to the pruned PCM.  Adding them to the full
factor graph *before* pruning is also supported, but only as a
comparison path: it leaves a larger matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .factor_graph import (
    ConstructionError,
    FullFgPcm,
    PrunedPcm,
    build_full_pcm,
    prune,
)
from .gf2 import DenseBitMatrix, SparseBitMatrix
from .polar import PolarCodeSpec, generator_matrix


@dataclass(frozen=True)
class CrcSpec:
    """Degree-m CRC generator x^m + (low coefficient bits in poly)."""

    degree: int
    poly: int = 0b000011  # x^6 + x + 1 by default

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("CRC degree must be >= 1")
        if not 0 <= self.poly < (1 << self.degree):
            raise ValueError("poly holds the low coefficients only")

    def payload_len(self, K: int) -> int:
        if self.degree >= K:
            raise ValueError(f"CRC degree {self.degree} must be < K={K}")
        return K - self.degree

    def remainder(self, bits) -> np.ndarray:
        """CRC of a bit sequence (bits processed left to right)."""
        g = (1 << self.degree) | self.poly
        reg = 0
        for b in np.asarray(bits, dtype=np.uint8) % 2:
            reg = (reg << 1) | int(b)
            if (reg >> self.degree) & 1:
                reg ^= g
        for _ in range(self.degree):
            reg <<= 1
            if (reg >> self.degree) & 1:
                reg ^= g
        return np.array([(reg >> (self.degree - 1 - i)) & 1
                         for i in range(self.degree)], dtype=np.uint8)

    def append(self, payload) -> np.ndarray:
        payload = np.asarray(payload, dtype=np.uint8) % 2
        return np.concatenate([payload, self.remainder(payload)])

    def check(self, info_bits) -> bool:
        """True when the last m information bits are the CRC of the rest."""
        info_bits = np.asarray(info_bits, dtype=np.uint8) % 2
        m = self.degree
        return bool(np.array_equal(self.remainder(info_bits[:-m]),
                                   info_bits[-m:]))


DEFAULT_CRC6 = CrcSpec(6, 0b000011)


def crc_parity_matrix(spec: PolarCodeSpec, crc: CrcSpec) -> DenseBitMatrix:
    """m x N parity matrix over the input word, supported on info_set.

    The payload sits at the K-m lowest information positions (ascending)
    and the CRC at the m highest; every valid information word u then
    satisfies H_crc u = 0, and the m rows have rank m.
    """
    m = crc.degree
    plen = crc.payload_len(spec.K)
    payload_pos = spec.info_set[:plen]
    crc_pos = spec.info_set[plen:]
    rows = [0] * m
    for i in range(plen):
        unit = np.zeros(plen, dtype=np.uint8)
        unit[i] = 1
        rem = crc.remainder(unit)
        for k in range(m):
            if rem[k]:
                rows[k] |= 1 << payload_pos[i]
    for k in range(m):
        rows[k] |= 1 << crc_pos[k]
    return DenseBitMatrix(m, spec.N, rows)


def codeword_domain_constraints(spec: PolarCodeSpec,
                                crc: CrcSpec) -> DenseBitMatrix:
    """CRC constraints on codeword bits: H_crc G_N^T (u = G_N^T c)."""
    h = crc_parity_matrix(spec, crc)
    return h.matmul(generator_matrix(spec).transpose())


def greedy_density_reduction(rows: DenseBitMatrix) -> DenseBitMatrix:
    """Thin a small dense matrix by pairwise row sums.

    Sweeps all (i, j) pairs; whenever w(row_i ^ row_j) beats the heavier
    of the two, that row is replaced by the sum (ties replace the
    higher-index row).  The row space is unchanged and the total weight
    strictly decreases per replacement, so the sweep terminates.
    """
    if rows.rows == 0:
        raise ValueError("empty matrix")
    work = list(rows._rows)
    improved = True
    while improved:
        improved = False
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                s = work[i] ^ work[j]
                if s == 0:
                    continue
                ws = s.bit_count()
                wi = work[i].bit_count()
                wj = work[j].bit_count()
                if ws < max(wi, wj):
                    if wi > wj:
                        work[i] = s
                    else:
                        work[j] = s
                    improved = True
    return DenseBitMatrix(rows.rows, rows.cols, work)


@dataclass
class AugmentedPcm:
    """Pruned PCM with CRC rows appended on the codeword columns."""

    base: PrunedPcm
    crc_rows: DenseBitMatrix
    combined: SparseBitMatrix

    @property
    def cvn_cols(self) -> list[int]:
        return self.base.cvn_cols

    @property
    def nullity(self) -> int:
        return self.combined.cols - self.combined.rows


def augment(pruned: PrunedPcm, reduced_rows: DenseBitMatrix) -> AugmentedPcm:
    """Append codeword-domain rows to the pruned PCM (rank-checked)."""
    if reduced_rows.cols != pruned.N:
        raise ValueError(f"constraint rows must have {pruned.N} columns")
    supports = list(pruned.matrix.row_support)
    for i in range(reduced_rows.rows):
        word = reduced_rows._rows[i]
        support = []
        while word:
            low = word & (word - 1)
            support.append(pruned.cvn_cols[(word ^ low).bit_length() - 1])
            word = low
        supports.append(sorted(support))
    combined = SparseBitMatrix(len(supports), pruned.n_prime, supports)
    if combined.rank() != combined.rows:
        raise ConstructionError("CRC rows are dependent on the pruned PCM")
    return AugmentedPcm(base=pruned, crc_rows=reduced_rows, combined=combined)


def attach_crc(pruned: PrunedPcm, spec: PolarCodeSpec,
               crc: CrcSpec) -> AugmentedPcm:
    """Full post-pruning pipeline: constraints -> thinning -> append."""
    dense = codeword_domain_constraints(spec, crc)
    return augment(pruned, greedy_density_reduction(dense))


def prune_with_crc(spec: PolarCodeSpec, crc: CrcSpec) -> PrunedPcm:
    """Comparison path: CRC rows added to the full graph, then pruned.

    Kept as a small-N oracle; the dense CRC rows blunt the pruning and
    the result is strictly larger than the post-pruning pipeline's.
    """
    full: FullFgPcm = build_full_pcm(spec)
    h = crc_parity_matrix(spec, crc)
    rows = []
    for i in range(h.rows):
        word = h._rows[i]
        support = []
        while word:
            low = word & (word - 1)
            support.append((word ^ low).bit_length() - 1)
            word = low
        rows.append(sorted(support))
    full.add_input_constraints(rows)
    return prune(full)
