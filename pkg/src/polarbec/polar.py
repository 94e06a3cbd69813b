"""Polar code construction, encoding, and the dense reference PCM.

Conventions: the generator is G_N = B_N F^{xn} (bit reversal on the
input side), frozen bits are zero, indices are 0-based internally.
Synthetic-channel erasure probabilities follow the exact BEC recursion
z -> (2z - z^2, z^2), which lands in input-bit order for this generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .gf2 import DenseBitMatrix, GF2Error


class CodeSpecError(ValueError):
    """Invalid polar code parameters."""


def bit_reverse(i: int, n: int) -> int:
    out = 0
    for _ in range(n):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


def bit_reversal_permutation(n: int) -> np.ndarray:
    return np.array([bit_reverse(i, n) for i in range(1 << n)], dtype=np.int64)


@dataclass(frozen=True)
class PolarCodeSpec:
    """Blocklength, information set, and design erasure probability."""

    N: int
    info_set: tuple[int, ...]
    design_eps: float
    n: int = field(init=False)

    def __post_init__(self):
        if self.N < 2 or self.N & (self.N - 1):
            raise CodeSpecError(f"N must be a power of 2 >= 2, got {self.N}")
        object.__setattr__(self, "n", self.N.bit_length() - 1)
        info = tuple(int(i) for i in self.info_set)
        if list(info) != sorted(set(info)):
            raise CodeSpecError("info_set must be strictly increasing")
        if info and (info[0] < 0 or info[-1] >= self.N):
            raise CodeSpecError("info_set index out of range")
        if not 0.0 < self.design_eps < 1.0:
            raise CodeSpecError("design_eps must lie in (0, 1)")
        object.__setattr__(self, "info_set", info)

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def frozen_set(self) -> tuple[int, ...]:
        info = set(self.info_set)
        return tuple(i for i in range(self.N) if i not in info)

    def full_input(self, payload) -> np.ndarray:
        """Embed a K-bit payload at the information positions (frozen = 0)."""
        payload = as_bits_2d(payload)
        if payload.shape[-1] != self.K:
            raise CodeSpecError(f"payload must have {self.K} bits")
        u = np.zeros(payload.shape[:-1] + (self.N,), dtype=np.uint8)
        u[..., list(self.info_set)] = payload
        return u


def as_bits_2d(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.uint8) % 2
    if v.ndim not in (1, 2):
        raise GF2Error(f"expected 1-D or 2-D bits, got shape {v.shape}")
    return v


def bec_channel_reliabilities(n: int, design_eps: float) -> np.ndarray:
    """Per-input-bit erasure probabilities of the N = 2^n synthetic channels.

    Exact on the BEC: each polarization step maps z to the pair
    (2z - z^2, z^2).  The mean is conserved at every step.
    """
    if not 0.0 < design_eps < 1.0:
        raise CodeSpecError("design_eps must lie in (0, 1)")
    z = np.array([design_eps], dtype=np.float64)
    for _ in range(n):
        worse = 2.0 * z - z * z
        better = z * z
        z = np.stack([worse, better], axis=1).reshape(-1)
    return z


def construct_info_set(N: int, K: int, design_eps: float) -> PolarCodeSpec:
    """Pick the K most reliable synthetic channels (ties to smaller index)."""
    if N < 2 or N & (N - 1):
        raise CodeSpecError(f"N must be a power of 2 >= 2, got {N}")
    if not 0 <= K <= N:
        raise CodeSpecError(f"K must lie in [0, {N}], got {K}")
    n = N.bit_length() - 1
    z = bec_channel_reliabilities(n, design_eps)
    order = sorted(range(N), key=lambda i: (z[i], i))
    return PolarCodeSpec(N, tuple(sorted(order[:K])), design_eps)


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def polar_transform(u) -> np.ndarray:
    """Apply G_N = B_N F^{xn} to the last axis (accepts a batch)."""
    x = as_bits_2d(u).copy()
    N = x.shape[-1]
    if N < 1 or N & (N - 1):
        raise CodeSpecError("input length must be a power of 2")
    n = N.bit_length() - 1
    x = x[..., bit_reversal_permutation(n)]
    block = N
    while block >= 2:
        half = block // 2
        for start in range(0, N, block):
            x[..., start:start + half] ^= x[..., start + half:start + block]
        block = half
    return x


def encode(spec: PolarCodeSpec, payload) -> np.ndarray:
    """Encode a K-bit payload (or a batch of them) into N-bit codewords."""
    return polar_transform(spec.full_input(payload))


def encode_wires(spec: PolarCodeSpec, payload) -> list[np.ndarray]:
    """All n+1 butterfly wire layers for one payload.

    Layer 0 is the input word in input order; layers 1..n are the
    intermediate values in transform order, layer n being the codeword.
    These are exactly the assignments the factor graph constrains.
    """
    u = spec.full_input(payload)
    if u.ndim != 1:
        raise CodeSpecError("encode_wires takes a single payload")
    N = spec.N
    layers = [u.copy()]
    x = u[bit_reversal_permutation(spec.n)].copy()
    block = N
    while block >= 2:
        half = block // 2
        for start in range(0, N, block):
            x[start:start + half] ^= x[start + half:start + block]
        layers.append(x.copy())
        block = half
    return layers


def generator_matrix(spec_or_N) -> DenseBitMatrix:
    """Dense G_N; row i is the codeword of the i-th unit input."""
    N = spec_or_N.N if isinstance(spec_or_N, PolarCodeSpec) else int(spec_or_N)
    rows = polar_transform(np.eye(N, dtype=np.uint8))
    return DenseBitMatrix.from_array(rows)


def standard_dense_pcm(spec: PolarCodeSpec) -> DenseBitMatrix:
    """The (N-K) x N dense PCM from the frozen coordinates of G_N^T c."""
    g = generator_matrix(spec)
    gt = g.transpose()
    frozen = spec.frozen_set
    return DenseBitMatrix(len(frozen), spec.N, [gt._rows[j] for j in frozen])


# ---------------------------------------------------------------------------
# code specification files
# ---------------------------------------------------------------------------

def code_spec_to_json(spec: PolarCodeSpec, crc_degree: int = 0,
                      crc_poly: int | None = None) -> str:
    """JSON code file: N, K, design_eps, explicit info_set (0-based).

    Optional CRC fields: crc_degree and crc_poly (hex string of the
    generator polynomial's low coefficients, leading term implicit).
    """
    obj = {
        "N": spec.N,
        "K": spec.K,
        "design_eps": spec.design_eps,
        "info_set": list(spec.info_set),
    }
    if crc_degree:
        obj["crc_degree"] = int(crc_degree)
        obj["crc_poly"] = format(crc_poly if crc_poly is not None else 0, "#x")
    return json.dumps(obj, indent=2) + "\n"


def code_spec_from_json(text: str):
    """Parse a code file; returns (spec, crc_degree, crc_poly)."""
    obj = json.loads(text)
    spec = PolarCodeSpec(int(obj["N"]), tuple(obj["info_set"]),
                         float(obj["design_eps"]))
    if "K" in obj and int(obj["K"]) != spec.K:
        raise CodeSpecError("K does not match info_set length")
    degree = int(obj.get("crc_degree", 0))
    poly = int(obj["crc_poly"], 16) if "crc_poly" in obj else None
    return spec, degree, poly
