"""Shared fixtures: session-cached code builds (pruning is the slow part)."""

from types import SimpleNamespace

import numpy as np
import pytest

from polarbec.channel import CodeSetup, build_code
from polarbec.decoder import ChannelOutput
from polarbec.factor_graph import CVN, HVN, PrunedPcm


@pytest.fixture(scope="session")
def codes():
    """Memoized build_code: codes(N, K=..., rate=..., crc_degree=..., design_eps=...)."""
    cache = {}

    def get(N, K=None, rate=None, crc_degree=0, design_eps=0.5) -> CodeSetup:
        key = (N, K, rate, crc_degree, design_eps)
        if key not in cache:
            cache[key] = build_code(N, K=K, rate=rate, crc_degree=crc_degree,
                                    design_eps=design_eps)
        return cache[key]

    return get


def random_instance(setup: CodeSetup, eps: float, rng) -> tuple[np.ndarray, ChannelOutput]:
    """One transmitted codeword and its erased observation."""
    payload = rng.integers(0, 2, size=setup.payload_len, dtype=np.uint8)
    codeword = setup.encode_frame(payload)
    known = rng.random(len(codeword)) >= eps
    return codeword, ChannelOutput(known, codeword)


def rewrap_pruned(pruned: PrunedPcm, spec) -> SimpleNamespace:
    """Present an already-pruned matrix as a graph the pruner accepts."""
    cvn = set(pruned.cvn_cols)
    kind = [CVN if c in cvn else HVN for c in range(pruned.n_prime)]
    check_vars = {r: set(s) for r, s in enumerate(pruned.matrix.row_support)}
    var_checks = {v: set() for v in range(pruned.n_prime)}
    for r, vs in check_vars.items():
        for v in vs:
            var_checks[v].add(r)
    return SimpleNamespace(spec=spec, N=pruned.N, n_vars=pruned.n_prime,
                           kind=kind, check_vars=check_vars,
                           var_checks=var_checks,
                           extra_rows=spec.K - pruned.nullity)
