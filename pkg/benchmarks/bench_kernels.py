#!/usr/bin/env python3
"""Decode-throughput benchmark: compiled kernel vs pure-Python fallback.

Usage:
    python benchmarks/bench_kernels.py [--trials 2000] [--eps 0.40]

Builds a few CRC-aided rate-1/2 codes, decodes the same channel
realizations through both stage-1/2 kernels, and prints trials/s.  The
two kernels are bit-identical by contract, so only speed differs.
"""

import argparse
import time

import numpy as np

from polarbec import _kernels
from polarbec.channel import BecConfig, build_code, transmit
from polarbec.decoder import MinResidualCheck, ml_decode


def bench(setup, eps, trials, seed=0):
    rng = np.random.default_rng(seed)
    payloads = rng.integers(0, 2, size=(trials, setup.payload_len),
                            dtype=np.uint8)
    words = [setup.encode_frame(p) for p in payloads]
    outputs = [transmit(w, BecConfig(eps, seed), t)
               for t, w in enumerate(words)]
    t0 = time.perf_counter()
    n_r_total = 0
    for y in outputs:
        out = ml_decode(setup.bundle, y, MinResidualCheck())
        n_r_total += out.stats.n_r
    dt = time.perf_counter() - t0
    return trials / dt, n_r_total


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--eps", type=float, default=0.40)
    args = parser.parse_args()

    if _kernels.triangulate_native is None:
        print("compiled kernel not available; run pip install -e . first")
        return

    print(f"{'code':>16} {'kernel':>8} {'trials/s':>10} {'sum n_r':>8}")
    for N in (128, 256, 512):
        setup = build_code(N, rate=0.5, crc_degree=6, design_eps=args.eps)
        results = {}
        for kind in ("cython", "python"):
            _kernels.triangulate = (_kernels.triangulate_native
                                    if kind == "cython"
                                    else _kernels.triangulate_python)
            rate, n_r = bench(setup, args.eps, args.trials)
            results[kind] = (rate, n_r)
            print(f"{'P(%d,%d)+CRC6' % (N, setup.spec.K):>16} "
                  f"{kind:>8} {rate:>10.0f} {n_r:>8}")
        assert results["cython"][1] == results["python"][1], \
            "kernel twins disagreed"
        speedup = results["cython"][0] / results["python"][0]
        print(f"{'':>16} {'speedup':>8} {speedup:>10.1f}x")
    _kernels.triangulate = _kernels.triangulate_native


if __name__ == "__main__":
    main()
