"""BEC simulation and Monte-Carlo aggregation.

Every random stream is derived from (seed, stream-id, trial-index), so
runs are reproducible bit for bit, trials are independent, and the same
seed pairs the channel realizations across decoders, policies, and
modes.  Trials can be distributed over processes; aggregation is a sum,
so the worker count never changes the result.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .crc import CrcSpec, attach_crc
from .decoder import (
    ChannelOutput,
    MinResidualCheck,
    PcmBundle,
    RandomCvn,
    ml_decode,
)
from .factor_graph import PrunedPcm, prune_code, read_pruned, write_pruned
from .polar import PolarCodeSpec, construct_info_set, encode

# stream ids for per-trial RNG derivation
_STREAM_PAYLOAD = 0
_STREAM_CHANNEL = 1
_STREAM_SELECTOR = 2

PRUNE_VERSION = 1


@dataclass(frozen=True)
class BecConfig:
    """Binary erasure channel with erasure probability eps."""

    eps: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError("eps must lie in [0, 1]")

    @property
    def capacity(self) -> float:
        return 1.0 - self.eps


def transmit(codeword, cfg: BecConfig, trial_index: int = 0) -> ChannelOutput:
    """Erase each bit independently with probability eps.

    The per-trial stream is keyed by (seed, trial_index); known bits
    carry the codeword values unmodified.
    """
    codeword = np.asarray(codeword, dtype=np.uint8) % 2
    rng = np.random.default_rng([cfg.seed, _STREAM_CHANNEL, trial_index])
    known = rng.random(len(codeword)) >= cfg.eps
    return ChannelOutput(known, codeword)


# ---------------------------------------------------------------------------
# code setup (construction + pruning + optional CRC), with a disk cache
# ---------------------------------------------------------------------------

@dataclass
class CodeSetup:
    """Everything one simulation point needs: code, pruned PCM, bundle."""

    spec: PolarCodeSpec
    crc: CrcSpec | None
    pruned: PrunedPcm
    bundle: PcmBundle

    @property
    def payload_len(self) -> int:
        return self.spec.K - (self.crc.degree if self.crc else 0)

    def encode_frame(self, payload) -> np.ndarray:
        info = self.crc.append(payload) if self.crc else np.asarray(
            payload, dtype=np.uint8)
        return encode(self.spec, info)


def resolve_dimensions(N: int, K=None, rate=None, crc_degree: int = 0):
    """Polar information size for either an explicit K or a total rate.

    With a rate, the payload is round(rate * N) bits and the CRC rides
    on top, so K = round(rate * N) + crc_degree (total rate includes
    the CRC).
    """
    if (K is None) == (rate is None):
        raise ValueError("exactly one of K and rate must be given")
    if K is None:
        K = int(round(rate * N)) + crc_degree
    return int(K)


def build_code(N: int, K=None, rate=None, design_eps: float = 0.5,
               crc_degree: int = 0, crc_poly=None,
               cache_dir=None) -> CodeSetup:
    """Construct, prune (cached when a cache dir is given), attach CRC."""
    K = resolve_dimensions(N, K, rate, crc_degree)
    spec = construct_info_set(N, K, design_eps)
    crc = None
    if crc_degree:
        if crc_poly is None:
            crc_poly = 0b11 if crc_degree >= 2 else 0b1
        crc = CrcSpec(crc_degree, crc_poly)

    pruned = None
    cache_path = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        cache_path = os.path.join(cache_dir, cache_key(N, K, design_eps))
        if os.path.exists(cache_path):
            pruned = read_pruned(cache_path)
    if pruned is None:
        pruned = prune_code(spec)
        if cache_path:
            write_pruned(pruned, cache_path,
                         extra_meta={"design_eps": design_eps,
                                     "prune_version": PRUNE_VERSION})

    if crc is None:
        bundle = PcmBundle.from_pruned(pruned)
    else:
        bundle = PcmBundle.from_augmented(attach_crc(pruned, spec, crc))
    return CodeSetup(spec=spec, crc=crc, pruned=pruned, bundle=bundle)


def cache_key(N: int, K: int, design_eps: float) -> str:
    return f"pcm_N{N}_K{K}_eps{design_eps:.6g}_v{PRUNE_VERSION}.txt"


# ---------------------------------------------------------------------------
# Monte-Carlo harness
# ---------------------------------------------------------------------------

@dataclass
class TrialRecord:
    frame_error: bool
    bit_errors: int
    n_r: int
    n_e: int
    n_c: int
    xors: int
    bp_frame_error: bool
    bp_bit_errors: int


@dataclass
class AggregateStats:
    """Per-(eps, mode) Monte-Carlo summary; means include BP successes."""

    eps: float
    mode: str
    policy: str
    trials: int
    fer: float
    fer_lo: float
    fer_hi: float
    ber: float
    mean_nr: float
    mean_ne: float
    mean_xors: float
    mean_decode_rows: float
    se_nr: float = 0.0
    se_ne: float = 0.0

    def csv_row(self, N: int, K: int, crc: int) -> str:
        return (f"{self.eps:.6g},{N},{K},{crc},{self.mode},{self.policy},"
                f"{self.trials},{self.fer:.8g},{self.fer_lo:.8g},"
                f"{self.fer_hi:.8g},{self.ber:.8g},{self.mean_nr:.8g},"
                f"{self.mean_ne:.8g},{self.mean_xors:.8g},"
                f"{self.mean_decode_rows:.8g}")

    def json_obj(self, N: int, K: int, crc: int) -> dict:
        return {
            "eps": self.eps, "N": N, "K": K, "crc": crc,
            "mode": self.mode, "policy": self.policy, "trials": self.trials,
            "fer": self.fer, "fer_lo": self.fer_lo, "fer_hi": self.fer_hi,
            "ber": self.ber, "mean_nr": self.mean_nr,
            "mean_ne": self.mean_ne, "mean_xors": self.mean_xors,
            "mean_decode_rows": self.mean_decode_rows,
        }


CSV_HEADER = ("eps,N,K,crc,mode,policy,trials,fer,fer_lo,fer_hi,ber,"
              "mean_nr,mean_ne,mean_xors,mean_decode_rows")


def wilson_interval(errors: int, trials: int, z: float = 1.959964):
    """Wilson 95% score interval for a binomial fraction."""
    if trials == 0:
        return 0.0, 1.0
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials
                                   + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def run_one_trial(setup: CodeSetup, eps: float, seed: int, trial: int,
                  policy_kind: str, batch: int,
                  structured: bool) -> TrialRecord:
    payload_rng = np.random.default_rng([seed, _STREAM_PAYLOAD, trial])
    payload = payload_rng.integers(0, 2, size=setup.payload_len,
                                   dtype=np.uint8)
    codeword = setup.encode_frame(payload)
    y = transmit(codeword, BecConfig(eps, seed), trial)

    if policy_kind == "random-cvn":
        sel_seed = int(np.random.SeedSequence(
            [seed, _STREAM_SELECTOR, trial]).generate_state(1)[0])
        policy = RandomCvn(seed=sel_seed, batch=batch)
    else:
        policy = MinResidualCheck(batch=batch)

    outcome = ml_decode(setup.bundle, y, policy, structured=structured,
                        keep_state=True)
    state = outcome.state
    bit_errors = int(np.count_nonzero(outcome.codeword != codeword))
    frame_error = (outcome.status == "ml_ambiguous") or bit_errors > 0

    bp_decoded_cvns = sum(
        1 for c in state.decoded_cols[:state.bp_n_d]
        if setup.bundle.is_cvn[c])
    # stage-1 decisions are always correct on a genuine BEC, so the
    # BP-only bit errors are exactly the unresolved codeword bits
    bp_bit_errors = setup.bundle.N - bp_decoded_cvns
    return TrialRecord(
        frame_error=frame_error,
        bit_errors=bit_errors,
        n_r=outcome.stats.n_r,
        n_e=outcome.stats.n_e,
        n_c=outcome.stats.n_c,
        xors=outcome.stats.xor_count,
        bp_frame_error=not outcome.stats.bp_cvn_complete,
        bp_bit_errors=bp_bit_errors,
    )


def aggregate(records, eps: float, N: int, mode: str = "ml",
              policy: str = "min-residual") -> AggregateStats:
    """Exact means/fractions over trial records, with a Wilson interval."""
    records = list(records)
    trials = len(records)
    if trials == 0:
        raise ValueError("no trial records to aggregate")
    frame_errors = sum(r.frame_error for r in records)
    lo, hi = wilson_interval(frame_errors, trials)
    nr = np.array([r.n_r for r in records], dtype=np.float64)
    ne = np.array([r.n_e for r in records], dtype=np.float64)
    return AggregateStats(
        eps=eps, mode=mode, policy=policy, trials=trials,
        fer=frame_errors / trials,
        fer_lo=lo, fer_hi=hi,
        ber=sum(r.bit_errors for r in records) / (trials * N),
        mean_nr=float(nr.mean()),
        mean_ne=float(ne.mean()),
        mean_xors=sum(r.xors for r in records) / trials,
        mean_decode_rows=sum(r.n_c for r in records) / trials,
        se_nr=float(nr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        se_ne=float(ne.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
    )


def aggregate_bp(records, eps: float, N: int) -> AggregateStats:
    """BP-only baseline view of the same trial records (paired rows)."""
    records = list(records)
    trials = len(records)
    frame_errors = sum(r.bp_frame_error for r in records)
    lo, hi = wilson_interval(frame_errors, trials)
    return AggregateStats(
        eps=eps, mode="bp", policy="-", trials=trials,
        fer=frame_errors / trials, fer_lo=lo, fer_hi=hi,
        ber=sum(r.bp_bit_errors for r in records) / (trials * N),
        mean_nr=0.0, mean_ne=0.0, mean_xors=0.0, mean_decode_rows=0.0,
    )


def _run_chunk(args):
    setup, eps, seed, t0, t1, policy_kind, batch, structured = args
    return [run_one_trial(setup, eps, seed, t, policy_kind, batch, structured)
            for t in range(t0, t1)]


def run_trials(setup: CodeSetup, eps_grid, trials: int, seed: int = 0,
               policy: str = "min-residual", batch: int = 1,
               mode: str = "ml", workers: int = 1,
               bp_baseline: bool = False) -> list[AggregateStats]:
    """Monte-Carlo sweep over an eps grid with one code setup.

    Deterministic given (seed, grid, trials); per-trial streams are
    keyed by trial index, so the worker count does not change results.
    Returns one record per (eps, mode), plus paired mode="bp" rows when
    bp_baseline is set.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    structured = mode == "structured"
    results = []
    for eps in eps_grid:
        if workers > 1:
            chunk = max(1, (trials + workers - 1) // workers)
            jobs = [(setup, eps, seed, t0, min(t0 + chunk, trials),
                     policy, batch, structured)
                    for t0 in range(0, trials, chunk)]
            records = []
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part in pool.map(_run_chunk, jobs):
                    records.extend(part)
        else:
            records = [run_one_trial(setup, eps, seed, t, policy, batch,
                                     structured)
                       for t in range(trials)]
        results.append(aggregate(records, eps, setup.bundle.N, mode, policy))
        if bp_baseline:
            results.append(aggregate_bp(records, eps, setup.bundle.N))
    return results


def write_csv(stats, path: str, N: int, K: int, crc: int) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for s in stats:
            fh.write(s.csv_row(N, K, crc) + "\n")


def write_json(stats, path: str, N: int, K: int, crc: int) -> None:
    with open(path, "w") as fh:
        json.dump([s.json_obj(N, K, crc) for s in stats], fh, indent=2)
        fh.write("\n")
