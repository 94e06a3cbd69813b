"""Command-line front end: construct, prune, decode, simulate.

Exit codes: 0 success, 2 bad input, 3 internal-consistency failure.
All randomness flows from --seed; the pruned PCM can be cached on disk
(--cache-dir or the POLARBEC_CACHE environment variable).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import channel as chan
from .crc import attach_crc
from .decoder import (
    ChannelOutput,
    InternalConsistencyError,
    InvalidChannelError,
    MinResidualCheck,
    PcmBundle,
    RandomCvn,
    ml_decode,
)
from .factor_graph import (
    ConstructionError,
    PrunedPcm,
    read_pruned,
    write_pruned,
)
from .gf2 import GF2Error
from .polar import CodeSpecError, code_spec_to_json, construct_info_set

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INTERNAL = 3


def default_poly(degree: int) -> int:
    # x^m + x + 1 (for m = 1: x + 1)
    return 0b11 if degree >= 2 else 0b1


def add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, required=True, help="blocklength (power of 2)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--K", type=int, help="polar information size")
    group.add_argument("--rate", type=float,
                       help="total rate incl. CRC; payload = round(rate*N)")
    p.add_argument("--design-eps", type=float, default=None,
                   help="construction erasure probability (default 0.5)")
    p.add_argument("--crc", type=int, default=0, metavar="DEGREE",
                   help="CRC degree (0 disables)")
    p.add_argument("--crc-poly", type=str, default=None, metavar="HEX",
                   help="low CRC coefficients, e.g. 0x03 for x^6+x+1")


def parse_crc(args) -> tuple[int, int | None]:
    degree = args.crc
    poly = None
    if args.crc_poly is not None:
        if degree == 0:
            raise CodeSpecError("--crc-poly needs --crc")
        poly = int(args.crc_poly, 16)
    elif degree:
        poly = default_poly(degree)
    return degree, poly


def parse_eps_grid(text: str) -> list[float]:
    """Either a comma list or an inclusive start:stop:step range."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CodeSpecError(f"bad eps range {text!r} (want start:stop:step)")
        start, stop, step = (float(t) for t in parts)
        if step <= 0:
            raise CodeSpecError("eps step must be positive")
        grid = []
        k = 0
        while True:
            v = round(start + k * step, 12)
            if v > stop + 1e-9:
                break
            grid.append(v)
            k += 1
        return grid
    return [float(t) for t in text.split(",") if t.strip()]


def cache_dir_of(args) -> str | None:
    return args.cache_dir or os.environ.get("POLARBEC_CACHE") or None


def cmd_construct(args) -> int:
    degree, poly = parse_crc(args)
    K = chan.resolve_dimensions(args.N, args.K, args.rate, degree)
    spec = construct_info_set(args.N, K, args.design_eps or 0.5)
    text = code_spec_to_json(spec, degree, poly)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_prune(args) -> int:
    degree, poly = parse_crc(args)
    setup = chan.build_code(args.N, K=args.K, rate=args.rate,
                            design_eps=args.design_eps or 0.5,
                            crc_degree=degree, crc_poly=poly,
                            cache_dir=cache_dir_of(args))
    pruned = setup.pruned
    if degree:
        aug = attach_crc(pruned, setup.spec, setup.crc)
        matrix, cvn_cols = aug.combined, aug.cvn_cols
    else:
        matrix, cvn_cols = pruned.matrix, pruned.cvn_cols
    rank_ok = matrix.rank() == matrix.rows
    out_pruned = PrunedPcm(matrix=matrix, cvn_cols=list(cvn_cols),
                           N=pruned.N, K=pruned.K)
    write_pruned(out_pruned, args.out, extra_meta={
        "design_eps": setup.spec.design_eps,
        "crc_degree": degree,
        "ones_fraction": pruned.ones_fraction,
        "rank_ok": rank_ok,
        "prune_version": chan.PRUNE_VERSION,
    })
    meta = {
        "N": pruned.N, "K": pruned.K, "n_prime": pruned.n_prime,
        "density": matrix.density,
        "ones_fraction": pruned.ones_fraction,
        "rank_ok": rank_ok,
    }
    print(json.dumps(meta))
    if not rank_ok:
        print("error: pruned PCM is rank deficient", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def make_policy(name: str, batch: int, seed: int):
    if name == "random-cvn":
        return RandomCvn(seed=seed, batch=batch)
    if name == "min-residual":
        return MinResidualCheck(batch=batch)
    raise CodeSpecError(f"unknown policy {name!r}")


def cmd_decode(args) -> int:
    pruned = read_pruned(args.pcm)
    bundle = PcmBundle(pruned.matrix, pruned.cvn_cols, pruned.N)
    with open(args.word) as fh:
        word = fh.read().strip()
    if len(word) != bundle.N:
        raise InvalidChannelError(
            f"received word has {len(word)} symbols, code length is {bundle.N}")
    y = ChannelOutput.from_string(word)
    policy = make_policy(args.policy, args.batch, args.seed)
    outcome = ml_decode(bundle, y, policy,
                        structured=(args.mode == "structured"))
    result = {
        "codeword": "".join(str(int(b)) for b in outcome.codeword),
        "status": outcome.status,
        "nullity": outcome.nullity,
        "stats": {
            "n_d": outcome.stats.n_d, "n_c": outcome.stats.n_c,
            "n_r": outcome.stats.n_r, "n_u": outcome.stats.n_u,
            "n_e": outcome.stats.n_e, "xor_count": outcome.stats.xor_count,
            "perm_count": outcome.stats.perm_count,
            "gamma": outcome.stats.gamma, "rho": outcome.stats.rho,
        },
    }
    print(json.dumps(result))
    return EXIT_OK


def cmd_simulate(args) -> int:
    degree, poly = parse_crc(args)
    grid = parse_eps_grid(args.eps)
    if not grid:
        raise CodeSpecError("empty eps grid")
    rows = []
    N = args.N
    K = None
    for eps in grid:
        design = args.design_eps if args.design_eps is not None else eps
        if not 0.0 < design < 1.0:
            design = 0.5
        setup = chan.build_code(N, K=args.K, rate=args.rate,
                                design_eps=design, crc_degree=degree,
                                crc_poly=poly, cache_dir=cache_dir_of(args))
        K = setup.spec.K
        rows.extend(chan.run_trials(
            setup, [eps], args.trials, seed=args.seed, policy=args.policy,
            batch=args.batch, mode=args.mode, workers=args.workers,
            bp_baseline=args.bp_baseline))
    chan.write_csv(rows, args.out, N, K, degree)
    if args.json:
        chan.write_json(rows, args.json, N, K, degree)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarbec",
        description="Exact ML decoding of polar codes over the BEC")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--cache-dir", type=str, default=None,
                        help="pruned-PCM cache (or POLARBEC_CACHE)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="write a code specification JSON")
    add_code_args(p)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("prune", help="build and store the pruned PCM")
    add_code_args(p)
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("decode", help="decode one received word")
    p.add_argument("--pcm", type=str, required=True)
    p.add_argument("--word", type=str, required=True,
                   help="file with one line over {0,1,?}")
    p.add_argument("--policy", choices=["min-residual", "random-cvn"],
                   default="min-residual")
    p.add_argument("--batch", type=int, default=1,
                   help="references per selection round")
    p.add_argument("--mode", choices=["ml", "structured"], default="ml")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte-Carlo error-rate sweep")
    add_code_args(p)
    p.add_argument("--eps", type=str, required=True,
                   help="comma list or inclusive start:stop:step")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--policy", choices=["min-residual", "random-cvn"],
                   default="min-residual")
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--mode", choices=["ml", "structured"], default="ml")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bp-baseline", action="store_true",
                   help="emit paired BP-only rows")
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--json", type=str, default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CodeSpecError, InvalidChannelError, GF2Error, ValueError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (ConstructionError, InternalConsistencyError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
