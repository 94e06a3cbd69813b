"""Exact ML decoding of (CRC-aided) polar codes over the BEC."""

from ._kernels import KERNEL_KIND
from .channel import (
    AggregateStats,
    BecConfig,
    CodeSetup,
    aggregate,
    build_code,
    run_trials,
    transmit,
)
from .crc import CrcSpec, attach_crc, augment, crc_parity_matrix
from .decoder import (
    BP_SUCCESS,
    ML_AMBIGUOUS,
    ML_UNIQUE,
    ChannelOutput,
    DecodeOutcome,
    MinResidualCheck,
    PcmBundle,
    RandomCvn,
    bp_peel,
    brute_force_ml,
    ml_decode,
    structured_ml_decode,
    triangulate,
)
from .factor_graph import (
    PrunedPcm,
    build_full_pcm,
    prune,
    prune_code,
    validate_pruned,
)
from .gf2 import DenseBitMatrix, SparseBitMatrix, gaussian_solve, rank
from .polar import (
    PolarCodeSpec,
    bec_channel_reliabilities,
    construct_info_set,
    encode,
    generator_matrix,
    standard_dense_pcm,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateStats", "BecConfig", "BP_SUCCESS", "ChannelOutput",
    "CodeSetup", "CrcSpec", "DecodeOutcome", "DenseBitMatrix",
    "KERNEL_KIND", "ML_AMBIGUOUS", "ML_UNIQUE", "MinResidualCheck",
    "PcmBundle", "PolarCodeSpec", "PrunedPcm", "RandomCvn",
    "SparseBitMatrix", "aggregate", "attach_crc", "augment",
    "bec_channel_reliabilities", "bp_peel", "brute_force_ml",
    "build_code", "build_full_pcm", "construct_info_set",
    "crc_parity_matrix", "encode", "gaussian_solve", "generator_matrix",
    "ml_decode", "prune", "prune_code", "rank", "run_trials",
    "standard_dense_pcm", "structured_ml_decode", "transmit",
    "triangulate", "validate_pruned",
]
