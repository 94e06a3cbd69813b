"""Four-stage exact ML decoding over the binary erasure channel.

Stage 1 peels the sparse PCM (standard BP over erasures).  Stage 2 marks
reference variables and grows a lower-triangular diagonal using only
virtual row/column permutations.  Stage 3 expresses the diagonalized
unknowns as affine functions of the references by back-substitution.
Stage 4 solves a small dense system for the references.

A structured variant eliminates rows against each new diagonal row so
the triangular block becomes the identity and the residual equations
lose their diagonal part; within a batch those eliminations are
mutually independent (every target row is modified by unmodified
diagonal rows only), which is what makes them parallelizable.  The
sequential implementation here is the reference schedule.

Stages 1 and 2 run in a compiled kernel when available; everything is
instrumented with XOR and permutation counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .crc import AugmentedPcm
from .factor_graph import PrunedPcm
from .gf2 import (
    DenseBitMatrix,
    PermutationView,
    SolveResult,
    SparseBitMatrix,
    bits_to_int,
    parity,
    solve_bitrows,
)

BP_SUCCESS = "bp_success"
ML_UNIQUE = "ml_unique"
ML_AMBIGUOUS = "ml_ambiguous"

# var_state / row_state codes shared with the kernels
UNKNOWN, DECODED, REFERENCE, DIAGONAL = 0, 1, 2, 3
ACTIVE, DECODED_ROW, DIAGONAL_ROW = 0, 1, 2


class InvalidChannelError(ValueError):
    """Channel output contradicts itself (impossible on a genuine BEC)."""


class InternalConsistencyError(RuntimeError):
    """A structural invariant failed; indicates a construction bug."""


@dataclass
class ChannelOutput:
    """BEC output: a known/erased mask plus values where known."""

    known_mask: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.known_mask = np.asarray(self.known_mask, dtype=bool)
        self.values = np.asarray(self.values, dtype=np.uint8) % 2
        if self.known_mask.shape != self.values.shape:
            raise InvalidChannelError("mask/value length mismatch")

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def from_string(cls, text: str) -> "ChannelOutput":
        text = text.strip()
        bad = set(text) - set("01?")
        if bad:
            raise InvalidChannelError(f"illegal symbols {sorted(bad)}")
        mask = np.array([ch != "?" for ch in text], dtype=bool)
        vals = np.array([1 if ch == "1" else 0 for ch in text], dtype=np.uint8)
        return cls(mask, vals)

    def to_string(self) -> str:
        return "".join("?" if not k else str(int(v))
                       for k, v in zip(self.known_mask, self.values))


@dataclass(frozen=True)
class MinResidualCheck:
    """Pick references from a check with the fewest remaining unknowns."""

    batch: int = 1


@dataclass(frozen=True)
class RandomCvn:
    """Pick references uniformly among the remaining unknown CVNs."""

    seed: int = 0
    batch: int = 1


class PcmBundle:
    """Decode-ready view of a (possibly CRC-augmented) sparse PCM."""

    def __init__(self, matrix: SparseBitMatrix, cvn_cols, N=None):
        self.matrix = matrix
        self.cvn_cols = list(cvn_cols)
        self.N = N if N is not None else len(self.cvn_cols)
        if len(self.cvn_cols) != self.N:
            raise ValueError("cvn_cols must list one column per codeword bit")
        self.n_rows = matrix.rows
        self.n_cols = matrix.cols
        self.nullity = matrix.cols - matrix.rows
        self.row_support = matrix.row_support
        self.col_support = matrix.col_support

        self.row_ptr = np.zeros(self.n_rows + 1, dtype=np.int32)
        for r, s in enumerate(self.row_support):
            self.row_ptr[r + 1] = self.row_ptr[r] + len(s)
        self.row_cols = np.fromiter(
            (c for s in self.row_support for c in s), dtype=np.int32,
            count=int(self.row_ptr[-1]))
        self.col_ptr = np.zeros(self.n_cols + 1, dtype=np.int32)
        for c, s in enumerate(self.col_support):
            self.col_ptr[c + 1] = self.col_ptr[c] + len(s)
        self.col_rows = np.fromiter(
            (r for s in self.col_support for r in s), dtype=np.int32,
            count=int(self.col_ptr[-1]))
        self.is_cvn = np.zeros(self.n_cols, dtype=np.uint8)
        self.is_cvn[self.cvn_cols] = 1
        self.cvn_col_arr = np.asarray(self.cvn_cols, dtype=np.int64)

    @classmethod
    def from_pruned(cls, pruned: PrunedPcm) -> "PcmBundle":
        return cls(pruned.matrix, pruned.cvn_cols, pruned.N)

    @classmethod
    def from_augmented(cls, aug: AugmentedPcm) -> "PcmBundle":
        return cls(aug.combined, aug.cvn_cols, aug.base.N)

    def channel_arrays(self, y: ChannelOutput):
        if y.n != self.N:
            raise InvalidChannelError(f"expected {self.N} channel bits")
        known = np.zeros(self.n_cols, dtype=np.uint8)
        value = np.zeros(self.n_cols, dtype=np.uint8)
        known[self.cvn_col_arr] = y.known_mask
        value[self.cvn_col_arr] = y.values & y.known_mask
        return known, value


@dataclass
class DecodeState:
    """Mutable stage-1/2 state plus the virtual permutation bookkeeping."""

    bundle: PcmBundle
    value: np.ndarray
    var_state: np.ndarray
    row_state: np.ndarray
    decoded_cols: list[int]
    decoded_rows: list[int]
    ref_cols: list[int]
    diag_rows: list[int]
    diag_cols: list[int]
    perm_count: int = 0
    xors_peel: int = 0
    bp_n_d: int = 0
    bp_n_c: int = 0
    bp_cvn_complete: bool = False
    trace: list[tuple[int, int]] = field(default_factory=list)
    _res: np.ndarray | None = None

    @classmethod
    def from_kernel(cls, bundle: PcmBundle, out: dict) -> "DecodeState":
        return cls(
            bundle=bundle,
            value=out["value"],
            var_state=out["var_state"],
            row_state=out["row_state"],
            decoded_cols=out["decoded_cols"].tolist(),
            decoded_rows=out["decoded_rows"].tolist(),
            ref_cols=out["ref_cols"].tolist(),
            diag_rows=out["diag_rows"].tolist(),
            diag_cols=out["diag_cols"].tolist(),
            perm_count=out["perm_count"],
            xors_peel=out["xors_peel"],
            bp_n_d=out["bp_n_d"],
            bp_n_c=out["bp_n_c"],
            bp_cvn_complete=bool(out["bp_cvn_complete"]),
            trace=list(zip(out["trace_nr"].tolist(), out["trace_l"].tolist())),
        )

    # -- counters ------------------------------------------------------

    @property
    def n_d(self) -> int:
        return len(self.decoded_cols)

    @property
    def n_c(self) -> int:
        return len(self.decoded_rows)

    @property
    def n_r(self) -> int:
        return len(self.ref_cols)

    @property
    def n_u(self) -> int:
        return len(self.diag_cols)

    @property
    def diag_len(self) -> int:
        return len(self.diag_cols)

    @property
    def n_e(self) -> int:
        return self.bundle.n_rows - self.n_c - self.n_u

    @property
    def fully_decoded(self) -> bool:
        return self.n_d == self.bundle.n_cols

    def remaining_rows(self) -> list[int]:
        return [r for r in range(self.bundle.n_rows)
                if self.row_state[r] == ACTIVE]

    @property
    def residual_row_degree(self) -> np.ndarray:
        """Unknown, non-reference, non-diagonalized count per active row."""
        if self._res is None:
            res = np.zeros(self.bundle.n_rows, dtype=np.int32)
            for r in range(self.bundle.n_rows):
                if self.row_state[r] != ACTIVE:
                    continue
                res[r] = sum(1 for c in self.bundle.row_support[r]
                             if self.var_state[c] == UNKNOWN)
            self._res = res
        return self._res

    def view(self) -> PermutationView:
        """Block ordering: [decoded | refs | diagonal | rest] columns,
        [decoded checks | diagonal rows | remaining] rows."""
        placed = set(self.decoded_cols) | set(self.ref_cols) | set(self.diag_cols)
        rest = [c for c in range(self.bundle.n_cols) if c not in placed]
        cols = self.decoded_cols + self.ref_cols + self.diag_cols + rest
        rows = self.decoded_rows + self.diag_rows + self.remaining_rows()
        return PermutationView(np.array(rows), np.array(cols))


# ---------------------------------------------------------------------------
# stage 1 / stage 2 entry points
# ---------------------------------------------------------------------------

def _run_kernel(bundle: PcmBundle, y: ChannelOutput, policy, stop_after_bp):
    known, value = bundle.channel_arrays(y)
    if isinstance(policy, RandomCvn):
        rng = np.random.default_rng(policy.seed)
        cand = rng.permutation(bundle.cvn_col_arr).astype(np.int32)
        pol_id, batch = _kernels.peel_py.POLICY_ORDERED, policy.batch
    elif isinstance(policy, MinResidualCheck) or policy is None:
        cand = np.empty(0, dtype=np.int32)
        pol_id = _kernels.peel_py.POLICY_MIN_RESIDUAL
        batch = policy.batch if policy else 1
    else:
        raise TypeError(f"unknown selector policy {policy!r}")
    if batch < 1:
        raise ValueError("reference batch size must be >= 1")
    out = _kernels.triangulate(
        bundle.n_rows, bundle.n_cols, bundle.row_ptr, bundle.row_cols,
        bundle.col_ptr, bundle.col_rows, known, value, bundle.is_cvn,
        pol_id, cand, batch, int(stop_after_bp))
    if out["parity_error"]:
        raise InvalidChannelError("known bits violate a parity check")
    return DecodeState.from_kernel(bundle, out)


def bp_peel(bundle: PcmBundle, y: ChannelOutput) -> DecodeState:
    """Stage 1 only: peel single-unknown checks to a fixpoint.

    The fixpoint (set of decoded variables and their values) does not
    depend on the visit order.
    """
    return _run_kernel(bundle, y, MinResidualCheck(), stop_after_bp=True)


def triangulate(bundle: PcmBundle, y: ChannelOutput,
                policy=None) -> DecodeState:
    """Stages 1+2: peel, then alternate references and diagonal growth."""
    return _run_kernel(bundle, y, policy or MinResidualCheck(),
                       stop_after_bp=False)


def mark_references(bundle: PcmBundle, state: DecodeState, cols) -> None:
    """Remove columns from the unknown pool (stepwise stage-2 variant)."""
    res = state.residual_row_degree
    for v in cols:
        if state.var_state[v] != UNKNOWN:
            raise InternalConsistencyError(f"column {v} is not unknown")
        state.var_state[v] = REFERENCE
        state.ref_cols.append(v)
        state.perm_count += 1
        for r in bundle.col_support[v]:
            if state.row_state[r] == ACTIVE:
                res[r] -= 1


def diagonal_extension(bundle: PcmBundle, state: DecodeState) -> int:
    """Move every single-residual row/column pair onto the diagonal.

    Returns the number of pairs found; repeating is idempotent once it
    returns zero.
    """
    res = state.residual_row_degree
    queue = [r for r in range(bundle.n_rows)
             if state.row_state[r] == ACTIVE and res[r] == 1]
    head = 0
    found = 0
    while head < len(queue):
        r = queue[head]
        head += 1
        if state.row_state[r] != ACTIVE or res[r] != 1:
            continue
        v = next(c for c in bundle.row_support[r]
                 if state.var_state[c] == UNKNOWN)
        state.var_state[v] = DIAGONAL
        state.diag_cols.append(v)
        state.diag_rows.append(r)
        state.row_state[r] = DIAGONAL_ROW
        res[r] = 0
        state.perm_count += 2
        found += 1
        for r2 in bundle.col_support[v]:
            if state.row_state[r2] == ACTIVE:
                res[r2] -= 1
                if res[r2] == 1:
                    queue.append(r2)
    return found


# ---------------------------------------------------------------------------
# stage 3: affine expression of the diagonalized unknowns
# ---------------------------------------------------------------------------

@dataclass
class AffineMap:
    """u = A r + a for the diagonalized unknowns, rows packed as ints."""

    n_r: int
    rows: list[int]
    consts: list[int]
    gamma: int = 0
    xors_s1: int = 0
    xors_recursion: int = 0

    @property
    def n_u(self) -> int:
        return len(self.rows)


def back_substitute(bundle: PcmBundle, state: DecodeState) -> AffineMap:
    """Recursive back-substitution down the unit lower-triangular block.

    Every strictly-sub-diagonal one folds a previously computed affine
    row in, costing n_r + 1 XORs, so the recursion total is exactly
    (n_r + 1) * (gamma - n_u).
    """
    n_r = state.n_r
    ref_pos = {c: j for j, c in enumerate(state.ref_cols)}
    diag_pos = {c: k for k, c in enumerate(state.diag_cols)}
    var_state = state.var_state
    value = state.value
    amap = AffineMap(n_r, [], [])
    for k, r in enumerate(state.diag_rows):
        coef = 0
        const = 0
        for c in bundle.row_support[r]:
            st = var_state[c]
            if st == DECODED:
                const ^= int(value[c])
                amap.xors_s1 += 1
            elif st == REFERENCE:
                coef ^= 1 << ref_pos[c]
            elif st == DIAGONAL:
                j = diag_pos[c]
                amap.gamma += 1
                if j == k:
                    continue
                if j > k:
                    raise InternalConsistencyError(
                        "diagonal block is not lower triangular")
                coef ^= amap.rows[j]
                const ^= amap.consts[j]
                amap.xors_recursion += n_r + 1
            else:
                raise InternalConsistencyError(
                    "unknown variable left in a diagonal row")
        amap.rows.append(coef)
        amap.consts.append(const)
    return amap


# ---------------------------------------------------------------------------
# stage 4: the reference system
# ---------------------------------------------------------------------------

@dataclass
class ReferenceSystem:
    solve: SolveResult
    rho: int = 0
    xors_s2: int = 0
    xors_build: int = 0
    xors_gauss: int = 0


def solve_references(bundle: PcmBundle, state: DecodeState,
                     amap: AffineMap) -> ReferenceSystem:
    """Build and solve the n_e x (n_r + 1) augmented reference system.

    An inconsistent system cannot arise from genuine channel output and
    is surfaced as an internal-consistency failure.
    """
    n_r = state.n_r
    ref_pos = {c: j for j, c in enumerate(state.ref_cols)}
    diag_pos = {c: k for k, c in enumerate(state.diag_cols)}
    var_state = state.var_state
    value = state.value
    sys_rows = []
    out = ReferenceSystem(solve=None)
    for r in state.remaining_rows():
        coef = 0
        rhs = 0
        for c in bundle.row_support[r]:
            st = var_state[c]
            if st == DECODED:
                rhs ^= int(value[c])
                out.xors_s2 += 1
            elif st == REFERENCE:
                coef ^= 1 << ref_pos[c]
            elif st == DIAGONAL:
                k = diag_pos[c]
                coef ^= amap.rows[k]
                rhs ^= amap.consts[k]
                out.rho += 1
                out.xors_build += n_r + 1
            else:
                raise InternalConsistencyError(
                    "unknown variable left in a remaining row")
        sys_rows.append(coef | (rhs << n_r))
    counter = [0]
    out.solve = solve_bitrows(sys_rows, n_r, n_r, counter)
    out.xors_gauss = counter[0] * (n_r + 1)
    if out.solve.is_inconsistent:
        raise InternalConsistencyError(
            "reference system inconsistent; the true codeword must solve it")
    return out


# ---------------------------------------------------------------------------
# structured variant: eliminate rows against each new diagonal row
# ---------------------------------------------------------------------------

@dataclass
class StructuredTail:
    amap: AffineMap
    system_rows: list[int]  # over refs, rhs at bit n_r
    xors_elim: int
    xors_s2: int
    dc1: float
    dc2: float


def structured_reduce(bundle: PcmBundle, state: DecodeState) -> StructuredTail:
    """Replay the per-extension row eliminations and read off the tail.

    Reference selection and diagonal growth never look at reference or
    decoded columns, so running the eliminations after triangulation is
    bit-identical to interleaving them; the final diagonal block must be
    the identity and the remaining rows must be clear of it, which is
    asserted here.
    """
    n_r = state.n_r
    ref_pos = {c: j for j, c in enumerate(state.ref_cols)}
    var_state = state.var_state
    value = state.value

    row_bits = {}
    for r in range(bundle.n_rows):
        if state.row_state[r] != DECODED_ROW:
            word = 0
            for c in bundle.row_support[r]:
                word |= 1 << c
            row_bits[r] = word

    xors_elim = 0
    for r, c in zip(state.diag_rows, state.diag_cols):
        bits = row_bits[r]
        weight = bits.bit_count()
        for r2 in bundle.col_support[c]:
            if r2 == r or r2 not in row_bits:
                continue
            if (row_bits[r2] >> c) & 1:
                row_bits[r2] ^= bits
                xors_elim += weight

    diag_mask = 0
    for c in state.diag_cols:
        diag_mask |= 1 << c
    ref_mask = 0
    for c in state.ref_cols:
        ref_mask |= 1 << c
    known_ones = 0
    decoded_mask = 0
    for c in state.decoded_cols:
        decoded_mask |= 1 << c
        if value[c]:
            known_ones |= 1 << c

    def ref_bits(word: int) -> int:
        coef = 0
        w = word & ref_mask
        while w:
            low = w & (w - 1)
            coef |= 1 << ref_pos[(w ^ low).bit_length() - 1]
            w = low
        return coef

    amap = AffineMap(n_r, [], [], gamma=state.n_u)
    dc1_total = 0
    for r, c in zip(state.diag_rows, state.diag_cols):
        bits = row_bits[r]
        if bits & diag_mask != (1 << c):
            raise InternalConsistencyError(
                "structured mode left a non-identity diagonal block")
        amap.rows.append(ref_bits(bits))
        amap.consts.append(parity(bits & known_ones))
        amap.xors_s1 += (bits & decoded_mask).bit_count()
        dc1_total += bits.bit_count()

    system_rows = []
    xors_s2 = 0
    dc2_total = 0
    for r in state.remaining_rows():
        bits = row_bits[r]
        if bits & diag_mask:
            raise InternalConsistencyError(
                "structured mode left diagonal support in a remaining row")
        rhs = parity(bits & known_ones)
        xors_s2 += (bits & decoded_mask).bit_count()
        system_rows.append(ref_bits(bits) | (rhs << n_r))
        dc2_total += bits.bit_count()

    n_u, n_e = state.n_u, state.n_e
    return StructuredTail(
        amap=amap,
        system_rows=system_rows,
        xors_elim=xors_elim,
        xors_s2=xors_s2,
        dc1=dc1_total / n_u if n_u else 0.0,
        dc2=dc2_total / n_e if n_e else 0.0,
    )


# ---------------------------------------------------------------------------
# full decoders
# ---------------------------------------------------------------------------

@dataclass
class DecodeStats:
    n_d: int = 0
    n_c: int = 0
    n_r: int = 0
    n_u: int = 0
    n_e: int = 0
    perm_count: int = 0
    gamma: int = 0
    rho: int = 0
    dc1: float = 0.0
    dc2: float = 0.0
    xors_peel: int = 0
    xors_s1: int = 0
    xors_backsub: int = 0
    xors_s2: int = 0
    xors_build: int = 0
    xors_gauss: int = 0
    xors_assemble: int = 0
    xors_elim: int = 0
    bp_cvn_complete: bool = False

    @property
    def xor_count(self) -> int:
        return (self.xors_peel + self.xors_s1 + self.xors_backsub
                + self.xors_s2 + self.xors_build + self.xors_gauss
                + self.xors_assemble + self.xors_elim)


@dataclass
class DecodeOutcome:
    codeword: np.ndarray
    status: str
    nullity: int
    stats: DecodeStats
    state: DecodeState | None = None

    @property
    def is_frame_reliable(self) -> bool:
        return self.status in (BP_SUCCESS, ML_UNIQUE)


def ml_decode(bundle: PcmBundle, y: ChannelOutput, policy=None,
              structured: bool = False, keep_state: bool = False,
              trace_sink=None) -> DecodeOutcome:
    """Exact ML decoding of one channel output.

    Returns the decoded codeword with status bp_success (stage 1
    sufficed), ml_unique (the erasures were solvable), or ml_ambiguous
    (several codewords fit; the emitted word fixes all free references
    to zero so bit-level comparisons remain possible).
    """
    state = triangulate(bundle, y, policy)
    stats = DecodeStats(
        n_d=state.n_d, n_c=state.n_c, n_r=state.n_r, n_u=state.n_u,
        n_e=state.n_e, perm_count=state.perm_count,
        xors_peel=state.xors_peel, bp_cvn_complete=state.bp_cvn_complete)

    if state.fully_decoded:
        codeword = state.value[bundle.cvn_col_arr].copy()
        outcome = DecodeOutcome(codeword, BP_SUCCESS, 0, stats,
                                state if keep_state else None)
        _emit_trace(trace_sink, state, outcome)
        return outcome

    if structured:
        tail = structured_reduce(bundle, state)
        amap = tail.amap
        stats.xors_elim = tail.xors_elim
        stats.dc1, stats.dc2 = tail.dc1, tail.dc2
        stats.xors_s2 = tail.xors_s2
        counter = [0]
        solve = solve_bitrows(tail.system_rows, state.n_r, state.n_r, counter)
        stats.xors_gauss = counter[0] * (state.n_r + 1)
        if solve.is_inconsistent:
            raise InternalConsistencyError(
                "reference system inconsistent; the true codeword must solve it")
        stats.rho = 0
    else:
        amap = back_substitute(bundle, state)
        refsys = solve_references(bundle, state, amap)
        solve = refsys.solve
        stats.rho = refsys.rho
        stats.xors_s2 = refsys.xors_s2
        stats.xors_build = refsys.xors_build
        stats.xors_gauss = refsys.xors_gauss
        stats.dc1 = (sum(len(bundle.row_support[r]) for r in state.diag_rows)
                     / state.n_u if state.n_u else 0.0)
        stats.dc2 = (sum(len(bundle.row_support[r])
                         for r in state.remaining_rows())
                     / state.n_e if state.n_e else 0.0)

    stats.gamma = amap.gamma
    stats.xors_s1 = amap.xors_s1
    stats.xors_backsub = amap.xors_recursion

    r_word = bits_to_int(solve.solution) if state.n_r else 0
    value = state.value
    for j, c in enumerate(state.ref_cols):
        value[c] = solve.solution[j]
    for k, c in enumerate(state.diag_cols):
        value[c] = parity(amap.rows[k] & r_word) ^ amap.consts[k]
        stats.xors_assemble += amap.rows[k].bit_count()

    codeword = value[bundle.cvn_col_arr].copy()
    status = ML_UNIQUE if solve.is_unique else ML_AMBIGUOUS
    outcome = DecodeOutcome(codeword, status, solve.nullity, stats,
                            state if keep_state else None)
    _emit_trace(trace_sink, state, outcome)
    return outcome


def structured_ml_decode(bundle: PcmBundle, y: ChannelOutput, policy=None,
                         keep_state: bool = False,
                         trace_sink=None) -> DecodeOutcome:
    """ml_decode with per-extension row elimination (identity diagonal)."""
    return ml_decode(bundle, y, policy, structured=True,
                     keep_state=keep_state, trace_sink=trace_sink)


def _emit_trace(trace_sink, state: DecodeState, outcome: DecodeOutcome):
    """JSON-lines decode trace of the per-stage counters."""
    if trace_sink is None:
        return
    import json

    record = {
        "n_d": state.n_d, "n_c": state.n_c, "n_r": state.n_r,
        "n_u": state.n_u, "n_e": state.n_e,
        "l_after_extension": [l for _, l in state.trace],
        "nr_after_extension": [nr for nr, _ in state.trace],
        "status": outcome.status,
    }
    trace_sink.write(json.dumps(record) + "\n")


# ---------------------------------------------------------------------------
# brute-force baseline (the O(N^3) oracle)
# ---------------------------------------------------------------------------

def brute_force_ml(pcm, y: ChannelOutput) -> SolveResult:
    """Solve H_erased c_erased = H_known c_known by dense elimination."""
    if isinstance(pcm, SparseBitMatrix):
        pcm = pcm.to_dense()
    elif not isinstance(pcm, DenseBitMatrix):
        pcm = DenseBitMatrix.from_array(pcm)
    if pcm.cols != y.n:
        raise InvalidChannelError(f"PCM has {pcm.cols} columns, word {y.n}")
    erased = [i for i in range(y.n) if not y.known_mask[i]]
    known_word = 0
    for i in range(y.n):
        if y.known_mask[i] and y.values[i]:
            known_word |= 1 << i
    n_unk = len(erased)
    rows = []
    for w in pcm._rows:
        coef = 0
        for j, c in enumerate(erased):
            if (w >> c) & 1:
                coef |= 1 << j
        rows.append(coef | (parity(w & known_word) << n_unk))
    result = solve_bitrows(rows, n_unk, n_unk)
    if result.is_inconsistent:
        raise InternalConsistencyError(
            "no codeword matches the known bits; not genuine channel output")
    return result


def brute_force_codeword(pcm, y: ChannelOutput):
    """Brute-force decode returning (status, codeword, nullity)."""
    result = brute_force_ml(pcm, y)
    codeword = y.values.copy()
    codeword[~y.known_mask] = 0
    erased = np.flatnonzero(~y.known_mask)
    codeword[erased] = result.solution
    status = ML_UNIQUE if result.is_unique else ML_AMBIGUOUS
    return status, codeword, result.nullity
