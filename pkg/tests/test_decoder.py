"""Four-stage ML decoder: peeling, triangulation, back-substitution, solve."""

import io
import json

import numpy as np
import pytest

from conftest import random_instance
from polarbec.decoder import (
    BP_SUCCESS,
    ML_AMBIGUOUS,
    ML_UNIQUE,
    ChannelOutput,
    InvalidChannelError,
    MinResidualCheck,
    PcmBundle,
    RandomCvn,
    back_substitute,
    bp_peel,
    brute_force_codeword,
    brute_force_ml,
    diagonal_extension,
    mark_references,
    ml_decode,
    solve_references,
    structured_ml_decode,
    triangulate,
)
from polarbec.factor_graph import prune_code
from polarbec.gf2 import SparseBitMatrix, parity
from polarbec.polar import (
    PolarCodeSpec,
    encode,
    encode_wires,
    standard_dense_pcm,
)


def two_bit_bundle():
    return PcmBundle.from_pruned(prune_code(PolarCodeSpec(2, (1,), 0.5)))


# ---------------------------------------------------------------------------
# stage 1
# ---------------------------------------------------------------------------

def test_peel_no_erasures_decodes_everything(codes):
    setup = codes(16, K=8)
    rng = np.random.default_rng(0)
    c, _ = random_instance(setup, 0.0, rng)
    state = bp_peel(setup.bundle, ChannelOutput(np.ones(16, bool), c))
    assert state.fully_decoded
    assert state.n_c == setup.bundle.n_rows
    assert state.bp_cvn_complete


def test_peel_single_check():
    bundle = two_bit_bundle()
    y = ChannelOutput([False, True], [0, 1])
    state = bp_peel(bundle, y)
    assert state.fully_decoded
    assert list(state.value) == [1, 1]


def test_peel_all_erased_decodes_nothing(codes):
    setup = codes(16, K=8)
    y = ChannelOutput(np.zeros(16, bool), np.zeros(16, np.uint8))
    state = bp_peel(setup.bundle, y)
    assert state.n_d == 0
    assert state.n_c == 0


def test_peel_rejects_parity_violation():
    bundle = two_bit_bundle()
    with pytest.raises(InvalidChannelError):
        bp_peel(bundle, ChannelOutput([True, True], [1, 0]))


def test_peel_schedule_invariance(codes):
    """Fixpoint is order-independent: compare against a reference peeler
    run with forward, backward, and shuffled check orders."""
    setup = codes(32, K=16)
    bundle = setup.bundle
    rng = np.random.default_rng(7)
    for trial in range(100):
        _, y = random_instance(setup, 0.5, rng)
        state = bp_peel(bundle, y)
        expect_known = {c for c in range(bundle.n_cols)
                        if state.var_state[c] == 1}
        for order_kind in ("fwd", "bwd", "rnd"):
            known, value = bundle.channel_arrays(y)
            known = known.astype(bool)
            order = list(range(bundle.n_rows))
            if order_kind == "bwd":
                order.reverse()
            elif order_kind == "rnd":
                rng.shuffle(order)
            changed = True
            while changed:
                changed = False
                for r in order:
                    unknowns = [c for c in bundle.row_support[r]
                                if not known[c]]
                    if len(unknowns) == 1:
                        v = unknowns[0]
                        acc = 0
                        for c in bundle.row_support[r]:
                            if c != v:
                                acc ^= int(value[c])
                        value[v] = acc
                        known[v] = True
                        changed = True
            got = set(np.flatnonzero(known))
            assert got == expect_known
            for c in expect_known:
                assert value[c] == state.value[c]


# ---------------------------------------------------------------------------
# stage 2: stepwise ops
# ---------------------------------------------------------------------------

def test_diagonal_extension_stepwise():
    matrix = SparseBitMatrix(2, 3, [[0, 1], [1, 2]])
    bundle = PcmBundle(matrix, [0, 1, 2])
    y = ChannelOutput(np.zeros(3, bool), np.zeros(3, np.uint8))
    state = bp_peel(bundle, y)
    assert diagonal_extension(bundle, state) == 0  # nothing qualifies yet
    mark_references(bundle, state, [0])
    found = diagonal_extension(bundle, state)
    assert found == 2  # row 0 qualifies, then row 1 cascades
    assert state.n_r == 1 and state.n_u == 2 and state.n_e == 0


def test_stepwise_matches_fused_triangulation(codes):
    setup = codes(32, K=16)
    bundle = setup.bundle
    rng = np.random.default_rng(3)
    for _ in range(50):
        _, y = random_instance(setup, 0.55, rng)
        fused = triangulate(bundle, y, MinResidualCheck())
        state = bp_peel(bundle, y)
        while True:
            res = state.residual_row_degree
            active = [r for r in range(bundle.n_rows)
                      if state.row_state[r] == 0]
            cand = [r for r in active if res[r] >= 2]
            if cand:
                best = min(cand, key=lambda r: (res[r], r))
                col = next(c for c in bundle.row_support[best]
                           if state.var_state[c] == 0)
                mark_references(bundle, state, [col])
            elif (state.var_state == 0).any():
                free = [int(c) for c in np.flatnonzero(state.var_state == 0)]
                mark_references(bundle, state, free)
            else:
                break
            diagonal_extension(bundle, state)
        assert state.ref_cols == fused.ref_cols
        assert state.diag_cols == fused.diag_cols
        assert state.diag_rows == fused.diag_rows


def test_triangulated_block_is_unit_lower_triangular(codes):
    setup = codes(64, K=32)
    bundle = setup.bundle
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(60):
        _, y = random_instance(setup, 0.5, rng)
        state = triangulate(bundle, y)
        if state.n_u == 0:
            continue
        checked += 1
        view = state.view()
        mat = view.materialize(bundle.matrix)
        r0, c0 = state.n_c, state.n_d + state.n_r
        for k in range(state.n_u):
            row = mat.row_support[r0 + k]
            in_block = [c - c0 for c in row if c0 <= c < c0 + state.n_u]
            assert max(in_block) == k  # diagonal one, nothing above it
        # decoded checks are confined to decoded columns
        for r in range(state.n_c):
            assert all(c < state.n_d for c in mat.row_support[r])
        # remaining rows sit below the diagonal block
        for r in range(r0 + state.n_u, mat.rows):
            in_block = [c for c in mat.row_support[r]
                        if c0 + state.n_u > c >= c0]
            assert all(c - c0 < state.n_u for c in in_block)
    assert checked >= 20


def test_triangulate_all_erased_layout(codes):
    setup = codes(4, K=2)
    bundle = setup.bundle
    y = ChannelOutput(np.zeros(4, bool), np.zeros(4, np.uint8))
    state = triangulate(bundle, y)
    assert state.n_d == 0
    assert state.n_r + state.n_u == bundle.n_cols
    assert state.n_c + state.n_u + state.n_e == bundle.n_rows


def test_min_residual_picks_from_smallest_row():
    # degree-2 residual row present: the reference must come from it
    matrix = SparseBitMatrix(2, 5, [[0, 1], [1, 2, 3, 4]])
    bundle = PcmBundle(matrix, [0, 1, 2, 3, 4])
    y = ChannelOutput(np.zeros(5, bool), np.zeros(5, np.uint8))
    state = triangulate(bundle, y, MinResidualCheck())
    assert state.ref_cols[0] == 0


# ---------------------------------------------------------------------------
# stages 3 and 4
# ---------------------------------------------------------------------------

def full_truth_assignment(setup, payload):
    """Transmitted values of every pruned-matrix column, via the wires."""
    wires = np.concatenate(encode_wires(setup.spec, setup.crc.append(payload)
                                        if setup.crc else payload))
    return wires[np.asarray(setup.pruned.col_wire_ids)]


def test_affine_map_reproduces_transmitted_values(codes):
    setup = codes(32, K=16)
    bundle = setup.bundle
    rng = np.random.default_rng(17)
    exercised = 0
    for _ in range(100):
        payload = rng.integers(0, 2, size=setup.payload_len, dtype=np.uint8)
        c = setup.encode_frame(payload)
        y = ChannelOutput(rng.random(32) >= 0.5, c)
        state = triangulate(bundle, y)
        if state.fully_decoded:
            continue
        exercised += 1
        amap = back_substitute(bundle, state)
        truth = full_truth_assignment(setup, payload)
        r_true = 0
        for j, col in enumerate(state.ref_cols):
            if truth[col]:
                r_true |= 1 << j
        for k, col in enumerate(state.diag_cols):
            assert parity(amap.rows[k] & r_true) ^ amap.consts[k] == truth[col]
        # the recursion XOR count follows the closed form
        assert amap.xors_recursion == (state.n_r + 1) * (amap.gamma - state.n_u)
    assert exercised >= 30


def test_solve_references_returns_transmitted_on_unique(codes):
    setup = codes(64, K=32)
    bundle = setup.bundle
    rng = np.random.default_rng(23)
    uniques = 0
    for _ in range(200):
        payload = rng.integers(0, 2, size=32, dtype=np.uint8)
        c = setup.encode_frame(payload)
        y = ChannelOutput(rng.random(64) >= 0.45, c)
        state = triangulate(bundle, y)
        if state.fully_decoded:
            continue
        amap = back_substitute(bundle, state)
        refsys = solve_references(bundle, state, amap)
        truth = full_truth_assignment(setup, payload)
        if refsys.solve.is_unique:
            uniques += 1
            for j, col in enumerate(state.ref_cols):
                assert refsys.solve.solution[j] == truth[col]
    assert uniques >= 20


def test_solve_all_erased_nullity(codes):
    setup = codes(16, K=8)
    y = ChannelOutput(np.zeros(16, bool), np.zeros(16, np.uint8))
    out = ml_decode(setup.bundle, y)
    assert out.status == ML_AMBIGUOUS
    assert out.nullity == 8


# ---------------------------------------------------------------------------
# full decoders
# ---------------------------------------------------------------------------

def test_ml_decode_no_erasures(codes):
    setup = codes(32, K=16)
    rng = np.random.default_rng(2)
    c, _ = random_instance(setup, 0.0, rng)
    out = ml_decode(setup.bundle, ChannelOutput(np.ones(32, bool), c))
    assert out.status == BP_SUCCESS
    assert np.array_equal(out.codeword, c)
    assert out.stats.n_r == 0 and out.stats.n_e == 0


def test_ml_decode_agrees_with_brute_force(codes):
    setup = codes(16, K=8)
    hstd = standard_dense_pcm(setup.spec)
    rng = np.random.default_rng(29)
    for _ in range(300):
        c, y = random_instance(setup, 0.5, rng)
        out = ml_decode(setup.bundle, y)
        status, cw, nullity = brute_force_codeword(hstd, y)
        if out.status in (BP_SUCCESS, ML_UNIQUE):
            assert status == ML_UNIQUE
            assert np.array_equal(out.codeword, cw)
            assert np.array_equal(out.codeword, c)
        else:
            assert status == ML_AMBIGUOUS
            assert out.nullity == nullity


def test_bp_success_implies_ml_unique(codes):
    setup = codes(32, K=16)
    rng = np.random.default_rng(31)
    for _ in range(200):
        _, y = random_instance(setup, 0.45, rng)
        out = ml_decode(setup.bundle, y)
        if out.stats.bp_cvn_complete:
            assert out.status in (BP_SUCCESS, ML_UNIQUE)


def test_ambiguous_output_is_consistent_codeword(codes):
    setup = codes(16, K=8)
    hstd = standard_dense_pcm(setup.spec)
    rng = np.random.default_rng(37)
    seen = 0
    for _ in range(200):
        _, y = random_instance(setup, 0.6, rng)
        out = ml_decode(setup.bundle, y)
        if out.status != ML_AMBIGUOUS:
            continue
        seen += 1
        assert not hstd.mat_vec(out.codeword).any()
        assert np.array_equal(out.codeword[y.known_mask],
                              y.values[y.known_mask])
    assert seen >= 20


def test_random_cvn_policy_is_seed_deterministic(codes):
    setup = codes(32, K=16)
    rng = np.random.default_rng(41)
    _, y = random_instance(setup, 0.6, rng)
    a = ml_decode(setup.bundle, y, RandomCvn(seed=5))
    b = ml_decode(setup.bundle, y, RandomCvn(seed=5))
    assert a.status == b.status
    assert np.array_equal(a.codeword, b.codeword)
    assert a.stats.n_r == b.stats.n_r


def test_structured_matches_baseline(codes):
    setup = codes(32, K=16)
    rng = np.random.default_rng(43)
    for _ in range(200):
        _, y = random_instance(setup, 0.5, rng)
        a = ml_decode(setup.bundle, y)
        b = structured_ml_decode(setup.bundle, y)
        assert a.status == b.status
        assert np.array_equal(a.codeword, b.codeword)
        assert a.nullity == b.nullity
        # identity diagonal means no recursion work in stage 3
        assert b.stats.gamma == b.stats.n_u
        assert b.stats.xors_backsub == 0
        assert b.stats.rho == 0


def test_structured_batch_width_preserves_status(codes):
    setup = codes(32, K=16)
    rng = np.random.default_rng(47)
    for _ in range(100):
        _, y = random_instance(setup, 0.5, rng)
        s1 = structured_ml_decode(setup.bundle, y,
                                  MinResidualCheck(batch=1))
        s4 = structured_ml_decode(setup.bundle, y,
                                  MinResidualCheck(batch=4))
        assert s1.status == s4.status
        if s1.status != ML_AMBIGUOUS:
            assert np.array_equal(s1.codeword, s4.codeword)


def test_stage3_xor_count_formula(codes):
    setup = codes(64, K=32)
    rng = np.random.default_rng(53)
    for _ in range(100):
        _, y = random_instance(setup, 0.5, rng)
        out = ml_decode(setup.bundle, y)
        s = out.stats
        assert s.xors_backsub == (s.n_r + 1) * (s.gamma - s.n_u)


def test_decode_trace_records_counters(codes):
    setup = codes(32, K=16)
    rng = np.random.default_rng(59)
    sink = io.StringIO()
    _, y = random_instance(setup, 0.6, rng)
    out = ml_decode(setup.bundle, y, trace_sink=sink)
    record = json.loads(sink.getvalue().strip())
    assert record["n_r"] == out.stats.n_r
    assert record["n_e"] == out.stats.n_e
    assert record["l_after_extension"][-1:] == [out.stats.n_u] \
        if record["l_after_extension"] else True


# ---------------------------------------------------------------------------
# brute force baseline
# ---------------------------------------------------------------------------

def test_brute_force_no_erasures(codes):
    setup = codes(16, K=8)
    hstd = standard_dense_pcm(setup.spec)
    rng = np.random.default_rng(61)
    c, _ = random_instance(setup, 0.0, rng)
    res = brute_force_ml(hstd, ChannelOutput(np.ones(16, bool), c))
    assert res.is_unique
    assert len(res.solution) == 0


def test_brute_force_all_erased(codes):
    setup = codes(16, K=8)
    hstd = standard_dense_pcm(setup.spec)
    res = brute_force_ml(hstd, ChannelOutput(np.zeros(16, bool),
                                             np.zeros(16, np.uint8)))
    assert res.is_ambiguous and res.nullity == 8


def test_brute_force_verdict_matches_codebook_scan(codes):
    setup = codes(16, K=8)
    hstd = standard_dense_pcm(setup.spec)
    payloads = np.array([[(w >> i) & 1 for i in range(8)]
                         for w in range(256)], dtype=np.uint8)
    book = encode(setup.spec, payloads)
    rng = np.random.default_rng(67)
    for _ in range(200):
        c, y = random_instance(setup, 0.5, rng)
        res = brute_force_ml(hstd, y)
        consistent = np.count_nonzero(
            (book[:, y.known_mask] == y.values[y.known_mask]).all(axis=1))
        assert consistent == 1 << res.nullity
        assert res.is_unique == (consistent == 1)
