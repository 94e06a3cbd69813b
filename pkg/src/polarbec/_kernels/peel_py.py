"""Pure-Python peeling/triangulation kernel.

Twin of the compiled extension in ``_peel.pyx``: both must produce
bit-identical outputs for the same inputs (the test suite enforces it).
Keep the two in sync when changing either.

Stage 1 peels every check with a single unknown neighbor to a fixpoint
(FIFO over rows).  Stage 2 alternates reference selection with diagonal
extension until no unknown is left: a reference is removed from the
unknown pool without a value, an extension pairs a residual-degree-1 row
with its unknown column on a growing lower-triangular block.  Rows are
never modified, only counted and ordered, so the caller can replay the
structured (row-eliminating) variant afterwards.
"""

from __future__ import annotations

import numpy as np

# var_state codes
UNKNOWN, DECODED, REFERENCE, DIAGONAL = 0, 1, 2, 3
# row_state codes
ACTIVE, DECODED_ROW, DIAGONAL_ROW = 0, 1, 2

POLICY_MIN_RESIDUAL = 0
POLICY_ORDERED = 1


def triangulate(n_rows, n_cols, row_ptr, row_cols, col_ptr, col_rows,
                known, value, is_cvn, policy, cand_order, batch,
                stop_after_bp):
    row_ptr = _as_list(row_ptr)
    row_cols = _as_list(row_cols)
    col_ptr = _as_list(col_ptr)
    col_rows = _as_list(col_rows)
    cand_order = _as_list(cand_order)

    var_state = [0] * n_cols
    val = [0] * n_cols
    decoded_cols = []
    for c in range(n_cols):
        if known[c]:
            var_state[c] = DECODED
            val[c] = int(value[c]) & 1
            decoded_cols.append(c)

    row_state = [0] * n_rows
    res = [0] * n_rows
    par = [0] * n_rows
    decoded_rows = []
    queue = []
    parity_error = 0
    xors_peel = 0

    for r in range(n_rows):
        cnt = 0
        p = 0
        for idx in range(row_ptr[r], row_ptr[r + 1]):
            c = row_cols[idx]
            if var_state[c] == DECODED:
                p ^= val[c]
            else:
                cnt += 1
        res[r] = cnt
        par[r] = p
        if cnt == 0:
            if p:
                parity_error = 1
            row_state[r] = DECODED_ROW
            decoded_rows.append(r)
        elif cnt == 1:
            queue.append(r)

    # stage 1: peel to fixpoint
    head = 0
    while head < len(queue) and not parity_error:
        r = queue[head]
        head += 1
        if row_state[r] != ACTIVE or res[r] != 1:
            continue
        v = -1
        for idx in range(row_ptr[r], row_ptr[r + 1]):
            c = row_cols[idx]
            if var_state[c] == UNKNOWN:
                v = c
                break
        b = par[r]
        var_state[v] = DECODED
        val[v] = b
        decoded_cols.append(v)
        for idx in range(col_ptr[v], col_ptr[v + 1]):
            r2 = col_rows[idx]
            if row_state[r2] != ACTIVE:
                continue
            res[r2] -= 1
            if b:
                par[r2] ^= 1
            xors_peel += 1
            if res[r2] == 1:
                queue.append(r2)
            elif res[r2] == 0:
                if par[r2]:
                    parity_error = 1
                    break
                row_state[r2] = DECODED_ROW
                decoded_rows.append(r2)

    bp_n_d = len(decoded_cols)
    bp_n_c = len(decoded_rows)
    bp_cvn_complete = 1
    for c in range(n_cols):
        if is_cvn[c] and var_state[c] != DECODED:
            bp_cvn_complete = 0
            break

    ref_cols = []
    diag_rows = []
    diag_cols = []
    trace_nr = []
    trace_l = []
    perm_count = 0
    unknown_left = n_cols - len(decoded_cols)

    if parity_error or stop_after_bp or unknown_left == 0:
        return _pack(parity_error, val, var_state, row_state, decoded_cols,
                     decoded_rows, ref_cols, diag_rows, diag_cols, trace_nr,
                     trace_l, perm_count, xors_peel, bp_n_d, bp_n_c,
                     bp_cvn_complete)

    # stage 2: references + diagonal extension
    ext_queue = []
    ext_head = 0
    cand_cursor = 0

    def mark_ref(v):
        nonlocal unknown_left, perm_count
        var_state[v] = REFERENCE
        ref_cols.append(v)
        perm_count += 1
        unknown_left -= 1
        for idx in range(col_ptr[v], col_ptr[v + 1]):
            r2 = col_rows[idx]
            if row_state[r2] == ACTIVE:
                res[r2] -= 1
                if res[r2] == 1:
                    ext_queue.append(r2)

    while unknown_left > 0:
        picked = 0
        if policy == POLICY_MIN_RESIDUAL:
            for _ in range(batch):
                best_r = -1
                best = n_cols + 1
                for r in range(n_rows):
                    if row_state[r] == ACTIVE and 2 <= res[r] < best:
                        best = res[r]
                        best_r = r
                        if best == 2:
                            break
                if best_r < 0:
                    break
                v = -1
                for idx in range(row_ptr[best_r], row_ptr[best_r + 1]):
                    c = row_cols[idx]
                    if var_state[c] == UNKNOWN:
                        v = c
                        break
                mark_ref(v)
                picked += 1
        else:
            for _ in range(batch):
                if unknown_left == 0:
                    break
                v = -1
                while cand_cursor < len(cand_order):
                    c = cand_order[cand_cursor]
                    cand_cursor += 1
                    if var_state[c] == UNKNOWN:
                        v = c
                        break
                if v < 0:
                    for c in range(n_cols):
                        if var_state[c] == UNKNOWN:
                            v = c
                            break
                if v < 0:
                    break
                mark_ref(v)
                picked += 1

        if picked == 0 and ext_head >= len(ext_queue):
            # nothing to pick and nothing to extend: the remaining
            # unknowns sit in no active row, so they are free variables
            for c in range(n_cols):
                if var_state[c] == UNKNOWN:
                    mark_ref(c)

        while ext_head < len(ext_queue):
            r = ext_queue[ext_head]
            ext_head += 1
            if row_state[r] != ACTIVE or res[r] != 1:
                continue
            v = -1
            for idx in range(row_ptr[r], row_ptr[r + 1]):
                c = row_cols[idx]
                if var_state[c] == UNKNOWN:
                    v = c
                    break
            var_state[v] = DIAGONAL
            diag_cols.append(v)
            diag_rows.append(r)
            row_state[r] = DIAGONAL_ROW
            res[r] = 0
            unknown_left -= 1
            perm_count += 2
            for idx in range(col_ptr[v], col_ptr[v + 1]):
                r2 = col_rows[idx]
                if row_state[r2] == ACTIVE:
                    res[r2] -= 1
                    if res[r2] == 1:
                        ext_queue.append(r2)

        trace_nr.append(len(ref_cols))
        trace_l.append(len(diag_cols))

    return _pack(parity_error, val, var_state, row_state, decoded_cols,
                 decoded_rows, ref_cols, diag_rows, diag_cols, trace_nr,
                 trace_l, perm_count, xors_peel, bp_n_d, bp_n_c,
                 bp_cvn_complete)


def _as_list(a):
    return a.tolist() if isinstance(a, np.ndarray) else list(a)


def _pack(parity_error, val, var_state, row_state, decoded_cols, decoded_rows,
          ref_cols, diag_rows, diag_cols, trace_nr, trace_l, perm_count,
          xors_peel, bp_n_d, bp_n_c, bp_cvn_complete):
    i32 = np.int32
    return {
        "parity_error": int(parity_error),
        "value": np.array(val, dtype=np.uint8),
        "var_state": np.array(var_state, dtype=np.uint8),
        "row_state": np.array(row_state, dtype=np.uint8),
        "decoded_cols": np.array(decoded_cols, dtype=i32),
        "decoded_rows": np.array(decoded_rows, dtype=i32),
        "ref_cols": np.array(ref_cols, dtype=i32),
        "diag_rows": np.array(diag_rows, dtype=i32),
        "diag_cols": np.array(diag_cols, dtype=i32),
        "trace_nr": np.array(trace_nr, dtype=i32),
        "trace_l": np.array(trace_l, dtype=i32),
        "perm_count": int(perm_count),
        "xors_peel": int(xors_peel),
        "bp_n_d": int(bp_n_d),
        "bp_n_c": int(bp_n_c),
        "bp_cvn_complete": int(bp_cvn_complete),
    }
