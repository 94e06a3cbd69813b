# cython: language_level=3
"""Compiled peeling/triangulation kernel.

Twin of ``peel_py.triangulate``; outputs must stay bit-identical to the
pure-Python version (enforced by the test suite).
"""

import numpy as np

cimport cython

DEF UNKNOWN = 0
DEF DECODED = 1
DEF REFERENCE = 2
DEF DIAGONAL = 3
DEF ACTIVE = 0
DEF DECODED_ROW = 1
DEF DIAGONAL_ROW = 2


@cython.boundscheck(False)
@cython.wraparound(False)
def triangulate(int n_rows, int n_cols,
                int[::1] row_ptr, int[::1] row_cols,
                int[::1] col_ptr, int[::1] col_rows,
                const unsigned char[::1] known,
                const unsigned char[::1] value,
                const unsigned char[::1] is_cvn,
                int policy, int[::1] cand_order, int batch,
                int stop_after_bp):
    cdef unsigned char[::1] var_state = np.zeros(n_cols, dtype=np.uint8)
    cdef unsigned char[::1] val = np.zeros(n_cols, dtype=np.uint8)
    cdef unsigned char[::1] row_state = np.zeros(n_rows, dtype=np.uint8)
    cdef int[::1] res = np.zeros(n_rows, dtype=np.int32)
    cdef unsigned char[::1] par = np.zeros(n_rows, dtype=np.uint8)

    cdef int[::1] decoded_cols = np.empty(n_cols, dtype=np.int32)
    cdef int[::1] decoded_rows = np.empty(n_rows, dtype=np.int32)
    cdef int[::1] queue = np.empty(n_rows, dtype=np.int32)
    cdef int[::1] ext_queue = np.empty(n_rows, dtype=np.int32)
    cdef int[::1] ref_cols = np.empty(n_cols, dtype=np.int32)
    cdef int[::1] diag_rows = np.empty(n_rows, dtype=np.int32)
    cdef int[::1] diag_cols = np.empty(n_rows, dtype=np.int32)
    cdef int[::1] trace_nr = np.empty(n_cols + n_rows + 2, dtype=np.int32)
    cdef int[::1] trace_l = np.empty(n_cols + n_rows + 2, dtype=np.int32)

    cdef Py_ssize_t n_decoded_cols = 0, n_decoded_rows = 0
    cdef Py_ssize_t q_len = 0, q_head = 0
    cdef Py_ssize_t ext_len = 0, ext_head = 0
    cdef Py_ssize_t n_ref = 0, n_diag = 0, n_trace = 0
    cdef long long perm_count = 0, xors_peel = 0
    cdef int parity_error = 0
    cdef int bp_cvn_complete = 1
    cdef Py_ssize_t bp_n_d, bp_n_c
    cdef int unknown_left
    cdef int r, r2, c, v, b, cnt, p, idx, t, best, best_r, picked
    cdef Py_ssize_t cand_cursor = 0
    cdef Py_ssize_t n_cand = cand_order.shape[0]

    for c in range(n_cols):
        if known[c]:
            var_state[c] = DECODED
            val[c] = value[c] & 1
            decoded_cols[n_decoded_cols] = c
            n_decoded_cols += 1

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
            decoded_rows[n_decoded_rows] = r
            n_decoded_rows += 1
        elif cnt == 1:
            queue[q_len] = r
            q_len += 1

    # stage 1: peel to fixpoint
    while q_head < q_len and not parity_error:
        r = queue[q_head]
        q_head += 1
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
        decoded_cols[n_decoded_cols] = v
        n_decoded_cols += 1
        for idx in range(col_ptr[v], col_ptr[v + 1]):
            r2 = col_rows[idx]
            if row_state[r2] != ACTIVE:
                continue
            res[r2] -= 1
            if b:
                par[r2] ^= 1
            xors_peel += 1
            if res[r2] == 1:
                queue[q_len] = r2
                q_len += 1
            elif res[r2] == 0:
                if par[r2]:
                    parity_error = 1
                    break
                row_state[r2] = DECODED_ROW
                decoded_rows[n_decoded_rows] = r2
                n_decoded_rows += 1

    bp_n_d = n_decoded_cols
    bp_n_c = n_decoded_rows
    for c in range(n_cols):
        if is_cvn[c] and var_state[c] != DECODED:
            bp_cvn_complete = 0
            break

    unknown_left = n_cols - <int>n_decoded_cols

    # stage 2: references + diagonal extension
    if not (parity_error or stop_after_bp or unknown_left == 0):
        while unknown_left > 0:
            picked = 0
            if policy == 0:  # min residual
                for t in range(batch):
                    best_r = -1
                    best = n_cols + 1
                    for r in range(n_rows):
                        if row_state[r] == ACTIVE and res[r] >= 2 and res[r] < best:
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
                    # mark reference
                    var_state[v] = REFERENCE
                    ref_cols[n_ref] = v
                    n_ref += 1
                    perm_count += 1
                    unknown_left -= 1
                    for idx in range(col_ptr[v], col_ptr[v + 1]):
                        r2 = col_rows[idx]
                        if row_state[r2] == ACTIVE:
                            res[r2] -= 1
                            if res[r2] == 1:
                                ext_queue[ext_len] = r2
                                ext_len += 1
                    picked += 1
            else:  # ordered candidates
                for t in range(batch):
                    if unknown_left == 0:
                        break
                    v = -1
                    while cand_cursor < n_cand:
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
                    var_state[v] = REFERENCE
                    ref_cols[n_ref] = v
                    n_ref += 1
                    perm_count += 1
                    unknown_left -= 1
                    for idx in range(col_ptr[v], col_ptr[v + 1]):
                        r2 = col_rows[idx]
                        if row_state[r2] == ACTIVE:
                            res[r2] -= 1
                            if res[r2] == 1:
                                ext_queue[ext_len] = r2
                                ext_len += 1
                    picked += 1

            if picked == 0 and ext_head >= ext_len:
                # remaining unknowns sit in no active row: free variables
                for c in range(n_cols):
                    if var_state[c] == UNKNOWN:
                        var_state[c] = REFERENCE
                        ref_cols[n_ref] = c
                        n_ref += 1
                        perm_count += 1
                        unknown_left -= 1

            while ext_head < ext_len:
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
                diag_cols[n_diag] = v
                diag_rows[n_diag] = r
                n_diag += 1
                row_state[r] = DIAGONAL_ROW
                res[r] = 0
                unknown_left -= 1
                perm_count += 2
                for idx in range(col_ptr[v], col_ptr[v + 1]):
                    r2 = col_rows[idx]
                    if row_state[r2] == ACTIVE:
                        res[r2] -= 1
                        if res[r2] == 1:
                            ext_queue[ext_len] = r2
                            ext_len += 1

            trace_nr[n_trace] = <int>n_ref
            trace_l[n_trace] = <int>n_diag
            n_trace += 1

    return {
        "parity_error": parity_error,
        "value": np.asarray(val).copy(),
        "var_state": np.asarray(var_state).copy(),
        "row_state": np.asarray(row_state).copy(),
        "decoded_cols": np.asarray(decoded_cols[:n_decoded_cols]).copy(),
        "decoded_rows": np.asarray(decoded_rows[:n_decoded_rows]).copy(),
        "ref_cols": np.asarray(ref_cols[:n_ref]).copy(),
        "diag_rows": np.asarray(diag_rows[:n_diag]).copy(),
        "diag_cols": np.asarray(diag_cols[:n_diag]).copy(),
        "trace_nr": np.asarray(trace_nr[:n_trace]).copy(),
        "trace_l": np.asarray(trace_l[:n_trace]).copy(),
        "perm_count": int(perm_count),
        "xors_peel": int(xors_peel),
        "bp_n_d": int(bp_n_d),
        "bp_n_c": int(bp_n_c),
        "bp_cvn_complete": int(bp_cvn_complete),
    }
