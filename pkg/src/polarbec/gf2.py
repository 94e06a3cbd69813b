"""GF(2) vectors and matrices.

Bit vectors are plain numpy uint8 arrays with values in {0, 1}.  Dense
matrices pack each row into a Python int (word-parallel XOR for free),
sparse matrices keep sorted row/column support lists.  Row and column
permutations are virtual: a :class:`PermutationView` is just a pair of
index maps, the underlying data never moves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GF2Error(ValueError):
    """Contract violation in a GF(2) operation."""


# ---------------------------------------------------------------------------
# bit vector helpers (vectors are numpy uint8 arrays)
# ---------------------------------------------------------------------------

def as_bits(x, length=None) -> np.ndarray:
    """Coerce to a uint8 0/1 vector, optionally checking its length."""
    v = np.asarray(x, dtype=np.uint8) % 2
    if v.ndim != 1:
        raise GF2Error(f"expected a 1-D bit vector, got shape {v.shape}")
    if length is not None and len(v) != length:
        raise GF2Error(f"expected length {length}, got {len(v)}")
    return v


def bits_to_int(bits) -> int:
    """Pack a 0/1 sequence into an int, bit i = element i."""
    word = 0
    for i, b in enumerate(bits):
        if b:
            word |= 1 << i
    return word


def int_to_bits(word: int, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=np.uint8)
    word = int(word)
    while word:
        low = word & (word - 1)
        out[(word ^ low).bit_length() - 1] = 1
        word = low
    return out


def parity(word: int) -> int:
    return word.bit_count() & 1


# ---------------------------------------------------------------------------
# dense bit-packed matrices
# ---------------------------------------------------------------------------

class DenseBitMatrix:
    """Dense GF(2) matrix, one Python int per row (bit j = column j)."""

    def __init__(self, rows: int, cols: int, int_rows=None):
        if rows < 0 or cols < 0:
            raise GF2Error("negative matrix dimension")
        self.rows = rows
        self.cols = cols
        if int_rows is None:
            self._rows = [0] * rows
        else:
            self._rows = list(int_rows)
            if len(self._rows) != rows:
                raise GF2Error("row count mismatch")

    # -- construction -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "DenseBitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_array(cls, a) -> "DenseBitMatrix":
        a = np.atleast_2d(np.asarray(a, dtype=np.uint8) % 2)
        return cls(a.shape[0], a.shape[1], [bits_to_int(row) for row in a])

    def copy(self) -> "DenseBitMatrix":
        return DenseBitMatrix(self.rows, self.cols, self._rows)

    # -- inspection ---------------------------------------------------

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, word in enumerate(self._rows):
            out[i] = int_to_bits(word, self.cols)
        return out

    def get(self, i: int, j: int) -> int:
        return (self._rows[i] >> j) & 1

    def row_weight(self, i: int) -> int:
        return self._rows[i].bit_count()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DenseBitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._rows == other._rows
        )

    def __repr__(self) -> str:
        return f"DenseBitMatrix({self.rows}x{self.cols})"

    # -- algebra ------------------------------------------------------

    def row_xor(self, src: int, dst: int) -> None:
        """Add row src into row dst (src != dst); preserves the row space."""
        if src == dst:
            raise GF2Error("row_xor with identical rows")
        self._rows[dst] ^= self._rows[src]

    def transpose(self) -> "DenseBitMatrix":
        cols = [0] * self.cols
        for i, word in enumerate(self._rows):
            w = word
            while w:
                low = w & (w - 1)
                cols[(w ^ low).bit_length() - 1] |= 1 << i
                w = low
        return DenseBitMatrix(self.cols, self.rows, cols)

    def matmul(self, other: "DenseBitMatrix") -> "DenseBitMatrix":
        """Product self @ other; row i = XOR of other's rows picked by row i."""
        if self.cols != other.rows:
            raise GF2Error("matmul shape mismatch")
        out = []
        for word in self._rows:
            acc = 0
            w = word
            while w:
                low = w & (w - 1)
                acc ^= other._rows[(w ^ low).bit_length() - 1]
                w = low
            out.append(acc)
        return DenseBitMatrix(self.rows, other.cols, out)

    def mat_vec(self, x) -> np.ndarray:
        x = as_bits(x, self.cols)
        xw = bits_to_int(x)
        return np.array([parity(w & xw) for w in self._rows], dtype=np.uint8)

    def stack(self, other: "DenseBitMatrix") -> "DenseBitMatrix":
        if self.cols != other.cols:
            raise GF2Error("stack width mismatch")
        return DenseBitMatrix(self.rows + other.rows, self.cols,
                              self._rows + other._rows)

    def augment_column(self, rhs) -> "DenseBitMatrix":
        """Append one column (the right-hand side) after the last column."""
        rhs = as_bits(rhs, self.rows)
        new = [w | (int(b) << self.cols) for w, b in zip(self._rows, rhs)]
        return DenseBitMatrix(self.rows, self.cols + 1, new)

    def rank(self) -> int:
        return rank_of_bitrows(self._rows, self.cols)

    def nullspace(self) -> list[int]:
        """Basis of the right null space, each vector an int bitmask."""
        return nullspace_of_bitrows(self._rows, self.cols)


# ---------------------------------------------------------------------------
# elimination primitives shared by dense and sparse paths
# ---------------------------------------------------------------------------

def rank_of_bitrows(int_rows, cols: int) -> int:
    work = [w for w in int_rows if w]
    rank = 0
    for col in range(cols):
        mask = 1 << col
        pivot = None
        for i in range(rank, len(work)):
            if work[i] & mask:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and (work[i] & mask):
                work[i] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


def nullspace_of_bitrows(int_rows, cols: int) -> list[int]:
    work = list(int_rows)
    pivot_cols = []
    rank = 0
    for col in range(cols):
        mask = 1 << col
        pivot = None
        for i in range(rank, len(work)):
            if work[i] & mask:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and (work[i] & mask):
                work[i] ^= work[rank]
        pivot_cols.append(col)
        rank += 1
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for r, pc in enumerate(pivot_cols):
            if work[r] & (1 << free):
                vec |= 1 << pc
        basis.append(vec)
    return basis


@dataclass
class SolveResult:
    """Outcome of a GF(2) linear solve.

    status is one of "unique", "ambiguous", "inconsistent".  For the
    ambiguous case `solution` is the particular solution with every free
    variable set to zero and `nullity` the null-space dimension.
    """

    status: str
    solution: np.ndarray | None
    nullity: int = 0

    @property
    def is_unique(self) -> bool:
        return self.status == "unique"

    @property
    def is_ambiguous(self) -> bool:
        return self.status == "ambiguous"

    @property
    def is_inconsistent(self) -> bool:
        return self.status == "inconsistent"


def solve_bitrows(int_rows, n_unknowns: int, rhs_bit: int,
                  xor_counter=None) -> SolveResult:
    """Solve rows of an augmented system packed as ints.

    Bit j < n_unknowns is the coefficient of unknown j, bit `rhs_bit`
    the right-hand side.  Pivots on the first nonzero entry in column
    order; free variables are fixed to zero in the particular solution.
    When given, xor_counter[0] accumulates the number of row XORs.
    """
    work = [w for w in int_rows if w]
    rhs_mask = 1 << rhs_bit
    pivot_cols = []
    rank = 0
    row_xors = 0
    for col in range(n_unknowns):
        mask = 1 << col
        pivot = None
        for i in range(rank, len(work)):
            if work[i] & mask:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and (work[i] & mask):
                work[i] ^= work[rank]
                row_xors += 1
        pivot_cols.append(col)
        rank += 1
    if xor_counter is not None:
        xor_counter[0] += row_xors
    coeff_mask = (1 << n_unknowns) - 1
    for i in range(rank, len(work)):
        if (work[i] & coeff_mask) == 0 and (work[i] & rhs_mask):
            return SolveResult("inconsistent", None)
    x = np.zeros(n_unknowns, dtype=np.uint8)
    for r, pc in enumerate(pivot_cols):
        if work[r] & rhs_mask:
            x[pc] = 1
    nullity = n_unknowns - rank
    if nullity == 0:
        return SolveResult("unique", x)
    return SolveResult("ambiguous", x, nullity)


def gaussian_solve(aug: DenseBitMatrix) -> SolveResult:
    """Solve an augmented system whose last column is the right-hand side."""
    if aug.cols < 1:
        raise GF2Error("augmented matrix needs at least the rhs column")
    return solve_bitrows(aug._rows, aug.cols - 1, aug.cols - 1)


def rank(m) -> int:
    """GF(2) rank of a dense or sparse matrix (input is not modified)."""
    if isinstance(m, DenseBitMatrix):
        return m.rank()
    if isinstance(m, SparseBitMatrix):
        return rank_of_bitrows([bits_to_int_from_support(s) for s in m.row_support],
                               m.cols)
    return DenseBitMatrix.from_array(m).rank()


def bits_to_int_from_support(support) -> int:
    word = 0
    for c in support:
        word |= 1 << c
    return word


# ---------------------------------------------------------------------------
# sparse matrices
# ---------------------------------------------------------------------------

class SparseBitMatrix:
    """Sparse GF(2) matrix stored as sorted row and column support lists.

    The two adjacency views always describe the same set of one-entries;
    `validate()` rebuilds one side from the other and compares.
    """

    def __init__(self, rows: int, cols: int, row_support=None):
        self.rows = rows
        self.cols = cols
        self.row_support: list[list[int]] = (
            [sorted({int(c) for c in s}) for s in row_support]
            if row_support is not None
            else [[] for _ in range(rows)]
        )
        if len(self.row_support) != rows:
            raise GF2Error("row count mismatch")
        for s in self.row_support:
            if s and (s[0] < 0 or s[-1] >= cols):
                raise GF2Error("column id out of range")
        self.col_support: list[list[int]] = [[] for _ in range(cols)]
        for r, s in enumerate(self.row_support):
            for c in s:
                self.col_support[c].append(r)

    # -- construction -------------------------------------------------

    @classmethod
    def from_dense(cls, dense: DenseBitMatrix) -> "SparseBitMatrix":
        rows = []
        for i in range(dense.rows):
            w = dense._rows[i]
            support = []
            while w:
                low = w & (w - 1)
                support.append((w ^ low).bit_length() - 1)
                w = low
            rows.append(support)
        return cls(dense.rows, dense.cols, rows)

    def to_dense(self) -> DenseBitMatrix:
        return DenseBitMatrix(
            self.rows, self.cols,
            [bits_to_int_from_support(s) for s in self.row_support])

    def copy(self) -> "SparseBitMatrix":
        return SparseBitMatrix(self.rows, self.cols, self.row_support)

    # -- inspection ---------------------------------------------------

    def row_degree(self, r: int) -> int:
        return len(self.row_support[r])

    def col_degree(self, c: int) -> int:
        return len(self.col_support[c])

    @property
    def nnz(self) -> int:
        return sum(len(s) for s in self.row_support)

    @property
    def density(self) -> float:
        cells = self.rows * self.cols
        return self.nnz / cells if cells else 0.0

    def validate(self) -> bool:
        """Dual-consistency: col_support matches a rebuild from row_support."""
        rebuilt = [[] for _ in range(self.cols)]
        for r, s in enumerate(self.row_support):
            if s != sorted(set(s)):
                return False
            for c in s:
                rebuilt[c].append(r)
        return rebuilt == self.col_support

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseBitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.row_support == other.row_support
        )

    def __repr__(self) -> str:
        return f"SparseBitMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    # -- algebra ------------------------------------------------------

    def row_xor(self, src: int, dst: int) -> int:
        """Add row src into row dst; returns the XOR count |support(src)|.

        dst becomes the symmetric difference of the two supports and the
        column lists are kept consistent.
        """
        if src == dst:
            raise GF2Error("row_xor with identical rows")
        a = self.row_support[dst]
        b = self.row_support[src]
        merged = []
        i = j = 0
        while i < len(a) and j < len(b):
            if a[i] == b[j]:
                self._col_remove(a[i], dst)
                i += 1
                j += 1
            elif a[i] < b[j]:
                merged.append(a[i])
                i += 1
            else:
                merged.append(b[j])
                self._col_insert(b[j], dst)
                j += 1
        merged.extend(a[i:])
        for c in b[j:]:
            merged.append(c)
            self._col_insert(c, dst)
        self.row_support[dst] = merged
        return len(b)

    def _col_insert(self, c: int, r: int) -> None:
        lst = self.col_support[c]
        lo = _bisect(lst, r)
        lst.insert(lo, r)

    def _col_remove(self, c: int, r: int) -> None:
        lst = self.col_support[c]
        lst.pop(_bisect(lst, r))

    def mat_vec(self, x) -> np.ndarray:
        x = as_bits(x, self.cols)
        out = np.zeros(self.rows, dtype=np.uint8)
        for r, s in enumerate(self.row_support):
            acc = 0
            for c in s:
                acc ^= x[c]
            out[r] = acc
        return out

    def rank(self) -> int:
        return rank(self)

    # -- serialization ------------------------------------------------
    #
    # Text format: a header line "rows cols", then one line per row
    # listing the sorted one-column indices (0-based, space separated);
    # an empty line is a zero row.

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        for s in self.row_support:
            lines.append(" ".join(str(c) for c in s))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SparseBitMatrix":
        m, _ = cls.from_text_with_trailer(text)
        return m

    @classmethod
    def from_text_with_trailer(cls, text: str):
        """Parse the text format; returns (matrix, trailer lines)."""
        lines = text.split("\n")
        if not lines or not lines[0].strip():
            raise GF2Error("missing matrix header")
        try:
            rows, cols = (int(t) for t in lines[0].split())
        except ValueError as exc:
            raise GF2Error(f"bad matrix header {lines[0]!r}") from exc
        if len(lines) < rows + 1:
            raise GF2Error("truncated matrix file")
        support = []
        for r in range(rows):
            line = lines[1 + r].strip()
            support.append([int(t) for t in line.split()] if line else [])
        trailer = [ln for ln in lines[1 + rows:] if ln.strip()]
        return cls(rows, cols, support), trailer


def _bisect(lst, x):
    lo, hi = 0, len(lst)
    while lo < hi:
        mid = (lo + hi) // 2
        if lst[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# virtual permutations
# ---------------------------------------------------------------------------

@dataclass
class PermutationView:
    """Virtual row/column reordering of a matrix.

    row_order[k] (col_order[k]) is the original row (column) id sitting
    at view position k.  Views never move data; `materialize` builds the
    reordered matrix explicitly for tests.
    """

    row_order: np.ndarray
    col_order: np.ndarray

    def __post_init__(self):
        self.row_order = np.asarray(self.row_order, dtype=np.int64)
        self.col_order = np.asarray(self.col_order, dtype=np.int64)
        for order in (self.row_order, self.col_order):
            if len(np.unique(order)) != len(order):
                raise GF2Error("permutation is not a bijection")

    @classmethod
    def identity(cls, rows: int, cols: int) -> "PermutationView":
        return cls(np.arange(rows), np.arange(cols))

    def compose(self, other: "PermutationView") -> "PermutationView":
        """View `other` through self: result[k] = self[other[k]]."""
        return PermutationView(self.row_order[other.row_order],
                               self.col_order[other.col_order])

    def materialize(self, m: SparseBitMatrix) -> SparseBitMatrix:
        col_pos = {int(c): k for k, c in enumerate(self.col_order)}
        rows = []
        for r in self.row_order:
            rows.append(sorted(col_pos[c] for c in m.row_support[int(r)]
                               if c in col_pos))
        return SparseBitMatrix(len(self.row_order), len(self.col_order), rows)
