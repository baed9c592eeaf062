"""Compressed-sparse-row matrices with an optional exact-integer view.

The solver needs fast float mat-vecs (both A@x and A.T@y are hot), while
the certification code needs exact arithmetic.  Entries are stored once in
CSR order as float64 plus an integer flag; a column-compressed shadow is
built lazily for transpose products.  Instances are immutable after
construction and safe to share; mat-vecs are single-threaded and
deterministic.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from tulp import kernels
from tulp.errors import DimensionError

_MAX_EXACT = 2**53  # integers round-trip through float64 up to here


class SparseMatrix:
    """Immutable sparse matrix in CSR form.

    Parameters
    ----------
    n_rows, n_cols : int
        Matrix shape.
    triplets : iterable of (row, col, value)
        Structurally stored entries, 0-based indices.  Duplicate (row, col)
        pairs and out-of-range indices are rejected.  When every value is a
        Python/NumPy integer the matrix is flagged exact-integer.
    """

    __slots__ = ("n_rows", "n_cols", "indptr", "indices", "data",
                 "is_integer", "_csc")

    def __init__(self, n_rows: int, n_cols: int, triplets):
        if n_rows < 0 or n_cols < 0:
            raise DimensionError("matrix shape must be nonnegative")
        entries = sorted(triplets, key=lambda t: (t[0], t[1]))
        seen = set()
        is_integer = True
        for r, c, v in entries:
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise DimensionError(f"entry ({r}, {c}) outside {n_rows}x{n_cols} matrix")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            seen.add((r, c))
            if isinstance(v, (int, np.integer)):
                if abs(int(v)) > _MAX_EXACT:
                    raise ValueError(f"integer entry {v} exceeds exact float range")
            else:
                is_integer = False
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.is_integer = is_integer
        counts = np.zeros(n_rows, dtype=np.int64)
        for r, _, _ in entries:
            counts[r] += 1
        self.indptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.indices = np.array([c for _, c, _ in entries], dtype=np.int64)
        self.data = np.array([float(v) for _, _, v in entries], dtype=np.float64)
        self._csc = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_dense(cls, array) -> "SparseMatrix":
        arr = np.asarray(array)
        trips = []
        integral = np.issubdtype(arr.dtype, np.integer)
        for r in range(arr.shape[0]):
            for c in range(arr.shape[1]):
                v = arr[r, c]
                if v != 0:
                    trips.append((r, c, int(v) if integral else float(v)))
        return cls(arr.shape[0], arr.shape[1], trips)

    @classmethod
    def eye(cls, n: int) -> "SparseMatrix":
        return cls(n, n, [(i, i, 1) for i in range(n)])

    # -- basic queries ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def triplets(self):
        """Stored entries in CSR order as (row, col, value)."""
        for r in range(self.n_rows):
            for k in range(self.indptr[r], self.indptr[r + 1]):
                v = self.data[k]
                yield (r, int(self.indices[k]), int(v) if self.is_integer else float(v))

    def __repr__(self):
        kind = "int" if self.is_integer else "float"
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz}, {kind})"

    # -- products -----------------------------------------------------------

    def _csc_arrays(self):
        if self._csc is None:
            order = np.lexsort((self._row_ids(), self.indices))
            crows = self._row_ids()[order]
            cdata = self.data[order]
            counts = np.bincount(self.indices, minlength=self.n_cols)
            cindptr = np.zeros(self.n_cols + 1, dtype=np.int64)
            np.cumsum(counts, out=cindptr[1:])
            self._csc = (cindptr, crows.astype(np.int64), cdata)
        return self._csc

    def _row_ids(self):
        return np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.indptr))

    def matvec(self, x, counter=None) -> np.ndarray:
        """A @ x."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_cols,):
            raise DimensionError(f"matvec: expected length {self.n_cols}, got {x.shape}")
        if counter is not None:
            counter.add(1)
        return kernels.csr_matvec(self.indptr, self.indices, self.data, x)

    def rmatvec(self, y, counter=None) -> np.ndarray:
        """A.T @ y."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.n_rows,):
            raise DimensionError(f"rmatvec: expected length {self.n_rows}, got {y.shape}")
        if counter is not None:
            counter.add(1)
        cindptr, crows, cdata = self._csc_arrays()
        return kernels.csc_rmatvec(cindptr, crows, cdata, y)

    # -- conversions ---------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        for r, c, v in self.triplets():
            out[r, c] = v
        return out

    def exact_dense(self) -> list[list[int]]:
        """Dense integer entries; only valid in exact-integer mode."""
        if not self.is_integer:
            raise ValueError("matrix is not in exact-integer mode")
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for r, c, v in self.triplets():
            out[r][c] = v
        return out

    def fraction_dense(self) -> list[list[Fraction]]:
        """Dense rational entries (floats convert exactly)."""
        out = [[Fraction(0)] * self.n_cols for _ in range(self.n_rows)]
        for r, c, v in self.triplets():
            out[r][c] = Fraction(v)
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.n_cols, self.n_rows,
                            [(c, r, v) for r, c, v in self.triplets()])

    def take(self, rows, cols) -> "SparseMatrix":
        """Submatrix with the given row/column index sequences."""
        rmap = {r: i for i, r in enumerate(rows)}
        cmap = {c: i for i, c in enumerate(cols)}
        trips = [(rmap[r], cmap[c], v) for r, c, v in self.triplets()
                 if r in rmap and c in cmap]
        return SparseMatrix(len(rows), len(cols), trips)
