"""Compressed sparse row storage and the matrix-vector product.

Dense vectors and matrices are plain float64 numpy arrays; the helpers
:func:`as_vector` and :func:`as_dense` validate them at API boundaries.
"""

from dataclasses import dataclass

import numpy as np

from krylov.errors import DimensionError


def as_vector(x, name="x"):
    """Return ``x`` as a 1-D float64 array, rejecting NaN entries."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    return arr


def as_dense(a, name="A"):
    """Return ``a`` as a 2-D float64 array, rejecting NaN entries."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    return arr


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Real matrix in compressed sparse row format.

    Parameters
    ----------
    n_rows, n_cols : int
        Matrix shape.
    row_ptr : ndarray of int, length ``n_rows + 1``
        Row ``i`` occupies ``col_idx[row_ptr[i]:row_ptr[i+1]]``.
    col_idx : ndarray of int, length ``nnz``
        Column indices, strictly increasing within each row.
    values : ndarray of float, length ``nnz``

    The arrays are made read-only on construction, so instances can be shared
    freely between solves.
    """

    n_rows: int
    n_cols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        row_ptr = np.array(self.row_ptr, dtype=np.int64)
        col_idx = np.array(self.col_idx, dtype=np.int64)
        values = np.array(self.values, dtype=np.float64)
        n_rows, n_cols = int(self.n_rows), int(self.n_cols)
        if n_rows < 0 or n_cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if row_ptr.shape != (n_rows + 1,):
            raise ValueError("row_ptr must have length n_rows + 1")
        nnz = col_idx.shape[0]
        if values.shape != (nnz,) or col_idx.ndim != 1:
            raise ValueError("col_idx and values must be 1-D arrays of equal length")
        if row_ptr[0] != 0 or row_ptr[-1] != nnz or np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must be non-decreasing from 0 to nnz")
        if nnz:
            if col_idx.min() < 0 or col_idx.max() >= n_cols:
                raise ValueError("column index out of range")
            # strictly increasing inside a row: every step that is not a row start must increase
            steps = np.diff(col_idx)
            starts = np.zeros(nnz, dtype=bool)
            starts[row_ptr[:-1][row_ptr[:-1] < nnz]] = True
            if np.any(steps[~starts[1:]] <= 0):
                raise ValueError("column indices must be strictly increasing within each row")
        if np.isnan(values).any():
            raise ValueError("values contain NaN")
        for arr in (row_ptr, col_idx, values):
            arr.setflags(write=False)
        object.__setattr__(self, "n_rows", n_rows)
        object.__setattr__(self, "n_cols", n_cols)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_coo(cls, rows, cols, vals, shape):
        """Build from coordinate triplets; duplicate positions are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        n_rows, n_cols = shape
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("rows, cols and vals must have the same length")
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows
                          or cols.min() < 0 or cols.max() >= n_cols):
            raise ValueError("coordinate index out of range")
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size:
            new = np.ones(rows.size, dtype=bool)
            new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            group = np.cumsum(new) - 1
            summed = np.zeros(group[-1] + 1)
            np.add.at(summed, group, vals)
            rows, cols, vals = rows[new], cols[new], summed
        row_ptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=row_ptr[1:])
        return cls(n_rows, n_cols, row_ptr, cols, vals)

    @classmethod
    def from_dense(cls, a, drop_zeros=True):
        a = as_dense(a)
        if drop_zeros:
            rows, cols = np.nonzero(a)
        else:
            rows, cols = np.indices(a.shape).reshape(2, -1)
        return cls.from_coo(rows, cols, a[rows, cols], a.shape)

    @classmethod
    def identity(cls, n):
        idx = np.arange(n)
        return cls(n, n, np.arange(n + 1), idx, np.ones(n))

    # -- inspection -------------------------------------------------------

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self):
        return int(self.col_idx.shape[0])

    def row_indices(self):
        """Row index of every stored entry (the COO row array)."""
        return np.repeat(np.arange(self.n_rows), np.diff(self.row_ptr))

    def row(self, i):
        """Return ``(columns, values)`` views of row ``i``."""
        lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
        return self.col_idx[lo:hi], self.values[lo:hi]

    def to_dense(self):
        out = np.zeros(self.shape)
        out[self.row_indices(), self.col_idx] = self.values
        return out

    def diagonal(self):
        out = np.zeros(min(self.shape))
        rows = self.row_indices()
        on_diag = rows == self.col_idx
        out[rows[on_diag]] = self.values[on_diag]
        return out

    def transpose(self):
        return CsrMatrix.from_coo(self.col_idx, self.row_indices(), self.values,
                                  (self.n_cols, self.n_rows))

    @property
    def T(self):
        return self.transpose()

    def pattern(self):
        """Set of stored ``(i, j)`` positions."""
        return set(zip(self.row_indices().tolist(), self.col_idx.tolist()))

    def __matmul__(self, x):
        return spmv(self, x)

    def __repr__(self):
        return f"CsrMatrix(shape={self.shape}, nnz={self.nnz})"

    def equals(self, other):
        """Entrywise identity of structure and values."""
        return (self.shape == other.shape
                and np.array_equal(self.row_ptr, other.row_ptr)
                and np.array_equal(self.col_idx, other.col_idx)
                and np.array_equal(self.values, other.values))


def spmv(A, x):
    """Sparse matrix-vector product ``A @ x``.

    Raises
    ------
    DimensionError
        If ``len(x) != A.n_cols``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != A.n_cols:
        raise DimensionError(f"cannot multiply {A.shape} matrix by vector of shape {x.shape}")
    products = A.values * x[A.col_idx]
    # bincount accumulates row by row in storage order
    return np.bincount(A.row_indices(), weights=products, minlength=A.n_rows)


def symmetry_violation(A, tol=1e-10):
    """Return the first ``(i, j)`` with ``|a_ij - a_ji|`` above tolerance, else None.

    The comparison is relative to ``max(1, |a_ij|, |a_ji|)``.
    """
    if A.n_rows != A.n_cols:
        return (A.n_rows, A.n_cols)
    dense_like = {}
    rows = A.row_indices()
    for i, j, v in zip(rows.tolist(), A.col_idx.tolist(), A.values.tolist()):
        dense_like[(i, j)] = v
    for (i, j), v in dense_like.items():
        if i == j:
            continue
        w = dense_like.get((j, i), 0.0)
        if abs(v - w) > tol * max(1.0, abs(v), abs(w)):
            return (i, j)
    return None
