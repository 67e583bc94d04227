"""Zero fill-in incomplete factorizations: ILU(0) and IC(0).

Both factorizations keep exactly the sparsity pattern of ``A``: every update
that would land outside it is discarded, so ``A = L U - R`` (resp.
``L L^T - R``) with the residual ``R`` supported off the pattern. No pivoting
or reordering is done.
"""

from dataclasses import dataclass, field

import numpy as np

from krylov.errors import DimensionError, NotSymmetricError, PreconditionerError
from krylov.sparse import CsrMatrix, as_vector, symmetry_violation

PIVOT_RTOL = 1e-14

KINDS = ("identity", "ilu0", "ic0")


@dataclass(frozen=True)
class TriangularFactors:
    """Factors of a preconditioner ``M``.

    ``lower`` holds ``L`` with an explicit diagonal (ones for ILU(0)).
    ``upper`` holds ``U`` for ILU(0) and is None otherwise; IC(0) applies
    ``L^T`` for the backward sweep. ``update_count`` is the number of
    elimination updates performed during construction.
    """

    kind: str
    lower: CsrMatrix
    upper: CsrMatrix | None = None
    update_count: int = 0
    _lower_t: CsrMatrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind == "ilu0" and self.upper is None:
            raise ValueError("ilu0 factors need an upper factor")
        if self.kind == "ic0" and self._lower_t is None:
            object.__setattr__(self, "_lower_t", self.lower.transpose())

    @classmethod
    def identity(cls, n):
        return cls("identity", CsrMatrix.identity(n))

    @property
    def n(self):
        return self.lower.n_rows

    def nnz(self):
        return self.lower.nnz + (self.upper.nnz if self.upper is not None else 0)

    def apply(self, r):
        return precond_apply(self, r)


def _check_square(A):
    if A.n_rows != A.n_cols:
        raise DimensionError(f"matrix must be square, got {A.shape}")


def _diag_positions(A):
    """Storage position of each diagonal entry; raises if one is missing."""
    pos = np.empty(A.n_rows, dtype=np.int64)
    for i in range(A.n_rows):
        lo, hi = A.row_ptr[i], A.row_ptr[i + 1]
        k = lo + int(np.searchsorted(A.col_idx[lo:hi], i))
        if k == hi or A.col_idx[k] != i:
            raise PreconditionerError(f"diagonal entry missing in row {i + 1}", row=i)
        pos[i] = k
    return pos


def ilu0(A):
    """Incomplete LU factorization with zero fill-in (IKJ row ordering).

    Returns unit-lower ``L`` and upper ``U`` with ``(L U)[i, j] == A[i, j]``
    at every stored position of ``A``.

    Raises
    ------
    PreconditionerError
        If a diagonal position is absent or a pivot satisfies
        ``|u_ii| <= 1e-14 * max_j |a_ij|``.
    """
    _check_square(A)
    n = A.n_rows
    diag = _diag_positions(A)
    cols = A.col_idx.tolist()
    row_ptr = A.row_ptr.tolist()
    vals = A.values.tolist()
    row_scale = [max((abs(v) for v in vals[row_ptr[i]:row_ptr[i + 1]]), default=0.0)
                 for i in range(n)]
    updates = 0
    for i in range(n):
        lo, hi = row_ptr[i], row_ptr[i + 1]
        where = {cols[p]: p for p in range(lo, hi)}
        for p in range(lo, diag[i]):
            k = cols[p]
            lik = vals[p] / vals[diag[k]]
            vals[p] = lik
            for q in range(diag[k] + 1, row_ptr[k + 1]):
                target = where.get(cols[q])
                if target is not None:
                    vals[target] -= lik * vals[q]
                    updates += 1
        if abs(vals[diag[i]]) <= PIVOT_RTOL * row_scale[i]:
            raise PreconditionerError(f"zero pivot in row {i + 1}", row=i)

    vals = np.array(vals)
    rows = A.row_indices()
    lower_mask = A.col_idx < rows
    upper_mask = ~lower_mask
    L = CsrMatrix.from_coo(np.concatenate([rows[lower_mask], np.arange(n)]),
                           np.concatenate([A.col_idx[lower_mask], np.arange(n)]),
                           np.concatenate([vals[lower_mask], np.ones(n)]), (n, n))
    U = CsrMatrix.from_coo(rows[upper_mask], A.col_idx[upper_mask], vals[upper_mask], (n, n))
    return TriangularFactors("ilu0", L, U, update_count=updates)


def ic0(A):
    """Incomplete Cholesky factorization with zero fill-in.

    ``L`` is restricted to the lower triangle of ``A``'s pattern and satisfies
    ``(L L^T)[i, j] == A[i, j]`` there.

    Raises
    ------
    NotSymmetricError
        If ``A`` is not symmetric within 1e-10.
    PreconditionerError
        If a diagonal is missing or the quantity under a square root is not
        positive.
    """
    _check_square(A)
    bad = symmetry_violation(A)
    if bad is not None:
        raise NotSymmetricError(f"matrix not symmetric at ({bad[0] + 1}, {bad[1] + 1})", bad)
    n = A.n_rows
    diag = _diag_positions(A)
    cols = A.col_idx.tolist()
    row_ptr = A.row_ptr.tolist()
    vals = A.values.tolist()
    L_rows = []
    updates = 0
    for i in range(n):
        Li = {}
        for p in range(row_ptr[i], diag[i]):
            j = cols[p]
            Lj = L_rows[j]
            s = vals[p]
            # Li only holds columns < j at this point
            for k, lik in Li.items():
                ljk = Lj.get(k)
                if ljk is not None:
                    s -= lik * ljk
                    updates += 1
            Li[j] = s / Lj[j]
        d = vals[diag[i]] - sum(v * v for v in Li.values())
        updates += len(Li)
        if not d > 0.0:
            raise PreconditionerError(f"non-positive pivot {d:.3e} in row {i + 1}", row=i)
        Li[i] = float(np.sqrt(d))
        L_rows.append(Li)

    rows, lcols, lvals = [], [], []
    for i, Li in enumerate(L_rows):
        rows.extend([i] * len(Li))
        lcols.extend(Li.keys())
        lvals.extend(Li.values())
    L = CsrMatrix.from_coo(rows, lcols, lvals, (n, n))
    return TriangularFactors("ic0", L, update_count=updates)


def build_preconditioner(kind, A):
    """Factor ``A`` with the named method (``none``/``identity``, ``ilu0``, ``ic0``)."""
    if kind in (None, "none", "identity"):
        return TriangularFactors.identity(A.n_rows)
    if kind == "ilu0":
        return ilu0(A)
    if kind == "ic0":
        return ic0(A)
    raise ValueError(f"unknown preconditioner {kind!r}")


def _forward(L, r):
    z = np.empty_like(r)
    rp, ci, va = L.row_ptr, L.col_idx, L.values
    for i in range(L.n_rows):
        lo, hi = rp[i], rp[i + 1]
        # diagonal is the last stored entry of a lower-triangular row
        if hi == lo or ci[hi - 1] != i or va[hi - 1] == 0.0:
            raise PreconditionerError(f"zero diagonal in lower factor, row {i + 1}", row=i)
        z[i] = (r[i] - va[lo:hi - 1] @ z[ci[lo:hi - 1]]) / va[hi - 1]
    return z


def _backward(U, r):
    z = np.empty_like(r)
    rp, ci, va = U.row_ptr, U.col_idx, U.values
    for i in range(U.n_rows - 1, -1, -1):
        lo, hi = rp[i], rp[i + 1]
        if hi == lo or ci[lo] != i or va[lo] == 0.0:
            raise PreconditionerError(f"zero diagonal in upper factor, row {i + 1}", row=i)
        z[i] = (r[i] - va[lo + 1:hi] @ z[ci[lo + 1:hi]]) / va[lo]
    return z


def precond_apply(factors, r):
    """Solve ``M z = r`` with the stored triangular factors."""
    r = as_vector(r, "r")
    if r.shape[0] != factors.n:
        raise DimensionError(f"vector length {r.shape[0]} does not match factors of order {factors.n}")
    if factors.kind == "identity":
        return r.copy()
    y = _forward(factors.lower, r)
    if factors.kind == "ilu0":
        return _backward(factors.upper, y)
    return _backward(factors._lower_t, y)
