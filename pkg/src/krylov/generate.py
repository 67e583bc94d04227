"""Seeded test-matrix generators.

All generators are deterministic in ``(n, seed)`` for a given numpy version.
"""

import math

import numpy as np

from krylov.sparse import CsrMatrix

KINDS = ("laplacian1d", "laplacian2d", "diag_dominant", "spd_random")

# off-diagonal entries per row for the random generators
OFFDIAG_PER_ROW = 4


def laplacian1d(n):
    """Tridiagonal ``[-1, 2, -1]`` stencil of order ``n``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    i = np.arange(n)
    rows = np.concatenate([i, i[1:], i[:-1]])
    cols = np.concatenate([i, i[:-1], i[1:]])
    vals = np.concatenate([np.full(n, 2.0), np.full(2 * (n - 1), -1.0)])
    return CsrMatrix.from_coo(rows, cols, vals, (n, n))


def laplacian2d(n):
    """Five-point Laplacian on a ``k x k`` grid, ``n = k**2`` unknowns."""
    k = math.isqrt(n)
    if n < 4 or k * k != n:
        raise ValueError(f"laplacian2d needs a perfect square n >= 4, got {n}")
    idx = np.arange(n).reshape(k, k)
    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [np.full(n, 4.0)]
    for a, b in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
        a, b = a.ravel(), b.ravel()
        rows += [a, b]
        cols += [b, a]
        vals += [np.full(a.size, -1.0)] * 2
    return CsrMatrix.from_coo(np.concatenate(rows), np.concatenate(cols),
                              np.concatenate(vals), (n, n))


def _random_offdiag(rng, n, per_row):
    per_row = min(per_row, n - 1)
    # draw from the n-1 non-diagonal columns, then skip over the diagonal
    picks = np.array([rng.choice(n - 1, size=per_row, replace=False) for _ in range(n)])
    rows = np.repeat(np.arange(n), per_row)
    cols = picks.ravel()
    cols = cols + (cols >= rows)
    vals = rng.uniform(-1.0, 1.0, size=rows.size)
    return rows, cols, vals


def diag_dominant(n, seed=0, symmetric=False):
    """Random sparse matrix with ``a_ii = 1 + sum_j |a_ij|``.

    Strict row diagonal dominance makes it nonsingular. With
    ``symmetric=True`` the off-diagonal part is mirrored first, which also
    makes the result SPD.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    per_row = OFFDIAG_PER_ROW // 2 if symmetric else OFFDIAG_PER_ROW
    rows, cols, vals = _random_offdiag(rng, n, max(per_row, 1))
    if symmetric:
        rows, cols, vals = (np.concatenate([rows, cols]), np.concatenate([cols, rows]),
                            np.concatenate([vals, vals]))
    off = CsrMatrix.from_coo(rows, cols, vals, (n, n))
    diag = 1.0 + np.bincount(off.row_indices(), weights=np.abs(off.values), minlength=n)
    r = off.row_indices()
    return CsrMatrix.from_coo(np.concatenate([r, np.arange(n)]),
                              np.concatenate([off.col_idx, np.arange(n)]),
                              np.concatenate([off.values, diag]), (n, n))


def spd_random(n, seed=0):
    """``M^T M + I`` for a seeded sparse ``M`` with a few normal entries per row."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    per_row = min(3, n)
    cols = np.array([rng.choice(n, size=per_row, replace=False) for _ in range(n)])
    vals = rng.standard_normal(size=cols.shape)
    # row r of M contributes the outer product m_r^T m_r
    pr = np.repeat(cols, per_row, axis=1).ravel()
    pc = np.tile(cols, (1, per_row)).ravel()
    pv = (vals[:, :, None] * vals[:, None, :]).ravel()
    i = np.arange(n)
    return CsrMatrix.from_coo(np.concatenate([pr, i]), np.concatenate([pc, i]),
                              np.concatenate([pv, np.ones(n)]), (n, n))


def generate(kind, n, seed=0):
    """Dispatch by name; returns ``(matrix, is_symmetric)``."""
    if kind == "laplacian1d":
        return laplacian1d(n), True
    if kind == "laplacian2d":
        return laplacian2d(n), True
    if kind == "diag_dominant":
        return diag_dominant(n, seed), False
    if kind == "spd_random":
        return spd_random(n, seed), True
    raise ValueError(f"unknown matrix kind {kind!r}; expected one of {KINDS}")
