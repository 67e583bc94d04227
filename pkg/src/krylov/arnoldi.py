"""Arnoldi process with modified Gram-Schmidt orthogonalization.

The operator is any callable mapping a length-n vector to a length-n vector,
so a preconditioned operator ``z -> M^{-1} A z`` plugs in unchanged.

Each new direction is orthogonalized by subtracting one projection at a time
(``w <- w - h_ij v_i``), i.e. the modified Gram-Schmidt form. When that
cancels most of ``w`` a second pass is made and its coefficients are folded
into ``h``; without it orthogonality is lost near an invariant subspace.
"""

from dataclasses import dataclass

import numpy as np

from krylov.errors import DimensionError
from krylov.sparse import CsrMatrix, as_vector, spmv

# relative to ||A v_j||; exact invariant subspaces leave up to ~1e-13 after 50 steps
BREAKDOWN_RTOL = 1e-12

# second pass when ||w|| falls below this fraction of ||A v_j||
REORTH_RATIO = 2 ** -0.5


@dataclass(frozen=True)
class KrylovBasis:
    """Orthonormal Krylov basis and its Hessenberg companion.

    Attributes
    ----------
    v : ndarray, shape (n, m + 1), or (n, m) after breakdown
        Basis vectors stored as columns.
    h : ndarray, shape (m + 1, m)
        Upper Hessenberg matrix with ``A v[:, :m] = v @ h`` (no breakdown).
    m : int
        Number of completed Arnoldi steps.
    breakdown_step : int or None
        1-based step ``j`` at which ``h[j, j-1]`` vanished; then ``m == j``
        and only ``j`` columns are stored.
    """

    v: np.ndarray
    h: np.ndarray
    m: int
    breakdown_step: int | None = None

    @property
    def breakdown(self):
        return self.breakdown_step is not None

    @property
    def n(self):
        return self.v.shape[0]


class ArnoldiProcess:
    """Incremental Arnoldi iteration, one basis vector per :meth:`step`.

    Basis vectors and Hessenberg columns are kept in lists that grow with
    each step; ``stored_columns`` is the number of basis vectors held.
    """

    def __init__(self, apply_operator, v1, max_steps, breakdown_rtol=BREAKDOWN_RTOL):
        v1 = as_vector(v1, "v1")
        if max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        self.apply_operator = apply_operator
        self.n = v1.shape[0]
        self.max_steps = int(max_steps)
        self.breakdown_rtol = breakdown_rtol
        self.vectors = [v1.copy()]
        self.columns = []
        self.breakdown_step = None

    @property
    def m(self):
        return len(self.columns)

    @property
    def stored_columns(self):
        return len(self.vectors)

    @property
    def done(self):
        return self.breakdown_step is not None or self.m == self.max_steps

    def step(self):
        """Perform one step and return the new Hessenberg column ``h[:j+2, j]``."""
        if self.done:
            raise RuntimeError("Arnoldi process has no steps left")
        j = self.m
        w = np.asarray(self.apply_operator(self.vectors[j]), dtype=np.float64)
        if w.shape != (self.n,):
            raise DimensionError(f"operator returned shape {w.shape}, expected ({self.n},)")
        w_norm = np.linalg.norm(w)
        h = np.zeros(j + 2)
        for i in range(j + 1):
            h[i] = w @ self.vectors[i]
            w = w - h[i] * self.vectors[i]
        h[j + 1] = np.linalg.norm(w)
        if h[j + 1] < REORTH_RATIO * w_norm:
            for i in range(j + 1):
                c = w @ self.vectors[i]
                h[i] += c
                w = w - c * self.vectors[i]
            h[j + 1] = np.linalg.norm(w)
        self.columns.append(h)
        # after n steps the basis spans R^n, so whatever is left of w is rounding
        if h[j + 1] <= self.breakdown_rtol * w_norm or self.m == self.n:
            # invariant subspace: the next direction is not stored
            self.breakdown_step = self.m
        else:
            self.vectors.append(w / h[j + 1])
        return h

    def combine(self, y):
        """Return ``V[:, :len(y)] @ y``."""
        out = np.zeros(self.n)
        for yi, v in zip(y, self.vectors):
            out += yi * v
        return out

    def hessenberg(self):
        m = self.m
        H = np.zeros((m + 1, m))
        for j, h in enumerate(self.columns):
            H[:j + 2, j] = h
        return H

    def basis(self):
        """Snapshot of the current state as an immutable :class:`KrylovBasis`."""
        return KrylovBasis(v=np.column_stack(self.vectors), h=self.hessenberg(),
                           m=self.m, breakdown_step=self.breakdown_step)


def arnoldi_expand(apply_operator, v1, m, breakdown_rtol=BREAKDOWN_RTOL):
    """Run ``m`` Arnoldi steps from the unit vector ``v1``.

    Parameters
    ----------
    apply_operator : callable or CsrMatrix
        The operator ``A``; a matrix is wrapped with :func:`spmv`.
    v1 : array_like
        Starting vector, unit 2-norm within 1e-12.
    m : int
        Number of steps requested; fewer are taken on breakdown.

    Returns
    -------
    KrylovBasis
    """
    v1 = as_vector(v1, "v1")
    if abs(np.linalg.norm(v1) - 1.0) > 1e-12:
        raise ValueError(f"v1 must have unit norm, got {np.linalg.norm(v1)!r}")
    if isinstance(apply_operator, CsrMatrix):
        matrix = apply_operator
        apply_operator = lambda x: spmv(matrix, x)  # noqa: E731
    process = ArnoldiProcess(apply_operator, v1, m, breakdown_rtol)
    while not process.done:
        process.step()
    return process.basis()


def arnoldi_relation_residual(A, basis):
    """Max-norm of ``A V_m - V_{m+1} Hbar_m``.

    After breakdown the square relation ``A V_m - V_m H_m`` is used instead.
    """
    m = basis.m
    if A.n_cols != basis.n or A.n_rows != basis.n:
        raise DimensionError(f"matrix {A.shape} does not match basis length {basis.n}")
    if basis.v.shape[1] < m:
        raise DimensionError("basis has fewer columns than completed steps")
    Vm = basis.v[:, :m]
    AV = np.column_stack([spmv(A, Vm[:, k]) for k in range(m)])
    if basis.breakdown:
        rhs = Vm @ basis.h[:m, :m]
    else:
        rhs = basis.v[:, :m + 1] @ basis.h
    return float(np.max(np.abs(AV - rhs)))
