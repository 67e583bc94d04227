"""GMRES and restarted GMRES(m) with optional left preconditioning.

The least-squares problem ``min ||beta e1 - Hbar y||`` is reduced with Givens
rotations as each Hessenberg column arrives, so the residual norm of the
current iterate is known after every Arnoldi step without forming ``x``.
"""

import numpy as np

from krylov.arnoldi import ArnoldiProcess
from krylov.errors import DimensionError, KrylovError, RankDeficientError
from krylov.precond import build_preconditioner, precond_apply
from krylov.report import HistoryEntry, SolveReport, SolverConfig, Status
from krylov.sparse import as_dense, as_vector, spmv


class GivensLeastSquares:
    """Progressive QR of an upper Hessenberg matrix by Givens rotations.

    Feed columns with :meth:`add_column`; each call returns the minimal
    residual norm over the columns seen so far.
    """

    def __init__(self, beta):
        self.R = []
        self.g = [float(beta)]
        self.c = []
        self.s = []

    @property
    def k(self):
        return len(self.R)

    def add_column(self, h):
        j = self.k
        h = np.array(h, dtype=np.float64)
        if h.shape != (j + 2,):
            raise DimensionError(f"column {j} must have length {j + 2}, got {h.shape}")
        col_norm = np.linalg.norm(h)
        for i in range(j):
            hi, hi1 = h[i], h[i + 1]
            h[i] = self.c[i] * hi + self.s[i] * hi1
            h[i + 1] = -self.s[i] * hi + self.c[i] * hi1
        r = np.hypot(h[j], h[j + 1])
        if r == 0.0 or r <= np.finfo(float).eps * col_norm:
            raise RankDeficientError(f"Hessenberg column {j} is dependent on its predecessors")
        c, s = h[j] / r, h[j + 1] / r
        self.c.append(c)
        self.s.append(s)
        h[j] = r
        self.R.append(h[:j + 1])
        self.g.append(-s * self.g[j])
        self.g[j] = c * self.g[j]
        return abs(self.g[j + 1])

    @property
    def residual_norm(self):
        return abs(self.g[self.k])

    def solve(self):
        k = self.k
        R = np.zeros((k, k))
        for j, col in enumerate(self.R):
            R[:j + 1, j] = col
        y = np.zeros(k)
        for i in range(k - 1, -1, -1):
            y[i] = (self.g[i] - R[i, i + 1:] @ y[i + 1:]) / R[i, i]
        return y


def hessenberg_lsq(h, beta):
    """Minimize ``||beta e1 - h y||_2`` for an ``(m+1) x m`` Hessenberg ``h``.

    Returns
    -------
    y : ndarray, shape (m,)
    residual_norm : float

    Raises
    ------
    RankDeficientError
        If a column becomes zero after the preceding rotations.
    """
    h = as_dense(h, "h")
    rows, m = h.shape
    if rows != m + 1:
        raise DimensionError(f"expected an (m+1) x m matrix, got {h.shape}")
    if np.any(np.tril(h, -2) != 0.0):
        raise ValueError("h is not upper Hessenberg")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    lsq = GivensLeastSquares(beta)
    for j in range(m):
        lsq.add_column(h[:j + 2, j])
    return lsq.solve(), lsq.residual_norm


def _check_system(A, b, x0):
    if A.n_rows != A.n_cols:
        raise DimensionError(f"matrix must be square, got {A.shape}")
    b = as_vector(b, "b")
    if b.shape[0] != A.n_rows:
        raise DimensionError(f"b has length {b.shape[0]}, expected {A.n_rows}")
    x0 = np.zeros(A.n_rows) if x0 is None else as_vector(x0, "x0").copy()
    if x0.shape != b.shape:
        raise DimensionError(f"x0 has length {x0.shape[0]}, expected {A.n_rows}")
    return b, x0


def _true_relres(A, b, x, b_norm):
    return float(np.linalg.norm(b - spmv(A, x)) / b_norm)


def _cycle(A, b, x0, factors, tol, budget, ref_norm, cycle=0, offset=0):
    """One GMRES cycle of at most ``budget`` Arnoldi steps from ``x0``."""
    n = A.n_rows
    if factors is None:
        operator = lambda v: spmv(A, v)  # noqa: E731
        r0 = b - spmv(A, x0)
    else:
        operator = lambda v: precond_apply(factors, spmv(A, v))  # noqa: E731
        r0 = precond_apply(factors, b - spmv(A, x0))
    beta = float(np.linalg.norm(r0))
    history = [HistoryEntry(offset, beta, beta / ref_norm, cycle)]
    if beta / ref_norm <= tol or beta == 0.0:
        return SolveReport(x0, history, 0, Status.CONVERGED, peak_basis_columns=0,
                           coefficients=np.zeros(0), beta=beta)

    process = ArnoldiProcess(operator, r0 / beta, min(budget, n))
    lsq = GivensLeastSquares(beta)
    status = Status.BUDGET_EXHAUSTED
    while not process.done:
        h = process.step()
        res = lsq.add_column(h)
        history.append(HistoryEntry(offset + process.m, float(res), float(res / ref_norm), cycle))
        if process.breakdown_step is not None:
            status = Status.BREAKDOWN_CONVERGED
            break
        if res / ref_norm <= tol:
            status = Status.CONVERGED
            break
    y = lsq.solve()
    x = x0 + process.combine(y)
    return SolveReport(x, history, process.m, status,
                       peak_basis_columns=process.stored_columns,
                       basis=process.basis(), coefficients=y, beta=beta)


def _prepare(A, b, config, factors):
    if factors is None and config.preconditioner != "none":
        factors = build_preconditioner(config.preconditioner, A)
    if factors is None:
        return None, float(np.linalg.norm(b))
    return factors, float(np.linalg.norm(precond_apply(factors, b)))


def gmres_solve(A, b, x0=None, config=None, factors=None):
    """Solve ``A x = b`` with full (unrestarted) GMRES.

    Parameters
    ----------
    A : CsrMatrix
    b, x0 : array_like
        Right-hand side and initial guess (zeros if omitted).
    config : SolverConfig
        ``config.restart`` is ignored here; see :func:`gmres_restarted`.
    factors : TriangularFactors, optional
        Pre-built preconditioner; overrides ``config.preconditioner``.

    Returns
    -------
    SolveReport
        Status is ``breakdown_converged`` when the Krylov space became
        invariant, which makes the iterate exact.
    """
    config = config or SolverConfig()
    b, x0 = _check_system(A, b, x0)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return SolveReport(np.zeros_like(b), [HistoryEntry(0, 0.0, 0.0)], 0,
                           Status.CONVERGED, true_relative_residual=0.0, beta=0.0)
    factors, ref_norm = _prepare(A, b, config, factors)
    report = _cycle(A, b, x0, factors, config.tol, config.budget(A.n_rows), ref_norm)
    report.true_relative_residual = _true_relres(A, b, report.solution, b_norm)
    return report


def gmres_restarted(A, b, x0=None, config=None, factors=None):
    """Restarted GMRES(m): cycles of at most ``config.restart`` steps.

    Each cycle starts from the previous cycle's solution, so at most
    ``restart + 1`` basis vectors are held at any time. The history uses
    global iteration numbers and tags each entry with its cycle.
    """
    config = config or SolverConfig()
    if config.restart is None:
        raise ValueError("gmres_restarted needs config.restart")
    b, x = _check_system(A, b, x0)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return SolveReport(np.zeros_like(b), [HistoryEntry(0, 0.0, 0.0)], 0,
                           Status.CONVERGED, true_relative_residual=0.0, beta=0.0)
    factors, ref_norm = _prepare(A, b, config, factors)
    max_it = config.budget(A.n_rows)

    history = []
    total = 0
    peak = 0
    cycle = 0
    beta0 = None
    while True:
        budget = min(config.restart, max_it - total)
        rep = _cycle(A, b, x, factors, config.tol, max(budget, 1), ref_norm,
                     cycle=cycle, offset=total)
        if beta0 is None:
            beta0 = rep.beta
        history.extend(rep.residual_history if cycle == 0 else rep.residual_history[1:])
        total += rep.iterations
        peak = max(peak, rep.peak_basis_columns)
        x = rep.solution
        status = rep.status
        if status.success or total >= max_it or rep.iterations == 0:
            break
        cycle += 1
    if not status.success:
        status = Status.BUDGET_EXHAUSTED
    return SolveReport(x, history, total, status,
                       true_relative_residual=_true_relres(A, b, x, b_norm),
                       peak_basis_columns=peak, basis=rep.basis,
                       coefficients=rep.coefficients, beta=beta0,
                       extras={"cycles": cycle + 1})


class ColumnSolveError(KrylovError):
    """A column of a multi-right-hand-side solve failed."""

    def __init__(self, column, cause):
        super().__init__(f"column {column}: {cause}")
        self.column = column


def gmres_solve_multi(A, B, config=None):
    """Solve ``A X = B`` column by column with :func:`gmres_solve` from zero.

    The preconditioner, if any, is factored once and shared by all columns.
    """
    config = config or SolverConfig()
    B = as_dense(B, "B")
    if B.shape[0] != A.n_rows:
        raise DimensionError(f"B has {B.shape[0]} rows, expected {A.n_rows}")
    factors = None
    if config.preconditioner != "none":
        factors = build_preconditioner(config.preconditioner, A)
    X = np.zeros_like(B)
    for i in range(B.shape[1]):
        try:
            X[:, i] = gmres_solve(A, B[:, i], None, config, factors).solution
        except KrylovError as exc:
            raise ColumnSolveError(i, exc) from exc
    return X


__all__ = ["GivensLeastSquares", "hessenberg_lsq", "gmres_solve", "gmres_restarted",
           "gmres_solve_multi", "ColumnSolveError", "SolverConfig", "SolveReport",
           "Status", "HistoryEntry"]
