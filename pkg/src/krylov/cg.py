"""Conjugate gradients for symmetric positive definite systems.

Uses the gradient convention ``g = A x - b`` throughout:

    d_0     = -z_0
    alpha_k = -(g_k . d_k) / (d_k . A d_k)
    x_k+1   = x_k + alpha_k d_k
    g_k+1   = g_k + alpha_k A d_k
    beta_k+1 = (z_k+1 . A d_k) / (d_k . A d_k)
    d_k+1   = -z_k+1 + beta_k+1 d_k

with ``z = g`` unpreconditioned and ``z = M^{-1} g`` otherwise. Applying
``M^{-1}`` this way keeps the iteration symmetric, unlike running plain CG on
``M^{-1} A``.
"""

from dataclasses import dataclass

import numpy as np

from krylov.errors import DimensionError, IndefiniteMatrixError, NotSymmetricError
from krylov.precond import build_preconditioner, precond_apply
from krylov.report import HistoryEntry, SolveReport, SolverConfig, Status
from krylov.sparse import as_vector, spmv, symmetry_violation


@dataclass(frozen=True)
class CgState:
    """Snapshot passed to the ``callback`` of :func:`cg_solve` after step ``k``.

    ``x`` and ``g`` are the new iterate and gradient, ``d`` the direction that
    produced them, ``alpha`` its step length and ``beta_cg`` the coefficient
    of the next direction (NaN on the final step).
    """

    x: np.ndarray
    g: np.ndarray
    d: np.ndarray
    alpha: float
    beta_cg: float
    k: int


def cg_solve(A, b, x0=None, config=None, factors=None, callback=None):
    """Solve an SPD system by (preconditioned) conjugate gradients.

    Stops when ``||g_k|| / ||b|| <= config.tol`` or after
    ``config.max_iterations`` steps.

    Raises
    ------
    NotSymmetricError
        ``A`` differs from ``A^T`` by more than 1e-10 (relative) somewhere.
    IndefiniteMatrixError
        A direction with ``d^T A d <= 0`` was met.
    PreconditionerError
        Building or applying the preconditioner failed.
    """
    config = config or SolverConfig()
    if A.n_rows != A.n_cols:
        raise DimensionError(f"matrix must be square, got {A.shape}")
    b = as_vector(b, "b")
    n = A.n_rows
    if b.shape[0] != n:
        raise DimensionError(f"b has length {b.shape[0]}, expected {n}")
    x = np.zeros(n) if x0 is None else as_vector(x0, "x0").copy()
    if x.shape[0] != n:
        raise DimensionError(f"x0 has length {x.shape[0]}, expected {n}")
    bad = symmetry_violation(A)
    if bad is not None:
        raise NotSymmetricError(f"matrix not symmetric at ({bad[0] + 1}, {bad[1] + 1})", bad)

    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return SolveReport(np.zeros(n), [HistoryEntry(0, 0.0, 0.0)], 0, Status.CONVERGED,
                           true_relative_residual=0.0)
    if factors is None and config.preconditioner != "none":
        factors = build_preconditioner(config.preconditioner, A)
    precondition = (lambda v: v) if factors is None else (lambda v: precond_apply(factors, v))

    g = spmv(A, x) - b
    g_norm = float(np.linalg.norm(g))
    history = [HistoryEntry(0, g_norm, g_norm / b_norm)]
    status = Status.BUDGET_EXHAUSTED
    if g_norm / b_norm <= config.tol:
        status = Status.CONVERGED
    else:
        d = -precondition(g)
        for k in range(1, config.budget(n) + 1):
            Ad = spmv(A, d)
            dAd = float(d @ Ad)
            if not dAd > 0.0:
                raise IndefiniteMatrixError(f"d^T A d = {dAd:.3e} <= 0 at iteration {k}")
            alpha = -float(g @ d) / dAd
            x = x + alpha * d
            g = g + alpha * Ad
            g_norm = float(np.linalg.norm(g))
            history.append(HistoryEntry(k, g_norm, g_norm / b_norm))
            if g_norm / b_norm <= config.tol:
                status = Status.CONVERGED
                if callback is not None:
                    callback(CgState(x, g, d, alpha, float("nan"), k))
                break
            z = precondition(g)
            beta = float(z @ Ad) / dAd
            if callback is not None:
                callback(CgState(x, g, d, alpha, beta, k))
            d = -z + beta * d

    true_res = float(np.linalg.norm(b - spmv(A, x)) / b_norm)
    return SolveReport(x, history, len(history) - 1, status, true_relative_residual=true_res)
