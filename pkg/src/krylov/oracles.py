"""Small dense reference computations.

These are deliberately independent of the Krylov code paths: Gaussian
elimination with partial pivoting for solutions, cyclic Jacobi rotations for
symmetric eigenvalues. Both refuse matrices larger than ``MAX_ORACLE_N``.
"""

import numpy as np

from krylov.errors import (DimensionError, IndefiniteMatrixError,
                           NotSymmetricError, SingularMatrixError)
from krylov.sparse import CsrMatrix, as_dense, as_vector

MAX_ORACLE_N = 512


def _square(A):
    if isinstance(A, CsrMatrix):
        A = A.to_dense()
    A = as_dense(A)
    n, m = A.shape
    if n != m:
        raise DimensionError(f"matrix must be square, got {A.shape}")
    if n > MAX_ORACLE_N:
        raise ValueError(f"oracle limited to n <= {MAX_ORACLE_N}, got n = {n}")
    return A


def dense_solve_oracle(A, b):
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If a pivot is below ``n * eps * max|A|``.
    """
    A = _square(A).copy()
    b = as_vector(b, "b").copy()
    n = A.shape[0]
    if b.shape[0] != n:
        raise DimensionError(f"b has length {b.shape[0]}, expected {n}")
    scale = np.abs(A).max() if n else 0.0
    threshold = n * np.finfo(float).eps * scale
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) <= threshold:
            raise SingularMatrixError(f"matrix is singular to working precision (column {k})")
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        factors = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(factors, A[k, k:])
        b[k + 1:] -= factors * b[k]
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


def jacobi_eigenvalues(A, tol=1e-10, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps continue until the off-diagonal Frobenius norm drops below
    ``1e-15 * ||A||_F``; if that is not reached the result is still accepted
    when below ``tol * ||A||_F``.
    """
    A = _square(A).copy()
    n = A.shape[0]
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max(initial=0.0))):
        i, j = np.unravel_index(np.argmax(np.abs(A - A.T)), A.shape)
        raise NotSymmetricError(f"matrix not symmetric at ({i}, {j})", (int(i), int(j)))
    A = 0.5 * (A + A.T)
    norm = np.linalg.norm(A) or 1.0

    def off(M):
        return np.linalg.norm(M - np.diag(np.diag(M)))

    for _ in range(max_sweeps):
        if off(A) <= 1e-15 * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
    if off(A) > tol * norm:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.sort(np.diag(A))


def condition_number_spd_oracle(A):
    """Spectral condition number ``lambda_max / lambda_min`` of an SPD matrix.

    Raises
    ------
    NotSymmetricError
        If ``A`` differs from its transpose by more than 1e-12 (relative).
    IndefiniteMatrixError
        If an eigenvalue is not positive.
    """
    lam = jacobi_eigenvalues(A)
    if lam.size == 0:
        raise DimensionError("empty matrix")
    if lam[0] <= 0.0:
        raise IndefiniteMatrixError(f"non-positive eigenvalue {lam[0]:.3e}")
    return float(lam[-1] / lam[0])
