"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary and, with ``-s``,
inline) or directly with ``python tests/test_acceptance.py``.
"""

import functools
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_RESULTS, EXAMPLE1_A, EXAMPLE1_B, random_spd  # noqa: E402

from krylov import data_path  # noqa: E402
from krylov.arnoldi import arnoldi_expand, arnoldi_relation_residual  # noqa: E402
from krylov.cg import cg_solve  # noqa: E402
from krylov.gmres import gmres_restarted, gmres_solve, gmres_solve_multi  # noqa: E402
from krylov.generate import diag_dominant, laplacian1d, laplacian2d, spd_random  # noqa: E402
from krylov.mmio import read_matrix_market, read_vector  # noqa: E402
from krylov.oracles import condition_number_spd_oracle, dense_solve_oracle  # noqa: E402
from krylov.precond import ic0, ilu0  # noqa: E402
from krylov.report import SolverConfig, Status  # noqa: E402
from krylov.sparse import CsrMatrix, spmv  # noqa: E402

EXAMPLE1_V = [[0.12, 0.55, 0.82], [0.96, -0.27, 0.037], [0.24, 0.79, -0.56]]
EXAMPLE1_H = [[13, 5.4, -1.6], [7.4, 4.0, 1.1], [0, 2.6, -4.1], [0, 0, 0]]
EXAMPLE2_B = [[1, 2, 5], [8, 3, -3], [2, 9, 8]]
EXAMPLE2_X = [[-2.2, 2.1, 4.8], [1.8, -0.22, -2.6], [-0.59, 0.11, 1.5]]


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_RESULTS[number] = (title, False)
                print(f"FAIL  {number:2d}. {title}")
                raise
            ACCEPTANCE_RESULTS[number] = (title, True)
            print(f"PASS  {number:2d}. {title} ({time.perf_counter() - start:.2f} s)")
        return run
    return wrap


def _corpus():
    """Seeded matrices shared by the Arnoldi and preconditioner checks."""
    mats = [laplacian1d(n) for n in (5, 50, 200)]
    mats += [laplacian2d(n) for n in (16, 100, 196)]
    mats += [diag_dominant(n, seed=s) for s, n in enumerate((10, 60, 150, 200))]
    mats += [diag_dominant(n, seed=s, symmetric=True) for s, n in enumerate((12, 80, 200))]
    mats += [spd_random(n, seed=s) for s, n in enumerate((20, 100, 200))]
    mats.append(CsrMatrix.from_dense(EXAMPLE1_A))
    return mats


@criterion(1, "3x3 worked example: golden GMRES run")
def test_example1_golden():
    A = CsrMatrix.from_dense(EXAMPLE1_A)
    rep = gmres_solve(A, EXAMPLE1_B, np.zeros(3), SolverConfig(max_iterations=3))
    assert abs(rep.beta - 8.31) <= 0.01
    assert abs(rep.basis.h[0, 0] - 13.06) <= 0.01
    np.testing.assert_allclose(rep.basis.v, EXAMPLE1_V, rtol=0, atol=0.05)
    np.testing.assert_allclose(rep.basis.h, EXAMPLE1_H, rtol=0, atol=0.1)
    np.testing.assert_allclose(rep.coefficients, [1.36, -2.16, -1.4], rtol=0, atol=0.05)
    np.testing.assert_allclose(rep.solution, [-2.18, 1.84, -0.6], rtol=0, atol=0.01)


@criterion(2, "3x3 worked example: golden multi-RHS solve")
def test_example2_golden():
    X = gmres_solve_multi(CsrMatrix.from_dense(EXAMPLE1_A), EXAMPLE2_B)
    np.testing.assert_allclose(X, EXAMPLE2_X, rtol=0, atol=0.05)


@criterion(3, "large-system surrogate: diag_dominant n=2000 and dense restarted run")
def test_large_surrogate():
    start = time.perf_counter()
    A = diag_dominant(2000, seed=2000)
    b = np.ones(2000)
    rep = gmres_solve(A, b, None, SolverConfig(tol=1e-7))
    assert rep.status.success
    true = np.linalg.norm(b - spmv(A, rep.solution)) / np.linalg.norm(b)
    assert true <= 1e-7

    # dense integer matrix with entries 1..10, restarted; convergence not required
    rng = np.random.default_rng(100)
    dense = rng.integers(1, 11, size=(100, 100)).astype(float)
    D = CsrMatrix.from_dense(dense)
    bd = dense @ np.ones(100)
    rep = gmres_restarted(D, bd, None, SolverConfig(tol=1e-1, max_iterations=90, restart=10))
    assert rep.status in (Status.CONVERGED, Status.BUDGET_EXHAUSTED, Status.BREAKDOWN_CONVERGED)
    assert rep.iterations <= 90 and rep.peak_basis_columns <= 11
    res = [h.absolute_residual for h in rep.residual_history]
    assert all(r1 <= r0 * (1 + 1e-12) for r0, r1 in zip(res, res[1:]))
    assert np.isfinite(rep.solution).all()
    assert time.perf_counter() - start < 10


@criterion(4, "oracle equivalence for GMRES and CG on 100 seeded systems each")
def test_oracle_equivalence():
    start = time.perf_counter()
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 31))
        dense = rng.standard_normal((n, n))
        while np.linalg.cond(dense) > 1e6:
            dense = rng.standard_normal((n, n))
        b = rng.standard_normal(n)
        rep = gmres_solve(CsrMatrix.from_dense(dense), b, None,
                          SolverConfig(tol=1e-12, max_iterations=n))
        x_ref = dense_solve_oracle(dense, b)
        assert np.abs(rep.solution - x_ref).max() <= 1e-8, (seed, n)
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(2, 31))
        S = random_spd(rng, n)
        b = rng.standard_normal(n)
        rep = cg_solve(CsrMatrix.from_dense(S), b, None, SolverConfig(tol=1e-12))
        assert rep.status.success
        assert np.abs(rep.solution - dense_solve_oracle(S, b)).max() <= 1e-8, (seed, n)
    assert time.perf_counter() - start < 30


@criterion(5, "Arnoldi orthonormality and relation residual on the seeded corpus")
def test_arnoldi_invariants():
    for k, A in enumerate(_corpus()):
        rng = np.random.default_rng(k)
        n = A.n_rows
        for m in sorted({1, min(n, 10), min(n, 50)}):
            v1 = rng.standard_normal(n)
            basis = arnoldi_expand(A, v1 / np.linalg.norm(v1), m)
            V = basis.v
            assert np.abs(V.T @ V - np.eye(V.shape[1])).max() <= 1e-10, (k, m)
            assert arnoldi_relation_residual(A, basis) <= 1e-10, (k, m)
            assert np.allclose(np.tril(basis.h, -2), 0)


def _spd_with_condition(rng, n, kappa):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (Q * np.geomspace(1.0, kappa, n)) @ Q.T


@criterion(6, "CG A-norm error decrease and condition-number envelope")
def test_cg_theory():
    cases = []
    for seed in range(12):
        rng = np.random.default_rng(600 + seed)
        n = int(rng.integers(5, 101))
        if seed % 2:
            S = random_spd(rng, n)
        else:
            S = _spd_with_condition(rng, n, 10 ** rng.uniform(0, 4))
        cases.append((S, rng.standard_normal(n)))
    for S, b in cases:
        kappa = condition_number_spd_oracle(S)
        q = (np.sqrt(kappa) - 1) / (np.sqrt(kappa) + 1)
        x_star = dense_solve_oracle(S, b)
        states = []
        rep = cg_solve(CsrMatrix.from_dense(S), b, None, SolverConfig(tol=1e-10),
                       callback=states.append)
        assert rep.status.success
        e0 = np.sqrt(x_star @ S @ x_star)
        errs = [e0]
        for s in states:
            e = np.sqrt((s.x - x_star) @ S @ (s.x - x_star))
            assert e / e0 <= 2 * q ** s.k + 1e-12
            errs.append(e)
        assert all(e1 < e0_ for e0_, e1 in zip(errs, errs[1:]))


@criterion(7, "ILU(0)/IC(0) exactness on no-fill matrices and zero-fill pattern")
def test_preconditioner_exactness():
    for n in (3, 20, 200):
        A = laplacian1d(n)
        dense = A.to_dense()
        f = ilu0(A)
        L, U = f.lower.to_dense(), f.upper.to_dense()
        # exact LU of a tridiagonal matrix by elimination without pivoting
        Lx, Ux = np.eye(n), dense.copy()
        for k in range(n - 1):
            Lx[k + 1, k] = Ux[k + 1, k] / Ux[k, k]
            Ux[k + 1] -= Lx[k + 1, k] * Ux[k]
        assert np.abs(L - Lx).max() <= 1e-12 and np.abs(U - Ux).max() <= 1e-12
        C = ic0(A).lower.to_dense()
        Cx = Lx * np.sqrt(np.diag(Ux))
        assert np.abs(C - Cx).max() <= 1e-12
        b = np.arange(1.0, n + 1)
        g = gmres_solve(A, b, None, SolverConfig(tol=1e-10, preconditioner="ilu0"))
        c = cg_solve(A, b, None, SolverConfig(tol=1e-10, preconditioner="ic0"))
        assert g.iterations == 1 and g.status.success
        assert c.iterations == 1 and c.status.success
    for A in _corpus():
        f = ilu0(A)
        assert f.lower.pattern() | f.upper.pattern() == A.pattern()
        assert f.lower.nnz + f.upper.nnz <= A.nnz + A.n_rows
        if A.equals(A.transpose()):
            g = ic0(A)
            assert g.lower.pattern() <= A.pattern()


@criterion(8, "preconditioning strictly reduces iterations (GMRES+ILU(0), CG+IC(0))")
def test_acceleration():
    start = time.perf_counter()
    systems = {
        "laplacian2d 900": (laplacian2d(900), laplacian2d(900)),
        "diag_dominant 1000": (diag_dominant(1000, seed=7),
                               diag_dominant(1000, seed=7, symmetric=True)),
    }
    for name, (A_gmres, A_cg) in systems.items():
        for A, method, pc in ((A_gmres, gmres_solve, "ilu0"), (A_cg, cg_solve, "ic0")):
            b = np.ones(A.n_rows)
            plain = method(A, b, None, SolverConfig(tol=1e-7))
            pre = method(A, b, None, SolverConfig(tol=1e-7, preconditioner=pc))
            assert plain.status.success and pre.status.success, name
            assert pre.iterations < plain.iterations, (name, pc)
    assert time.perf_counter() - start < 10


@criterion(9, "restart equivalence and peak basis storage")
def test_restart():
    for seed in range(10):
        rng = np.random.default_rng(900 + seed)
        n = int(rng.integers(3, 40))
        dense = rng.standard_normal((n, n)) + np.sqrt(n) * 2 * np.eye(n)
        A = CsrMatrix.from_dense(dense)
        b = rng.standard_normal(n)
        full = gmres_solve(A, b, None, SolverConfig(tol=1e-10))
        rest = gmres_restarted(A, b, None, SolverConfig(tol=1e-10, restart=full.iterations + 1))
        assert np.abs(rest.solution - full.solution).max() <= 1e-12
        assert rest.iterations == full.iterations
    A = laplacian1d(1000)
    rep = gmres_restarted(A, np.ones(1000), None,
                          SolverConfig(tol=1e-7, restart=20, max_iterations=200))
    assert rep.peak_basis_columns == 21


@criterion(10, "CLI exit codes, CSV schema and determinism")
def test_cli_contract(tmp_path=None):
    import tempfile
    tmp = Path(tmp_path or tempfile.mkdtemp())

    def krylov(*args):
        return subprocess.run([sys.executable, "-m", "krylov", *map(str, args)],
                              capture_output=True, text=True)

    matrix, rhs = data_path("example1.mtx"), data_path("example1_rhs.txt")
    p = krylov("solve", "--matrix", matrix, "--rhs", rhs, "--out", tmp / "x.txt",
               "--history", tmp / "h.csv")
    assert p.returncode == 0, p.stderr
    summary = p.stderr.strip().splitlines()[-1]
    relres = float(summary.split("relres=")[1].split()[0])
    assert relres <= 1e-10 and "iters=3" in summary
    np.testing.assert_allclose(read_vector(tmp / "x.txt"), [-2.18, 1.84, -0.6], atol=1e-2)

    lines = (tmp / "h.csv").read_text().splitlines()
    assert lines[0] == "iteration,cycle,absolute_residual,relative_residual"
    its = [int(line.split(",")[0]) for line in lines[1:]]
    assert its == sorted(set(its))
    for line in lines[1:]:
        for field in line.split(",")[2:]:
            assert float(field) == float(repr(float(field)))

    p = krylov("solve", "--matrix", matrix, "--rhs", tmp / "missing.txt")
    assert p.returncode == 1 and "missing.txt" in p.stderr
    p = krylov("solve", "--matrix", matrix, "--rhs", rhs, "--method", "cg")
    assert p.returncode == 1 and "matrix not symmetric" in p.stderr

    gen = [krylov("generate", "diag_dominant", "-n", 100, "--seed", 7, "--out", tmp / f"d{i}.mtx")
           for i in (1, 2)]
    assert all(g.returncode == 0 for g in gen)
    assert (tmp / "d1.mtx").read_bytes() == (tmp / "d2.mtx").read_bytes()
    p = krylov("solve", "--matrix", tmp / "d1.mtx", "--maxit", 2, "--tol", 1e-14,
               "--out", tmp / "y.txt")
    assert p.returncode == 2

    runs = []
    for i in (1, 2):
        hdir = tmp / f"cmp{i}"
        p = krylov("compare", "--matrix", tmp / "d1.mtx", "--variants",
                   "gmres+none,gmres+ilu0,gmres_restarted+none", "--restart", 10,
                   "--history", hdir)
        assert p.returncode == 0, p.stderr
        runs.append((p.stdout, sorted((f.name, f.read_bytes()) for f in hdir.glob("*.csv"))))
    assert runs[0] == runs[1] and len(runs[0][1]) == 3
    assert read_matrix_market(tmp / "d1.mtx").shape == (100, 100)


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except Exception:
                failed += 1
    sys.exit(1 if failed else 0)
