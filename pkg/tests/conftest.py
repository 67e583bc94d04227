import numpy as np
import pytest

from krylov.sparse import CsrMatrix

EXAMPLE1_A = [[1.0, 4.0, 7.0], [2.0, 9.0, 7.0], [5.0, 8.0, 3.0]]
EXAMPLE1_B = [1.0, 8.0, 2.0]


@pytest.fixture
def example1():
    return CsrMatrix.from_dense(EXAMPLE1_A), np.array(EXAMPLE1_B)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_sparse(rng, n, m=None, density=0.3):
    m = n if m is None else m
    dense = rng.standard_normal((n, m)) * (rng.random((n, m)) < density)
    return CsrMatrix.from_dense(dense), dense


def random_spd(rng, n):
    M = rng.standard_normal((n, n))
    return M.T @ M + np.eye(n)


# criterion number -> (title, passed); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {number:2d}. {title}")
