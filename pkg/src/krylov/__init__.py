"""Sparse Krylov solvers: Arnoldi, GMRES, restarted GMRES, CG, ILU(0)/IC(0)."""

from importlib.resources import files

from krylov.arnoldi import KrylovBasis, arnoldi_expand, arnoldi_relation_residual
from krylov.cg import CgState, cg_solve
from krylov.gmres import (gmres_restarted, gmres_solve, gmres_solve_multi,
                          hessenberg_lsq)
from krylov.mmio import parse_matrix_market, read_matrix_market, write_matrix_market
from krylov.oracles import condition_number_spd_oracle, dense_solve_oracle
from krylov.precond import TriangularFactors, ic0, ilu0, precond_apply
from krylov.report import HistoryEntry, SolveReport, SolverConfig, Status
from krylov.sparse import CsrMatrix, spmv

__version__ = "0.1.0"


def data_path(name):
    """Path of a bundled data file such as ``example1.mtx``."""
    return files("krylov") / "data" / name


__all__ = [
    "CsrMatrix", "spmv", "parse_matrix_market", "read_matrix_market", "write_matrix_market",
    "dense_solve_oracle", "condition_number_spd_oracle",
    "KrylovBasis", "arnoldi_expand", "arnoldi_relation_residual",
    "SolverConfig", "SolveReport", "Status", "HistoryEntry",
    "hessenberg_lsq", "gmres_solve", "gmres_solve_multi", "gmres_restarted",
    "CgState", "cg_solve",
    "TriangularFactors", "ilu0", "ic0", "precond_apply",
    "data_path",
]
