"""Solver configuration and result records shared by GMRES and CG."""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

PRECONDITIONERS = ("none", "ilu0", "ic0")


class Status(str, Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"
    BREAKDOWN_CONVERGED = "breakdown_converged"
    PRECONDITIONER_FAILURE = "preconditioner_failure"

    def __str__(self):
        return self.value

    @property
    def success(self):
        return self in (Status.CONVERGED, Status.BREAKDOWN_CONVERGED)


class HistoryEntry(NamedTuple):
    iteration: int
    absolute_residual: float
    relative_residual: float
    cycle: int = 0


@dataclass(frozen=True)
class SolverConfig:
    """Stopping and preconditioning parameters.

    ``tol`` bounds the relative residual. ``max_iterations=None`` means
    ``10 * n``. ``restart`` is the cycle length for restarted GMRES.
    """

    tol: float = 1e-7
    max_iterations: int | None = None
    restart: int | None = None
    preconditioner: str = "none"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.restart is not None and self.restart < 1:
            raise ValueError("restart must be at least 1")
        if self.preconditioner not in PRECONDITIONERS:
            raise ValueError(f"preconditioner must be one of {PRECONDITIONERS}")

    def budget(self, n):
        return self.max_iterations if self.max_iterations is not None else 10 * n


@dataclass
class SolveReport:
    """Outcome of a solve.

    ``residual_history[0]`` is the initial residual (iteration 0). When a
    preconditioner is active the history tracks ``M^{-1} r`` relative to
    ``M^{-1} b``; ``true_relative_residual`` is always ``||b - A x|| / ||b||``
    evaluated once at exit.
    """

    solution: np.ndarray
    residual_history: list[HistoryEntry]
    iterations: int
    status: Status
    true_relative_residual: float = float("nan")
    peak_basis_columns: int = 0
    basis: object = None
    coefficients: np.ndarray | None = None
    beta: float = float("nan")
    extras: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.status.success

    @property
    def final_relative_residual(self):
        return self.residual_history[-1].relative_residual
