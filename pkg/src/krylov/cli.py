"""``krylov`` command line: solve, generate and compare.

Exit codes: 0 converged, 2 iteration budget exhausted, 1 usage, I/O or
factorization errors.
"""

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from krylov import generate as gen
from krylov.cg import cg_solve
from krylov.errors import (IndefiniteMatrixError, KrylovError, MatrixMarketError,
                           NotSymmetricError, PreconditionerError)
from krylov.gmres import gmres_restarted, gmres_solve
from krylov.mmio import format_matrix_market, format_vector, read_matrix_market, read_vector
from krylov.report import PRECONDITIONERS, SolverConfig, Status

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2

METHODS = ("gmres", "gmres_restarted", "cg")
CSV_HEADER = "iteration,cycle,absolute_residual,relative_residual"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    matrix_path: Path
    rhs_path: Path | None = None
    method: str = "gmres"
    restart: int | None = None
    precond: str = "none"
    tol: float = 1e-7
    max_iterations: int | None = None
    history_path: Path | None = None
    seed: int | None = None

    def validate(self):
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.precond not in PRECONDITIONERS:
            raise UsageError(f"unknown preconditioner {self.precond!r}")
        if (self.method == "gmres_restarted") != (self.restart is not None):
            raise UsageError("--restart is required with gmres_restarted and only valid there")
        if self.restart is not None and self.restart < 1:
            raise UsageError("--restart must be at least 1")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise UsageError("--maxit must be at least 1")
        for label, path in (("matrix", self.matrix_path), ("rhs", self.rhs_path)):
            if path is not None and not os.access(path, os.R_OK):
                raise UsageError(f"cannot read {label} file {path}")


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".",
                               prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_history(history):
    lines = [CSV_HEADER]
    for h in history:
        lines.append(f"{h.iteration},{h.cycle},{h.absolute_residual:.17g},{h.relative_residual:.17g}")
    return "\n".join(lines) + "\n"


def load_system(config):
    try:
        A = read_matrix_market(config.matrix_path)
    except MatrixMarketError as exc:
        raise UsageError(f"{config.matrix_path}: {exc}") from exc
    if A.n_rows != A.n_cols:
        raise UsageError(f"{config.matrix_path}: matrix must be square, got {A.shape}")
    if config.rhs_path is None:
        b = np.ones(A.n_rows)
    else:
        try:
            b = read_vector(config.rhs_path)
        except MatrixMarketError as exc:
            raise UsageError(f"{config.rhs_path}: {exc}") from exc
        if b.shape[0] != A.n_rows:
            raise UsageError(f"{config.rhs_path}: rhs has length {b.shape[0]}, expected {A.n_rows}")
    return A, b


def run_method(A, b, method, precond, tol, max_iterations, restart=None):
    config = SolverConfig(tol=tol, max_iterations=max_iterations,
                          restart=restart if method == "gmres_restarted" else None,
                          preconditioner=precond)
    if method == "cg":
        return cg_solve(A, b, None, config)
    if method == "gmres_restarted":
        return gmres_restarted(A, b, None, config)
    return gmres_solve(A, b, None, config)


def describe_failure(exc):
    if isinstance(exc, NotSymmetricError):
        i, j = exc.pair
        return f"matrix not symmetric: a[{i + 1},{j + 1}] != a[{j + 1},{i + 1}]"
    if isinstance(exc, PreconditionerError):
        return f"preconditioner failure: {exc}"
    if isinstance(exc, IndefiniteMatrixError):
        return f"matrix not positive definite: {exc}"
    return str(exc)


def exit_code(status):
    return EXIT_OK if status.success else EXIT_BUDGET


def cmd_solve(config, out_path=None, plot_path=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config.validate()
        A, b = load_system(config)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    try:
        report = run_method(A, b, config.method, config.precond, config.tol,
                            config.max_iterations, config.restart)
    except KrylovError as exc:
        print(f"error: {describe_failure(exc)}", file=stderr)
        return EXIT_ERROR

    try:
        if out_path is None:
            stdout.write(format_vector(report.solution))
        else:
            atomic_write(out_path, format_vector(report.solution))
        if config.history_path is not None:
            atomic_write(config.history_path, format_history(report.residual_history))
        if plot_path is not None:
            from krylov.plotting import plot_histories
            plot_histories({f"{config.method}+{config.precond}": report.residual_history},
                           plot_path, title=Path(config.matrix_path).name)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=stderr)
        return EXIT_ERROR
    print(f"method={config.method} precond={config.precond} iters={report.iterations} "
          f"relres={report.true_relative_residual:.6e} status={report.status}", file=stderr)
    return exit_code(report.status)


def cmd_generate(kind, n, seed, out, stderr=None):
    stderr = stderr or sys.stderr
    try:
        A, symmetric = gen.generate(kind, n, seed)
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    comment = f"generated by krylov: kind={kind} n={n} seed={seed}"
    try:
        atomic_write(out, format_matrix_market(A, symmetric=symmetric, comment=comment))
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=stderr)
        return EXIT_ERROR
    return EXIT_OK


def parse_variant(text):
    method, _, precond = text.strip().partition("+")
    precond = precond or "none"
    if method not in METHODS:
        raise UsageError(f"unknown method in variant {text!r}")
    if precond not in PRECONDITIONERS:
        raise UsageError(f"unknown preconditioner in variant {text!r}")
    return method, precond


def cmd_compare(config, variants, history_dir=".", plot=False, stdout=None, stderr=None):
    """Run every ``(method, precond)`` variant on one system.

    Writes ``<history_dir>/<method>+<precond>.csv`` per variant and prints a
    ``variant,iters,relres,status`` table in input order.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        parsed = [parse_variant(v) for v in variants]
        if not parsed:
            raise UsageError("no variants given")
        if any(m == "gmres_restarted" for m, _ in parsed) and config.restart is None:
            raise UsageError("--restart is required for gmres_restarted variants")
        probe = RunConfig(config.matrix_path, config.rhs_path, "gmres", None, "none",
                          config.tol, config.max_iterations)
        probe.validate()
        A, b = load_system(config)
        history_dir = Path(history_dir)
        history_dir.mkdir(parents=True, exist_ok=True)
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR

    rows = ["variant,iters,relres,status"]
    statuses = []
    histories = {}
    for method, precond in parsed:
        name = f"{method}+{precond}"
        try:
            report = run_method(A, b, method, precond, config.tol, config.max_iterations,
                                config.restart)
        except KrylovError as exc:
            status = "preconditioner_failure" if isinstance(exc, PreconditionerError) else "failed"
            print(f"{name}: {describe_failure(exc)}", file=stderr)
            rows.append(f"{name},,nan,{status}")
            statuses.append(None)
            continue
        try:
            atomic_write(history_dir / f"{name}.csv", format_history(report.residual_history))
        except OSError as exc:
            print(f"error: cannot write history for {name}: {exc}", file=stderr)
            return EXIT_ERROR
        histories[name] = report.residual_history
        statuses.append(report.status)
        rows.append(f"{name},{report.iterations},{report.true_relative_residual:.6e},{report.status}")
    stdout.write("\n".join(rows) + "\n")

    if plot and histories:
        from krylov.plotting import plot_histories
        plot_histories(histories, history_dir / "convergence.png",
                       title=Path(config.matrix_path).name)

    if any(s is not None and s.success for s in statuses):
        return EXIT_OK
    if any(s is Status.BUDGET_EXHAUSTED for s in statuses):
        return EXIT_BUDGET
    return EXIT_ERROR


def _add_run_flags(p):
    p.add_argument("--matrix", required=True, type=Path, help="Matrix Market file")
    p.add_argument("--rhs", type=Path, help="right-hand side (.mtx or one value per line); default all ones")
    p.add_argument("--restart", type=int, help="cycle length for gmres_restarted")
    p.add_argument("--tol", type=float, default=1e-7, help="relative residual tolerance")
    p.add_argument("--maxit", type=int, help="iteration budget (default 10*n)")
    p.add_argument("--seed", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="krylov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one system")
    _add_run_flags(p)
    p.add_argument("--method", default="gmres", choices=METHODS)
    p.add_argument("--precond", default="none", choices=PRECONDITIONERS)
    p.add_argument("--history", type=Path, help="write the residual history CSV here")
    p.add_argument("--out", type=Path, help="write the solution here instead of stdout")
    p.add_argument("--plot", type=Path, help="render the convergence plot to this file")

    p = sub.add_parser("generate", help="write a test matrix")
    p.add_argument("kind", choices=gen.KINDS)
    p.add_argument("-n", "--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("compare", help="run several method+precond variants on one system")
    _add_run_flags(p)
    p.add_argument("--variants", required=True,
                   help="comma-separated list such as gmres+none,gmres+ilu0,cg+ic0")
    p.add_argument("--history", type=Path, default=Path("."),
                   help="directory for the per-variant CSV files")
    p.add_argument("--plot", action="store_true", help="also write convergence.png to the history directory")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    if args.command == "generate":
        return cmd_generate(args.kind, args.n, args.seed, args.out)
    config = RunConfig(matrix_path=args.matrix, rhs_path=args.rhs,
                       method=getattr(args, "method", "gmres"), restart=args.restart,
                       precond=getattr(args, "precond", "none"), tol=args.tol,
                       max_iterations=args.maxit, seed=args.seed)
    if args.command == "solve":
        config.history_path = args.history
        return cmd_solve(config, out_path=args.out, plot_path=args.plot)
    variants = [v for v in args.variants.split(",") if v.strip()]
    return cmd_compare(config, variants, history_dir=args.history, plot=args.plot)


if __name__ == "__main__":
    sys.exit(main())
