"""Dense SDP solver for ``maximize c @ y`` subject to ``A0 + sum_i y_i A_i >= 0``."""

from .linalg import AsymmetricMatrix, cholesky_solve, sym_eigenvalues, try_cholesky
from .problem import ProblemError, SdpProblem, dump_problem, load_problem
from .solver import InteriorPointSolver, SolveResult, SolverOptions, Status, solve

__all__ = [
    "AsymmetricMatrix",
    "InteriorPointSolver",
    "ProblemError",
    "SdpProblem",
    "SolveResult",
    "SolverOptions",
    "Status",
    "cholesky_solve",
    "dump_problem",
    "load_problem",
    "solve",
    "sym_eigenvalues",
    "try_cholesky",
]
