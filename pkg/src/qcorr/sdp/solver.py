"""Primal-dual interior-point method for a single linear matrix inequality.

Problem form (``F(y) = A0 + sum_i y_i A_i``)::

    primal   maximize  c @ y           subject to  F(y) >= 0
    dual     minimize  <A0, Z>         subject to  <A_i, Z> = -c_i,  Z >= 0

Weak duality: ``<A0, Z> - c @ y = <F(y), Z> >= 0`` for feasible pairs.

The iteration is an infeasible-start path-following method with Mehrotra's
predictor-corrector and the HKM search direction.  The slack ``S`` (which
converges to ``F(y)``) and the dual matrix ``Z`` stay positive definite
through fraction-to-boundary step lengths.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .linalg import cholesky_solve, solve_lower, sym_eigenvalues, try_cholesky
from .problem import SdpProblem

__all__ = ["Status", "SolverOptions", "SolveResult", "InteriorPointSolver", "solve"]

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERS = "MaxIters"
    NUMERICAL_FAILURE = "NumericalFailure"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class SolverOptions:
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iters: int = 200
    step_fraction: float = 0.98
    # objective magnitude treated as divergence
    unbounded_limit: float = 1e9

    def __post_init__(self) -> None:
        if min(self.gap_tol, self.feas_tol, self.unbounded_limit) <= 0 or self.max_iters < 1:
            raise ValueError("solver tolerances and limits must be positive")
        if not 0 < self.step_fraction < 1:
            raise ValueError("step_fraction must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class SolveResult:
    status: Status
    objective: float
    y: np.ndarray
    dual_objective: float
    gap: float
    iterations: int
    min_eig: float
    Z: np.ndarray = field(repr=False)
    primal_infeasibility: float = 0.0
    dual_infeasibility: float = 0.0
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.MAX_ITERS)


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _max_step(low: np.ndarray, d: np.ndarray) -> float:
    """Largest ``alpha`` with ``X + alpha d`` PSD, where ``X = low @ low.T``."""
    w = solve_lower(low, solve_lower(low, d).T)
    lam = np.linalg.eigvalsh(_sym(w))[0]
    return np.inf if lam >= 0 else -1.0 / lam


class InteriorPointSolver:
    """Stateful solver; one instance per concurrent solve."""

    REG_START = 1e-12
    REG_MAX = 1e-8

    def __init__(self, options: SolverOptions | None = None):
        self.options = options or SolverOptions()

    def _factor_schur(self, m: np.ndarray) -> np.ndarray | None:
        low = try_cholesky(m)
        reg = self.REG_START
        scale = max(1.0, float(np.max(np.diag(m), initial=0.0)))
        while low is None and reg <= self.REG_MAX * (1 + 1e-9):
            low = try_cholesky(m + reg * scale * np.eye(m.shape[0]))
            reg *= 10
        return low

    def solve(self, problem: SdpProblem) -> SolveResult:
        opt = self.options
        n, m = problem.dim, problem.num_vars
        a0, c = problem.A0, problem.c
        a = problem.A
        a_flat = a.reshape(m, n * n)
        eye = np.eye(n)

        tau = 1.0 + float(np.max(np.abs(a0), initial=0.0))
        y = np.zeros(m)
        s = tau * eye
        z = tau * eye
        norm_a0 = np.linalg.norm(a0)
        norm_c = np.linalg.norm(c)

        status = Status.MAX_ITERS
        message = ""
        it = 0
        last = (y, s, z)
        for it in range(opt.max_iters + 1):
            f = problem.matrix(y)
            rp = f - s
            rd = -c - a_flat @ z.reshape(-1)
            pobj = float(c @ y)
            dobj = float(np.sum(a0 * z))
            pinf = np.linalg.norm(rp) / (1 + norm_a0)
            dinf = np.linalg.norm(rd) / (1 + norm_c)
            gap = abs(dobj - pobj)
            mu = float(np.sum(s * z)) / n
            log.debug("it=%d pobj=%.10g dobj=%.10g pinf=%.2e dinf=%.2e mu=%.2e", it, pobj, dobj, pinf, dinf, mu)

            if not np.isfinite([pobj, dobj, mu]).all() or mu > 1e15 * tau:
                status = Status.NUMERICAL_FAILURE
                message = "iterates diverge"
                y, s, z = last
                break
            last = (y, s, z)
            if pinf <= opt.feas_tol and dinf <= opt.feas_tol and gap <= opt.gap_tol * (1 + abs(pobj)):
                status = Status.OPTIMAL
                break
            if abs(pobj) > opt.unbounded_limit and pinf <= opt.feas_tol:
                status = Status.UNBOUNDED
                message = "primal objective diverges"
                break
            if abs(dobj) > opt.unbounded_limit and dinf <= opt.feas_tol:
                status = Status.NUMERICAL_FAILURE
                message = "dual objective diverges; the constraint is likely infeasible"
                break
            if it == opt.max_iters:
                break

            ls = try_cholesky(s)
            lz = try_cholesky(z)
            if ls is None or lz is None:
                status = Status.NUMERICAL_FAILURE
                message = "iterate lost positive definiteness"
                break
            s_inv = _sym(cholesky_solve(ls, eye))

            # Schur complement M_ij = tr(A_i Z A_j S^-1)
            b = z @ a @ s_inv
            schur = a_flat @ b.transpose(0, 2, 1).reshape(m, n * n).T
            schur = _sym(schur)
            lm = self._factor_schur(schur)
            if lm is None:
                status = Status.NUMERICAL_FAILURE
                message = "Schur complement factorization failed"
                break

            g = a_flat @ s_inv.reshape(-1)
            zr = z @ rp @ s_inv
            h = a_flat @ zr.T.reshape(-1)

            def direction(sigma_mu: float, corr: np.ndarray | None):
                rhs = c + sigma_mu * g - h
                extra = np.zeros((n, n))
                if corr is not None:
                    extra = corr @ s_inv
                    rhs = rhs - a_flat @ extra.T.reshape(-1)
                dy = cholesky_solve(lm, rhs)
                ds = np.tensordot(dy, a, axes=1) + rp
                dz = sigma_mu * s_inv - z - _sym(z @ ds @ s_inv + extra)
                return dy, ds, dz

            # predictor
            dy, ds, dz = direction(0.0, None)
            ap = min(1.0, _max_step(ls, ds))
            ad = min(1.0, _max_step(lz, dz))
            mu_aff = float(np.sum((s + ap * ds) * (z + ad * dz))) / n
            sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0

            # corrector
            dy, ds, dz = direction(sigma * mu, dz @ ds)
            ap = min(1.0, opt.step_fraction * _max_step(ls, ds))
            ad = min(1.0, opt.step_fraction * _max_step(lz, dz))

            y = y + ap * dy
            s = _sym(s + ap * ds)
            z = _sym(z + ad * dz)

        f = problem.matrix(y)
        min_eig = float(sym_eigenvalues(_sym(f))[0])
        pobj = problem.objective(y)
        dobj = float(np.sum(a0 * z)) + problem.offset
        return SolveResult(
            status=status,
            objective=pobj,
            y=y,
            dual_objective=dobj,
            gap=abs(dobj - pobj),
            iterations=it,
            min_eig=min_eig,
            Z=z,
            primal_infeasibility=float(np.linalg.norm(f - s) / (1 + norm_a0)),
            dual_infeasibility=float(np.linalg.norm(-c - a_flat @ z.reshape(-1)) / (1 + norm_c)),
            message=message,
        )


def solve(problem: SdpProblem, options: SolverOptions | None = None) -> SolveResult:
    """Solve ``problem`` with a fresh :class:`InteriorPointSolver`."""
    return InteriorPointSolver(options).solve(problem)
