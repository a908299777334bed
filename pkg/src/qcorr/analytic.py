"""Closed-form quantumness tests for two binary measurements per party.

With correlators ``C_xy``, marginals ``C_x`` (Alice) and ``C_y`` (Bob),
the level-1 moment matrix in the observable basis ``{I, A_0, A_1, B_0, B_1}``
reads::

    [[1,    Ca0,  Ca1,  Cb0,  Cb1 ],
     [Ca0,  1,    u,    C00,  C01 ],
     [Ca1,  u,    1,    C10,  C11 ],
     [Cb0,  C00,  C10,  1,    v   ],
     [Cb1,  C01,  C11,  v,    1   ]]

with ``u = <A_0 A_1>`` and ``v = <B_0 B_1>`` unobservable.  A completion
exists iff the arcsine inequality holds for the normalized covariances
``D_xy = (C_xy - C_x C_y) / sqrt((1 - C_x^2)(1 - C_y^2))`` in all four sign
placements.  Without marginals ``D = C`` and the test reduces to the plain
arcsine inequality on correlators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bell import Distribution, DistributionError, correlators

__all__ = [
    "DegenerateMarginal",
    "BinaryCorrelationData",
    "asin_criterion",
    "asin2_criterion",
    "d_coeff",
    "gamma_matrix",
    "completion_oracle",
    "PASS_TOL",
]

PASS_TOL = 1e-12
DEGENERACY_EPS = 1e-9


class DegenerateMarginal(ValueError):
    """A marginal is (numerically) deterministic, so ``D`` is undefined."""


@dataclass(frozen=True, eq=False)
class BinaryCorrelationData:
    c_a: np.ndarray
    c_b: np.ndarray
    c_ab: np.ndarray

    def __post_init__(self) -> None:
        c_a = np.asarray(self.c_a, dtype=float).reshape(2)
        c_b = np.asarray(self.c_b, dtype=float).reshape(2)
        c_ab = np.asarray(self.c_ab, dtype=float).reshape(2, 2)
        if max(np.abs(c_a).max(), np.abs(c_b).max(), np.abs(c_ab).max()) > 1 + PASS_TOL:
            raise ValueError("correlators must lie in [-1, 1]")
        object.__setattr__(self, "c_a", c_a)
        object.__setattr__(self, "c_b", c_b)
        object.__setattr__(self, "c_ab", c_ab)

    @classmethod
    def from_distribution(cls, d: Distribution) -> "BinaryCorrelationData":
        s = d.scenario
        if (s.settings_a, s.settings_b) != (2, 2) or not s.is_binary:
            raise DistributionError("the arcsine criteria need two binary settings per party")
        d.validate(strict=True)
        return cls(*correlators(d))


def _worst_lhs(t: np.ndarray) -> float:
    """Largest ``|sum of asin t_xy|`` over the four placements of the minus sign."""
    s = np.arcsin(np.clip(t, -1.0, 1.0))
    total = s.sum()
    return max(abs(total - 2 * s[x, y]) for x in range(2) for y in range(2))


def asin_criterion(c_ab) -> tuple[bool, float]:
    """Arcsine test on correlators; returns ``(passed, slack)`` with ``slack = pi - max LHS``."""
    c = np.asarray(c_ab, dtype=float).reshape(2, 2)
    if np.abs(c).max() > 1:
        raise ValueError("correlators must lie in [-1, 1]")
    slack = math.pi - _worst_lhs(c)
    return slack >= -PASS_TOL, slack


def d_coeff(c_ij: float, c_i: float, c_j: float) -> float:
    if abs(c_i) > 1 - DEGENERACY_EPS or abs(c_j) > 1 - DEGENERACY_EPS:
        raise DegenerateMarginal(f"marginal {c_i if abs(c_i) > abs(c_j) else c_j!r} is deterministic")
    d = (c_ij - c_i * c_j) / math.sqrt((1 - c_i * c_i) * (1 - c_j * c_j))
    if abs(d) > 1 + PASS_TOL:
        raise ValueError(f"normalized covariance {d!r} outside [-1, 1]; data are not a probability table")
    return max(-1.0, min(1.0, d))


def asin2_criterion(data: BinaryCorrelationData) -> tuple[bool, float]:
    """Arcsine test on the marginal-corrected coefficients ``D``."""
    dm = np.array(
        [[d_coeff(data.c_ab[x, y], data.c_a[x], data.c_b[y]) for y in range(2)] for x in range(2)]
    )
    slack = math.pi - _worst_lhs(dm)
    return slack >= -PASS_TOL, slack


def gamma_matrix(data: BinaryCorrelationData, u: float, v: float) -> np.ndarray:
    """Level-1 moment matrix in the observable basis for given unobservable entries."""
    g = np.eye(5)
    g[0, 1:3] = data.c_a
    g[0, 3:5] = data.c_b
    g[1:3, 3:5] = data.c_ab
    g[1, 2] = u
    g[3, 4] = v
    return np.triu(g) + np.triu(g, 1).T


def _min_eig_grid(data: BinaryCorrelationData, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    stack = np.broadcast_to(gamma_matrix(data, 0.0, 0.0), uu.shape + (5, 5)).copy()
    stack[..., 1, 2] = stack[..., 2, 1] = uu
    stack[..., 3, 4] = stack[..., 4, 3] = vv
    return np.linalg.eigvalsh(stack)[..., 0]


def _golden_max(fun, lo: float, hi: float, tol: float = 1e-11) -> tuple[float, float]:
    ratio = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    x1, x2 = b - ratio * (b - a), a + ratio * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + ratio * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - ratio * (b - a)
            f1 = fun(x1)
    x = 0.5 * (a + b)
    return x, fun(x)


def completion_oracle(data: BinaryCorrelationData, grid_steps: int = 200) -> bool:
    """Brute force: is there ``(u, v)`` in ``[-1, 1]^2`` making :func:`gamma_matrix` PSD?

    A grid scan is followed by nested golden-section refinement; the smallest
    eigenvalue is concave in ``(u, v)``, so the refinement cannot be trapped.
    """
    if grid_steps < 100:
        raise ValueError("grid_steps must be at least 100")
    grid = np.linspace(-1.0, 1.0, grid_steps + 1)
    best = float(_min_eig_grid(data, grid, grid).max())
    if best >= -1e-9:
        return True

    def min_eig(u: float, v: float) -> float:
        return float(np.linalg.eigvalsh(gamma_matrix(data, u, v))[0])

    def best_over_v(u: float) -> float:
        return _golden_max(lambda v: min_eig(u, v), -1.0, 1.0, 1e-9)[1]

    _, refined = _golden_max(best_over_v, -1.0, 1.0, 1e-9)
    return max(best, refined) >= -1e-9
