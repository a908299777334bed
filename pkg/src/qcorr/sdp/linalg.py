"""Dense symmetric kernels: Cholesky factorization, triangular solves, Jacobi eigenvalues."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "AsymmetricMatrix",
    "try_cholesky",
    "cholesky_solve",
    "solve_lower",
    "solve_upper",
    "sym_eigenvalues",
]

SYMMETRY_TOL = 1e-12


class AsymmetricMatrix(ValueError):
    pass


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise AsymmetricMatrix(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and np.max(np.abs(m - m.T)) > SYMMETRY_TOL * scale:
        raise AsymmetricMatrix("matrix is not symmetric")
    return m


def try_cholesky(m: np.ndarray) -> np.ndarray | None:
    """Lower-triangular ``L`` with ``L @ L.T == m``, or ``None`` if ``m`` is not positive definite."""
    a = np.asarray(m, dtype=float)
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        row = low[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > 0.0:
            return None
        d = np.sqrt(pivot)
        low[j, j] = d
        if j + 1 < n:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ row) / d
    return low


def solve_lower(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution ``low @ x = b`` (``b`` may have several columns)."""
    x = np.array(b, dtype=float, copy=True)
    for i in range(low.shape[0]):
        x[i] = (x[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


def solve_upper(up: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution ``up @ x = b``."""
    x = np.array(b, dtype=float, copy=True)
    for i in range(up.shape[0] - 1, -1, -1):
        x[i] = (x[i] - up[i, i + 1 :] @ x[i + 1 :]) / up[i, i]
    return x


def cholesky_solve(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``(low @ low.T) x = b`` given the Cholesky factor."""
    return solve_upper(low.T, solve_lower(low, b))


def sym_eigenvalues(m: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    a = _check_symmetric(m).copy()
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(a[p, q])
                if abs(apq) <= 1e-300:
                    continue
                theta = float(a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))
