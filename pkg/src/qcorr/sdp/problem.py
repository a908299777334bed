"""Linear matrix inequality problems and their sparse text dump."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np

__all__ = ["SdpProblem", "ProblemError", "dump_problem", "load_problem"]


class ProblemError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """maximize ``c @ y + offset`` subject to ``A0 + sum_i y[i] * A[i]`` positive semidefinite.

    ``A`` is stored densely with shape ``(num_vars, dim, dim)``.
    """

    A0: np.ndarray
    A: np.ndarray
    c: np.ndarray
    offset: float = 0.0
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        a0 = np.array(self.A0, dtype=float)
        n = a0.shape[0]
        a = np.array(self.A, dtype=float).reshape(-1, n, n)
        c = np.array(self.c, dtype=float).reshape(-1)
        if a0.shape != (n, n):
            raise ProblemError("A0 must be square")
        if a.shape[0] != c.shape[0]:
            raise ProblemError(f"{a.shape[0]} coefficient matrices but {c.shape[0]} objective entries")
        scale = max(1.0, float(np.abs(a0).max(initial=0.0)), float(np.abs(a).max(initial=0.0)))
        if np.abs(a0 - a0.T).max(initial=0.0) > 1e-12 * scale:
            raise ProblemError("A0 is not symmetric")
        if a.size and np.abs(a - a.transpose(0, 2, 1)).max() > 1e-12 * scale:
            raise ProblemError("a coefficient matrix is not symmetric")
        for arr in (a0, a, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A0", a0)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.A0.shape[0]

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]

    def matrix(self, y: np.ndarray) -> np.ndarray:
        """``A0 + sum_i y[i] A[i]``."""
        return self.A0 + np.tensordot(np.asarray(y, dtype=float), self.A, axes=1)

    def objective(self, y: np.ndarray) -> float:
        return float(self.c @ y + self.offset)


def dump_problem(problem: SdpProblem, out: str | Path | TextIO) -> None:
    """Write the sparse text format.

    Line 1: ``dim num_vars``; line 2: ``offset`` then the objective ``c``;
    then one ``var_id row col value`` line per nonzero upper-triangle entry,
    with ``var_id`` 0 for ``A0`` and ``i + 1`` for ``A[i]``; indices are 0-based.
    """
    lines = [f"{problem.dim} {problem.num_vars}"]
    lines.append(" ".join(repr(float(v)) for v in [problem.offset, *problem.c]))
    mats = [problem.A0, *problem.A]
    for var_id, mat in enumerate(mats):
        rows, cols = np.nonzero(np.triu(mat))
        for r, col in zip(rows, cols):
            lines.append(f"{var_id} {r} {col} {float(mat[r, col])!r}")
    text = "\n".join(lines) + "\n"
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)


def load_problem(source: str | Path | TextIO) -> SdpProblem:
    text = Path(source).read_text() if isinstance(source, (str, Path)) else source.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        dim, num_vars = (int(t) for t in lines[0].split())
        head = [float(t) for t in lines[1].split()]
        mats = np.zeros((num_vars + 1, dim, dim))
        for ln in lines[2:]:
            var_id, r, col, value = ln.split()
            i, j = int(r), int(col)
            mats[int(var_id), i, j] = mats[int(var_id), j, i] = float(value)
    except (ValueError, IndexError) as exc:
        raise ProblemError(f"malformed problem dump: {exc}") from exc
    if len(head) != num_vars + 1:
        raise ProblemError("objective line does not match num_vars")
    return SdpProblem(mats[0], mats[1:], head[1:], head[0])
