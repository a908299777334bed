"""Symbolic moment matrices and the SDP problems built from them.

Row and column ``i`` of the level-``k`` moment matrix are labelled by the
``i``-th normal-form monomial ``S_i`` of length at most ``k``; entry
``(i, j)`` stands for the expectation of ``S_i^† S_j``.  Entries whose
products coincide share a moment variable.  A monomial and its adjoint also
share a variable: the matrix is taken real symmetric, which loses nothing
because the real part of a Hermitian PSD matrix is PSD and still satisfies
every constraint used here (all have real coefficients and treat a
monomial and its adjoint alike).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .algebra import Monomial, ProjectorSymbol, Scenario, adjoint, canonicalize, monomials_up_to_level
from .bell import BellFunctional, Distribution, DistributionError, FunctionalError
from .sdp import SdpProblem, SolveResult, SolverOptions, solve, sym_eigenvalues

__all__ = [
    "ZERO",
    "ONE",
    "FEASIBILITY_THRESHOLD",
    "Affine",
    "MomentStructure",
    "ProbabilityMap",
    "build_structure",
    "probability_map",
    "assemble_bound_sdp",
    "assemble_membership_sdp",
    "BoundResult",
    "MembershipResult",
    "quantum_bound",
    "check_membership",
]

log = logging.getLogger(__name__)

ZERO = -1
ONE = -2
FEASIBILITY_THRESHOLD = -1e-7


@dataclass(frozen=True)
class Affine:
    """``constant + sum_v coeffs[v] * y_v`` over moment variables ``y``."""

    constant: float = 0.0
    coeffs: dict[int, float] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "Affine") -> "Affine":
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs.get(k, 0.0) + v
        return Affine(self.constant + other.constant, {k: v for k, v in coeffs.items() if v != 0})

    def __mul__(self, alpha: float) -> "Affine":
        return Affine(alpha * self.constant, {k: alpha * v for k, v in self.coeffs.items() if alpha * v != 0})

    __rmul__ = __mul__

    def value(self, y: np.ndarray) -> float:
        return self.constant + sum(v * y[k] for k, v in self.coeffs.items())


@dataclass(frozen=True, eq=False)
class MomentStructure:
    scenario: Scenario
    level: int
    basis: tuple[Monomial, ...]
    cells: np.ndarray
    """``cells[i, j]`` is a variable id, ``ZERO`` or ``ONE``."""
    var_index: dict[Monomial, int]
    var_monomials: tuple[Monomial, ...]

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def num_vars(self) -> int:
        return len(self.var_monomials)

    def entry(self, i: int, j: int) -> int:
        return int(self.cells[i, j])

    def variable(self, m: Monomial) -> int:
        """Variable id of ``m``; ``ONE`` for the identity and ``ZERO`` for ``Zero``."""
        if m.is_zero:
            return ZERO
        if m.is_identity:
            return ONE
        try:
            return self.var_index[m]
        except KeyError:
            raise KeyError(f"{m!r} does not occur in the level-{self.level} moment matrix") from None

    def matrix(self, y: np.ndarray) -> np.ndarray:
        """Numeric moment matrix for variable values ``y``."""
        vals = np.concatenate([np.asarray(y, dtype=float), [0.0, 1.0]])
        idx = np.where(self.cells == ZERO, len(y), np.where(self.cells == ONE, len(y) + 1, self.cells))
        return vals[idx]

    def coefficient_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """``(A0, A)`` with ``matrix(y) == A0 + sum_i y_i A[i]``."""
        a0 = (self.cells == ONE).astype(float)
        a = (self.cells[None, :, :] == np.arange(self.num_vars)[:, None, None]).astype(float)
        return a0, a


def build_structure(scenario: Scenario, level: int) -> MomentStructure:
    basis = monomials_up_to_level(scenario, level)
    n = len(basis)
    adjoints = [adjoint(m) for m in basis]
    products: dict[tuple[int, int], Monomial] = {}
    reps: set[Monomial] = set()
    for i in range(n):
        for j in range(i, n):
            m = canonicalize(scenario, adjoints[i].as_sequence() + basis[j].as_sequence())
            products[i, j] = m
            if not m.is_zero and not m.is_identity:
                reps.add(min(m, adjoint(m), key=Monomial.sort_key))
    var_monomials = tuple(sorted(reps, key=Monomial.sort_key))
    var_index: dict[Monomial, int] = {}
    for k, m in enumerate(var_monomials):
        var_index[m] = k
        var_index[adjoint(m)] = k
    cells = np.empty((n, n), dtype=np.int64)
    for (i, j), m in products.items():
        v = ZERO if m.is_zero else ONE if m.is_identity else var_index[m]
        cells[i, j] = cells[j, i] = v
    cells.setflags(write=False)
    log.debug("level %d moment matrix: n=%d, %d variables", level, n, len(var_monomials))
    return MomentStructure(scenario, level, tuple(basis), cells, var_index, var_monomials)


@dataclass(frozen=True)
class ProbabilityMap:
    """Affine expressions of every joint and marginal probability."""

    joint: dict[tuple[int, int, int, int], Affine]
    marg_a: dict[tuple[int, int], Affine]
    marg_b: dict[tuple[int, int], Affine]

    __hash__ = None  # type: ignore[assignment]


def _outcome_operator(scenario: Scenario, party: str, setting: int, outcome: int) -> list[tuple[float, ProjectorSymbol | None]]:
    """Projector of an outcome as a combination of kept projectors (``None`` is the identity)."""
    last = scenario.outcomes(party)[setting] - 1
    if outcome < last:
        return [(1.0, ProjectorSymbol(party, setting, outcome))]
    return [(1.0, None)] + [(-1.0, ProjectorSymbol(party, setting, o)) for o in range(last)]


def _expand(ms: MomentStructure, *operators: list[tuple[float, ProjectorSymbol | None]]) -> Affine:
    total = Affine()
    for terms in product(*operators):
        coeff = float(np.prod([t[0] for t in terms]))
        word = [t[1] for t in terms if t[1] is not None]
        v = ms.variable(canonicalize(ms.scenario, word))
        if v == ONE:
            total = total + Affine(coeff)
        elif v != ZERO:
            total = total + Affine(0.0, {v: coeff})
    return total


def probability_map(ms: MomentStructure) -> ProbabilityMap:
    s = ms.scenario
    joint = {}
    for x, y in product(range(s.settings_a), range(s.settings_b)):
        for a, b in product(range(s.outcomes_a[x]), range(s.outcomes_b[y])):
            joint[x, y, a, b] = _expand(
                ms, _outcome_operator(s, "A", x, a), _outcome_operator(s, "B", y, b)
            )
    marg_a = {
        (x, a): _expand(ms, _outcome_operator(s, "A", x, a))
        for x in range(s.settings_a)
        for a in range(s.outcomes_a[x])
    }
    marg_b = {
        (y, b): _expand(ms, _outcome_operator(s, "B", y, b))
        for y in range(s.settings_b)
        for b in range(s.outcomes_b[y])
    }
    return ProbabilityMap(joint, marg_a, marg_b)


def _labels(ms: MomentStructure) -> tuple[str, ...]:
    return tuple(repr(m) for m in ms.var_monomials)


def functional_affine(ms: MomentStructure, f: BellFunctional) -> Affine:
    """``f`` written over the moment variables of ``ms``."""
    if f.scenario != ms.scenario:
        raise FunctionalError("functional and moment matrix use different scenarios")
    pm = probability_map(ms)
    total = Affine(f.constant)
    for key, v in f.joint.items():
        total = total + v * pm.joint[key]
    for key, v in f.marg_a.items():
        total = total + v * pm.marg_a[key]
    for key, v in f.marg_b.items():
        total = total + v * pm.marg_b[key]
    return total


def assemble_bound_sdp(ms: MomentStructure, f: BellFunctional, positivity: bool | None = None) -> SdpProblem:
    """Maximize ``f`` over probability tables whose moment matrix at ``ms`` is PSD.

    At level 1 a joint probability ``P(a,b|x,y)`` is an off-diagonal entry,
    so positive semidefiniteness alone does not keep it non-negative.  With
    ``positivity`` (default: only at level 1) every joint probability is
    appended as a diagonal entry of the constraint matrix, which stays one
    block-diagonal LMI.  From level 2 on each ``P(a,b|x,y)`` is a quadratic
    form of the moment matrix and the extra block is redundant.
    """
    expr = functional_affine(ms, f)
    c = np.zeros(ms.num_vars)
    for k, v in expr.coeffs.items():
        c[k] = v
    a0, a = ms.coefficient_matrices()
    if positivity is None:
        positivity = ms.level < 2
    if positivity:
        probs = list(probability_map(ms).joint.values())
        n, p = ms.n, len(probs)
        big0 = np.zeros((n + p, n + p))
        big = np.zeros((ms.num_vars, n + p, n + p))
        big0[:n, :n] = a0
        big[:, :n, :n] = a
        for r, expr_p in enumerate(probs, start=n):
            big0[r, r] = expr_p.constant
            for k, v in expr_p.coeffs.items():
                big[k, r, r] = v
        a0, a = big0, big
    return SdpProblem(a0, a, c, expr.constant, _labels(ms))


def pinned_values(ms: MomentStructure, d: Distribution) -> dict[int, float]:
    """Values of the moment variables fixed by the observed probabilities."""
    s = ms.scenario
    pinned: dict[int, float] = {}
    for x in range(s.settings_a):
        for a in range(s.outcomes_a[x] - 1):
            pinned[ms.variable(canonicalize(s, [ProjectorSymbol("A", x, a)]))] = float(d.marginal_a(x)[a])
    for y in range(s.settings_b):
        for b in range(s.outcomes_b[y] - 1):
            pinned[ms.variable(canonicalize(s, [ProjectorSymbol("B", y, b)]))] = float(d.marginal_b(y)[b])
    for x, y in product(range(s.settings_a), range(s.settings_b)):
        for a, b in product(range(s.outcomes_a[x] - 1), range(s.outcomes_b[y] - 1)):
            m = canonicalize(s, [ProjectorSymbol("A", x, a), ProjectorSymbol("B", y, b)])
            pinned[ms.variable(m)] = float(d.p[x, y, a, b])
    return pinned


def assemble_membership_sdp(ms: MomentStructure, d: Distribution) -> SdpProblem:
    """maximize ``lam`` subject to ``Gamma(y) - lam I`` PSD with observable moments fixed to ``d``.

    Variables are the unpinned moments in id order followed by ``lam``.
    """
    if d.scenario != ms.scenario:
        raise DistributionError("distribution and moment matrix use different scenarios")
    d.validate(strict=True)
    pinned = pinned_values(ms, d)
    a0, a = ms.coefficient_matrices()
    for k, v in pinned.items():
        a0 = a0 + v * a[k]
    free = [k for k in range(ms.num_vars) if k not in pinned]
    a_free = np.concatenate([a[free], -np.eye(ms.n)[None]], axis=0)
    c = np.zeros(len(free) + 1)
    c[-1] = 1.0
    labels = tuple(repr(ms.var_monomials[k]) for k in free) + ("lambda",)
    return SdpProblem(a0, a_free, c, 0.0, labels)


@dataclass(frozen=True, eq=False)
class BoundResult:
    value: float
    structure: MomentStructure = field(repr=False)
    problem: SdpProblem = field(repr=False)
    result: SolveResult = field(repr=False)


@dataclass(frozen=True, eq=False)
class MembershipResult:
    margin: float
    passed: bool
    structure: MomentStructure = field(repr=False)
    problem: SdpProblem = field(repr=False)
    result: SolveResult = field(repr=False)


def quantum_bound(f: BellFunctional, level: int = 1, options: SolverOptions | None = None) -> BoundResult:
    """Upper bound on the quantum value of ``f`` from the level-``level`` relaxation."""
    ms = build_structure(f.scenario, level)
    problem = assemble_bound_sdp(ms, f)
    result = solve(problem, options)
    return BoundResult(result.objective, ms, problem, result)


def check_membership(d: Distribution, level: int = 1, options: SolverOptions | None = None) -> MembershipResult:
    """Level-``level`` quantumness test of ``d``.

    The reported margin is the smallest eigenvalue of the completed moment
    matrix at the solver's point, so a non-negative margin is a witness of
    feasibility rather than a solver estimate.
    """
    ms = build_structure(d.scenario, level)
    problem = assemble_membership_sdp(ms, d)
    result = solve(problem, options)
    gamma = problem.matrix(result.y) + result.y[-1] * np.eye(ms.n)
    margin = float(sym_eigenvalues(0.5 * (gamma + gamma.T))[0])
    return MembershipResult(margin, margin >= FEASIBILITY_THRESHOLD, ms, problem, result)
