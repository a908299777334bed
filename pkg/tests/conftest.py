from __future__ import annotations

import itertools

import numpy as np
import pytest

from qcorr.algebra import Scenario
from qcorr.bell import Distribution

BINARY = Scenario.uniform(2, 2)

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def deterministic_boxes(scenario: Scenario = BINARY) -> list[Distribution]:
    strat_a = itertools.product(*(range(o) for o in scenario.outcomes_a))
    strat_b = list(itertools.product(*(range(o) for o in scenario.outcomes_b)))
    return [Distribution.deterministic(scenario, sa, sb) for sa in strat_a for sb in strat_b]


def pr_boxes() -> list[Distribution]:
    """The eight relabelings of the PR box (the nonlocal no-signaling vertices)."""
    out = []
    for fa, fb, fab in itertools.product([1, -1], repeat=3):
        c = np.array([[1.0, 1.0], [1.0, -1.0]])
        c[0] *= fa
        c[:, 0] *= fb
        c *= fab
        out.append(Distribution.from_correlators([0, 0], [0, 0], c))
    return out


def local_mixture(rng: np.random.Generator, scenario: Scenario = BINARY) -> Distribution:
    boxes = deterministic_boxes(scenario)
    return Distribution.mixture(rng.dirichlet(np.ones(len(boxes))), boxes)


def no_signaling_mixture(rng: np.random.Generator, concentration: float = 0.3) -> Distribution:
    """Random point of the 2x2 binary no-signaling polytope.

    One PR box with weight uniform in [0, 1] on top of a sparse local mixture,
    so quantum and supra-quantum points both occur often.
    """
    boxes = deterministic_boxes()
    local = Distribution.mixture(rng.dirichlet(np.full(len(boxes), concentration)), boxes)
    pr = pr_boxes()[rng.integers(8)]
    w = rng.uniform()
    return Distribution.mixture([w, 1 - w], [pr, local])


class MatrixModel:
    """Explicit real projective measurements on R^dim (x) R^dim, for checking symbolic algebra."""

    def __init__(self, scenario: Scenario, rng: np.random.Generator, dim: int = 4):
        self.scenario = scenario
        self.dim = dim
        eye = np.eye(dim)
        self.proj: dict[tuple[str, int, int], np.ndarray] = {}
        for party in ("A", "B"):
            for x, n_out in enumerate(scenario.outcomes(party)):
                q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
                # split the basis into n_out non-empty groups
                cuts = np.sort(rng.choice(np.arange(1, dim), size=n_out - 1, replace=False))
                groups = np.split(np.arange(dim), cuts)
                for a, idx in enumerate(groups):
                    local = q[:, idx] @ q[:, idx].T
                    full = np.kron(local, eye) if party == "A" else np.kron(eye, local)
                    self.proj[party, x, a] = full

    def symbol(self, sym) -> np.ndarray:
        return self.proj[sym.party, sym.setting, sym.outcome]

    def word(self, syms) -> np.ndarray:
        out = np.eye(self.dim**2)
        for s in syms:
            out = out @ self.symbol(s)
        return out

    def monomial(self, m) -> np.ndarray:
        if m.is_zero:
            return np.zeros((self.dim**2, self.dim**2))
        return self.word(m.as_sequence())

    def distribution(self, psi: np.ndarray) -> Distribution:
        s = self.scenario
        p = np.zeros((s.settings_a, s.settings_b, max(s.outcomes_a), max(s.outcomes_b)))
        for x, y in itertools.product(range(s.settings_a), range(s.settings_b)):
            for a, b in itertools.product(range(s.outcomes_a[x]), range(s.outcomes_b[y])):
                p[x, y, a, b] = psi @ self.proj["A", x, a] @ self.proj["B", y, b] @ psi
        return Distribution(s, p)


@pytest.fixture
def rng():
    return np.random.default_rng(20061718)
