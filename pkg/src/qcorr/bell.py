"""Probability tables, Bell functionals and their classical (local) bounds."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .algebra import Scenario

__all__ = [
    "DistributionError",
    "FunctionalError",
    "EnumerationTooLarge",
    "Distribution",
    "BellFunctional",
    "chsh",
    "cglmp",
    "classical_bound",
    "evaluate",
    "correlators",
    "deterministic_strategies",
    "MAX_STRATEGY_PAIRS",
]

NORMALIZATION_TOL = 1e-9
SIGNALING_TOL = 1e-9
MAX_STRATEGY_PAIRS = 10**6


class DistributionError(ValueError):
    pass


class FunctionalError(ValueError):
    pass


class EnumerationTooLarge(ValueError):
    pass


def _sign(outcome: int) -> int:
    # outcome 0 -> +1, outcome 1 -> -1
    return 1 - 2 * outcome


@dataclass(frozen=True, eq=False)
class Distribution:
    """Joint probabilities ``p[x, y, a, b] = P(a, b | x, y)``.

    ``p`` is padded to the largest outcome count; padding cells must be zero.
    """

    scenario: Scenario
    p: np.ndarray

    def __post_init__(self) -> None:
        s = self.scenario
        p = np.array(self.p, dtype=float)
        shape = (s.settings_a, s.settings_b, max(s.outcomes_a), max(s.outcomes_b))
        if p.shape != shape:
            raise DistributionError(f"probability table has shape {p.shape}, expected {shape}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    # construction ------------------------------------------------------------

    @classmethod
    def from_nested(cls, scenario: Scenario, nested: Sequence) -> "Distribution":
        """Build from a (possibly ragged) nested list indexed ``[x][y][a][b]``."""
        s = scenario
        p = np.zeros((s.settings_a, s.settings_b, max(s.outcomes_a), max(s.outcomes_b)))
        try:
            if len(nested) != s.settings_a:
                raise DistributionError("wrong number of Alice settings in p")
            for x in range(s.settings_a):
                if len(nested[x]) != s.settings_b:
                    raise DistributionError(f"wrong number of Bob settings in p[{x}]")
                for y in range(s.settings_b):
                    block = np.asarray(nested[x][y], dtype=float)
                    if block.shape != (s.outcomes_a[x], s.outcomes_b[y]):
                        raise DistributionError(
                            f"p[{x}][{y}] has shape {block.shape}, "
                            f"expected {(s.outcomes_a[x], s.outcomes_b[y])}"
                        )
                    p[x, y, : block.shape[0], : block.shape[1]] = block
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DistributionError):
                raise
            raise DistributionError(f"malformed probability table: {exc}") from exc
        return cls(scenario, p)

    @classmethod
    def from_json(cls, text: str) -> "Distribution":
        try:
            data = json.loads(text)
            scenario = Scenario.from_dict(data["scenario"])
            nested = data["p"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DistributionError(f"invalid distribution file: {exc}") from exc
        return cls.from_nested(scenario, nested)

    @classmethod
    def load(cls, path: str | Path) -> "Distribution":
        return cls.from_json(Path(path).read_text())

    def to_json(self) -> str:
        return json.dumps({"scenario": self.scenario.to_dict(), "p": self.nested()})

    def nested(self) -> list:
        s = self.scenario
        return [
            [self.p[x, y, : s.outcomes_a[x], : s.outcomes_b[y]].tolist() for y in range(s.settings_b)]
            for x in range(s.settings_a)
        ]

    @classmethod
    def deterministic(cls, scenario: Scenario, out_a: Sequence[int], out_b: Sequence[int]) -> "Distribution":
        """Local deterministic box: Alice answers ``out_a[x]``, Bob ``out_b[y]``."""
        s = scenario
        p = np.zeros((s.settings_a, s.settings_b, max(s.outcomes_a), max(s.outcomes_b)))
        for x, y in product(range(s.settings_a), range(s.settings_b)):
            p[x, y, out_a[x], out_b[y]] = 1.0
        return cls(scenario, p)

    @classmethod
    def mixture(cls, weights: Sequence[float], parts: Sequence["Distribution"]) -> "Distribution":
        w = np.asarray(weights, dtype=float)
        return cls(parts[0].scenario, sum(wi * d.p for wi, d in zip(w, parts)))

    @classmethod
    def uniform(cls, scenario: Scenario) -> "Distribution":
        s = scenario
        p = np.zeros((s.settings_a, s.settings_b, max(s.outcomes_a), max(s.outcomes_b)))
        for x, y in product(range(s.settings_a), range(s.settings_b)):
            p[x, y, : s.outcomes_a[x], : s.outcomes_b[y]] = 1.0 / (s.outcomes_a[x] * s.outcomes_b[y])
        return cls(scenario, p)

    @classmethod
    def from_correlators(cls, c_a: Sequence[float], c_b: Sequence[float], c_ab) -> "Distribution":
        """Binary box with ``<A_x> = c_a[x]``, ``<B_y> = c_b[y]`` and ``<A_x B_y> = c_ab[x][y]``."""
        c_ab = np.asarray(c_ab, dtype=float)
        sa, sb = len(c_a), len(c_b)
        scenario = Scenario(sa, sb, (2,) * sa, (2,) * sb)
        p = np.zeros((sa, sb, 2, 2))
        for x, y, a, b in product(range(sa), range(sb), range(2), range(2)):
            p[x, y, a, b] = (
                1 + _sign(a) * c_a[x] + _sign(b) * c_b[y] + _sign(a) * _sign(b) * c_ab[x, y]
            ) / 4
        return cls(scenario, p)

    @classmethod
    def pr_box(cls) -> "Distribution":
        return cls.from_correlators([0, 0], [0, 0], [[1, 1], [1, -1]])

    @classmethod
    def tsirelson(cls) -> "Distribution":
        """Maximally violating CHSH box of a maximally entangled qubit pair."""
        r = 1 / math.sqrt(2)
        return cls.from_correlators([0, 0], [0, 0], [[r, r], [r, -r]])

    # checks and marginals ------------------------------------------------------

    def marginal_a(self, x: int, y: int = 0) -> np.ndarray:
        return self.p[x, y].sum(axis=1)[: self.scenario.outcomes_a[x]]

    def marginal_b(self, y: int, x: int = 0) -> np.ndarray:
        return self.p[x, y].sum(axis=0)[: self.scenario.outcomes_b[y]]

    def signaling(self) -> float:
        """Largest change of one party's marginal under the other's setting choice."""
        s = self.scenario
        worst = 0.0
        for x in range(s.settings_a):
            ref = self.marginal_a(x, 0)
            for y in range(1, s.settings_b):
                worst = max(worst, float(np.max(np.abs(self.marginal_a(x, y) - ref))))
        for y in range(s.settings_b):
            ref = self.marginal_b(y, 0)
            for x in range(1, s.settings_a):
                worst = max(worst, float(np.max(np.abs(self.marginal_b(y, x) - ref))))
        return worst

    def validate(self, strict: bool = True) -> float:
        """Raise :class:`DistributionError` on an invalid table; return the signaling level.

        With ``strict`` a signaling level of ``SIGNALING_TOL`` or more is an error.
        """
        s = self.scenario
        p = self.p
        if not np.all(np.isfinite(p)):
            raise DistributionError("probabilities must be finite")
        if p.min() < -NORMALIZATION_TOL or p.max() > 1 + NORMALIZATION_TOL:
            raise DistributionError("probabilities must lie in [0, 1]")
        for x, y in product(range(s.settings_a), range(s.settings_b)):
            block = p[x, y]
            if np.any(block[s.outcomes_a[x]:, :] != 0) or np.any(block[:, s.outcomes_b[y]:] != 0):
                raise DistributionError(f"nonzero padding in block ({x},{y})")
            total = block.sum()
            if abs(total - 1) > NORMALIZATION_TOL:
                raise DistributionError(f"P(.,.|{x},{y}) sums to {total!r}, not 1")
        level = self.signaling()
        if strict and level >= SIGNALING_TOL:
            raise DistributionError(f"marginals depend on the remote setting (deviation {level:.3g})")
        return level


@dataclass(frozen=True)
class BellFunctional:
    """``constant + sum joint[x,y,a,b] P(a,b|x,y) + sum marg_a[x,a] P_A(a|x) + sum marg_b[y,b] P_B(b|y)``."""

    scenario: Scenario
    joint: dict[tuple[int, int, int, int], float] = field(default_factory=dict)
    marg_a: dict[tuple[int, int], float] = field(default_factory=dict)
    marg_b: dict[tuple[int, int], float] = field(default_factory=dict)
    constant: float = 0.0
    name: str | None = field(default=None, compare=False)

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        s = self.scenario
        for (x, y, a, b) in self.joint:
            if not (0 <= x < s.settings_a and 0 <= y < s.settings_b):
                raise FunctionalError(f"settings ({x},{y}) out of range")
            if not (0 <= a < s.outcomes_a[x] and 0 <= b < s.outcomes_b[y]):
                raise FunctionalError(f"outcomes ({a},{b}) out of range for settings ({x},{y})")
        for (x, a) in self.marg_a:
            if not (0 <= x < s.settings_a and 0 <= a < s.outcomes_a[x]):
                raise FunctionalError(f"Alice term ({a}|{x}) out of range")
        for (y, b) in self.marg_b:
            if not (0 <= y < s.settings_b and 0 <= b < s.outcomes_b[y]):
                raise FunctionalError(f"Bob term ({b}|{y}) out of range")
        # zero coefficients carry no information; drop them so equality is structural
        for attr in ("joint", "marg_a", "marg_b"):
            clean = {k: float(v) for k, v in sorted(getattr(self, attr).items()) if v != 0}
            object.__setattr__(self, attr, clean)
        object.__setattr__(self, "constant", float(self.constant))

    def scaled(self, alpha: float, beta: float = 0.0) -> "BellFunctional":
        """The functional ``alpha * self + beta``."""
        return BellFunctional(
            self.scenario,
            {k: alpha * v for k, v in self.joint.items()},
            {k: alpha * v for k, v in self.marg_a.items()},
            {k: alpha * v for k, v in self.marg_b.items()},
            alpha * self.constant + beta,
            self.name,
        )

    def joint_tensor(self) -> np.ndarray:
        s = self.scenario
        t = np.zeros((s.settings_a, s.settings_b, max(s.outcomes_a), max(s.outcomes_b)))
        for (x, y, a, b), v in self.joint.items():
            t[x, y, a, b] = v
        return t


def chsh() -> BellFunctional:
    """``C(0,0) + C(0,1) + C(1,0) - C(1,1)`` written over joint probabilities."""
    joint = {}
    for x, y, a, b in product(range(2), repeat=4):
        sign = -1 if (x, y) == (1, 1) else 1
        joint[(x, y, a, b)] = sign * _sign(a) * _sign(b)
    return BellFunctional(Scenario.uniform(2, 2), joint, name="chsh")


def cglmp(d: int) -> BellFunctional:
    """Collins-Gisin-Linden-Massar-Popescu functional for ``d`` outcomes.

    Settings 0 and 1 of each party play the roles of A1, A2 and B1, B2.  The
    term ``P(A_x = B_y + k)`` sums ``P(a, b | x, y)`` over ``a = b + k mod d``.
    Its local bound is 2 for every ``d``.
    """
    if d < 2:
        raise FunctionalError("CGLMP needs at least two outcomes")
    joint: dict[tuple[int, int, int, int], float] = {}

    def add(x: int, y: int, shift: int, weight: float) -> None:
        # adds weight * P(a = b + shift mod d | x, y)
        for b in range(d):
            key = (x, y, (b + shift) % d, b)
            joint[key] = joint.get(key, 0.0) + weight

    for k in range(d // 2):
        w = 1 - 2 * k / (d - 1)
        # positive: A1=B1+k, B1=A2+k+1, A2=B2+k, B2=A1+k
        add(0, 0, k, w)
        add(1, 0, -(k + 1), w)
        add(1, 1, k, w)
        add(0, 1, -k, w)
        # negative: A1=B1-k-1, B1=A2-k, A2=B2-k-1, B2=A1-k-1
        add(0, 0, -(k + 1), -w)
        add(1, 0, k, -w)
        add(1, 1, -(k + 1), -w)
        add(0, 1, k + 1, -w)
    return BellFunctional(Scenario.uniform(2, d), joint, name=f"cglmp{d}")


def deterministic_strategies(outcomes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All assignments of one outcome to each setting."""
    return product(*(range(o) for o in outcomes))


def classical_bound(f: BellFunctional) -> float:
    """Exact maximum of ``f`` over local deterministic strategies.

    Alice's strategies are enumerated; for each, Bob's best response splits
    into an independent maximization per setting.
    """
    s = f.scenario
    n_a = math.prod(s.outcomes_a)
    n_b = math.prod(s.outcomes_b)
    if n_a * n_b > MAX_STRATEGY_PAIRS:
        raise EnumerationTooLarge(f"{n_a * n_b} strategy pairs exceed the limit {MAX_STRATEGY_PAIRS}")
    joint = f.joint_tensor()
    mb = np.zeros((s.settings_b, max(s.outcomes_b)))
    for (y, b), v in f.marg_b.items():
        mb[y, b] = v
    best = -math.inf
    xs = np.arange(s.settings_a)
    for strat in deterministic_strategies(s.outcomes_a):
        value = f.constant + sum(f.marg_a.get((x, a), 0.0) for x, a in enumerate(strat))
        # response[y, b]: payoff of Bob answering b to setting y
        response = joint[xs, :, list(strat), :].sum(axis=0) + mb
        for y in range(s.settings_b):
            value += response[y, : s.outcomes_b[y]].max()
        best = max(best, value)
    return float(best)


def evaluate(f: BellFunctional, d: Distribution) -> float:
    """Value of ``f`` on ``d``; single-party terms use the marginals at the remote setting 0."""
    if f.scenario != d.scenario:
        raise FunctionalError("functional and distribution use different scenarios")
    value = f.constant + float(np.sum(f.joint_tensor() * d.p))
    for (x, a), v in f.marg_a.items():
        value += v * d.marginal_a(x)[a]
    for (y, b), v in f.marg_b.items():
        value += v * d.marginal_b(y)[b]
    return float(value)


def correlators(d: Distribution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(C_X, C_Y, C_XY)`` with outcome 0 counted as +1 and outcome 1 as -1."""
    s = d.scenario
    if not s.is_binary:
        raise DistributionError("correlators need binary outcomes")
    signs = np.array([1.0, -1.0])
    c_xy = np.einsum("xyab,a,b->xy", d.p, signs, signs)
    c_x = np.array([d.marginal_a(x) @ signs for x in range(s.settings_a)])
    c_y = np.array([d.marginal_b(y) @ signs for y in range(s.settings_b)])
    return c_x, c_y, c_xy
