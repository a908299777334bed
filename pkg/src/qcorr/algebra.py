"""Projector symbols, noncommutative monomials and their normal form.

Every measurement keeps all but its last outcome; the last projector is
recovered from completeness (the projectors of one measurement sum to the
identity).  What remains obeys three rewriting rules:

* projectors of different parties commute, so a word splits into an Alice
  part followed by a Bob part;
* ``E E = E`` (idempotence);
* ``E E' = 0`` when ``E`` and ``E'`` belong to the same measurement but to
  different outcomes (orthogonality).

Applying them left to right with a stack yields a unique normal form, so
each product of projectors is either ``Zero`` or exactly one reduced word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Sequence

__all__ = [
    "AlgebraError",
    "Scenario",
    "ProjectorSymbol",
    "Monomial",
    "A",
    "B",
    "canonicalize",
    "mul",
    "adjoint",
    "monomials_up_to_level",
]


class AlgebraError(ValueError):
    """Invalid symbol, scenario or level."""


@dataclass(frozen=True)
class Scenario:
    """Measurement configuration of a bipartite Bell experiment."""

    settings_a: int
    settings_b: int
    outcomes_a: tuple[int, ...]
    outcomes_b: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outcomes_a", tuple(int(o) for o in self.outcomes_a))
        object.__setattr__(self, "outcomes_b", tuple(int(o) for o in self.outcomes_b))
        if self.settings_a < 1 or self.settings_b < 1:
            raise AlgebraError("each party needs at least one setting")
        if len(self.outcomes_a) != self.settings_a or len(self.outcomes_b) != self.settings_b:
            raise AlgebraError("one outcome count per setting is required")
        if min(self.outcomes_a + self.outcomes_b) < 2:
            raise AlgebraError("every measurement needs at least two outcomes")

    @classmethod
    def uniform(cls, settings: int, outcomes: int) -> "Scenario":
        """Both parties with ``settings`` measurements of ``outcomes`` outcomes."""
        return cls(settings, settings, (outcomes,) * settings, (outcomes,) * settings)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        try:
            return cls(
                int(data["settings_a"]),
                int(data["settings_b"]),
                tuple(data["outcomes_a"]),
                tuple(data["outcomes_b"]),
            )
        except (KeyError, TypeError) as exc:
            raise AlgebraError(f"malformed scenario: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "settings_a": self.settings_a,
            "settings_b": self.settings_b,
            "outcomes_a": list(self.outcomes_a),
            "outcomes_b": list(self.outcomes_b),
        }

    def settings(self, party: str) -> int:
        return self.settings_a if party == "A" else self.settings_b

    def outcomes(self, party: str) -> tuple[int, ...]:
        return self.outcomes_a if party == "A" else self.outcomes_b

    def reduced_count(self, party: str) -> int:
        """Number of projectors kept for ``party`` after last-outcome elimination."""
        return sum(o - 1 for o in self.outcomes(party))

    def symbols(self, party: str) -> list["ProjectorSymbol"]:
        """Reduced projectors of ``party`` ordered by (setting, outcome)."""
        return [
            ProjectorSymbol(party, x, a)
            for x, n_out in enumerate(self.outcomes(party))
            for a in range(n_out - 1)
        ]

    @property
    def is_binary(self) -> bool:
        return all(o == 2 for o in self.outcomes_a + self.outcomes_b)


class ProjectorSymbol(NamedTuple):
    party: str
    setting: int
    outcome: int

    def __repr__(self) -> str:
        return f"{self.party}({self.setting},{self.outcome})"


def A(setting: int, outcome: int) -> ProjectorSymbol:
    return ProjectorSymbol("A", setting, outcome)


def B(setting: int, outcome: int) -> ProjectorSymbol:
    return ProjectorSymbol("B", setting, outcome)


def _check_symbol(scenario: Scenario, sym: ProjectorSymbol) -> None:
    if sym.party not in ("A", "B"):
        raise AlgebraError(f"unknown party in {sym!r}")
    outs = scenario.outcomes(sym.party)
    if not 0 <= sym.setting < len(outs):
        raise AlgebraError(f"setting out of range in {sym!r}")
    # the last outcome is eliminated, so it is not a valid symbol
    if not 0 <= sym.outcome < outs[sym.setting] - 1:
        raise AlgebraError(f"outcome out of range in {sym!r}")


@dataclass(frozen=True)
class Monomial:
    """A reduced word ``word_a · word_b`` or the distinguished ``Zero``.

    The identity is the word with both parts empty.  Instances built through
    :func:`canonicalize` are always in normal form.
    """

    scenario: Scenario = field(repr=False)
    word_a: tuple[ProjectorSymbol, ...] = ()
    word_b: tuple[ProjectorSymbol, ...] = ()
    is_zero: bool = False

    @classmethod
    def identity(cls, scenario: Scenario) -> "Monomial":
        return cls(scenario)

    @classmethod
    def zero(cls, scenario: Scenario) -> "Monomial":
        return cls(scenario, is_zero=True)

    @property
    def is_identity(self) -> bool:
        return not self.is_zero and not self.word_a and not self.word_b

    def __len__(self) -> int:
        return len(self.word_a) + len(self.word_b)

    def as_sequence(self) -> tuple[ProjectorSymbol, ...]:
        return self.word_a + self.word_b

    def sort_key(self) -> tuple:
        """Total length, then longer Alice part first, then lexicographic (setting, outcome)."""
        return (
            len(self),
            -len(self.word_a),
            tuple((s.setting, s.outcome) for s in self.word_a),
            tuple((s.setting, s.outcome) for s in self.word_b),
        )

    def __mul__(self, other: "Monomial") -> "Monomial":
        return mul(self, other)

    def __repr__(self) -> str:
        if self.is_zero:
            return "Zero"
        if self.is_identity:
            return "I"
        return "·".join(repr(s) for s in self.as_sequence())


def _reduce_party(word: Iterable[ProjectorSymbol]) -> tuple[ProjectorSymbol, ...] | None:
    stack: list[ProjectorSymbol] = []
    for sym in word:
        if stack:
            top = stack[-1]
            if top == sym:
                continue
            if top.setting == sym.setting:
                return None
        stack.append(sym)
    return tuple(stack)


def canonicalize(scenario: Scenario, raw: Sequence[ProjectorSymbol]) -> Monomial:
    """Normal form of the product ``raw[0] raw[1] ...``."""
    raw = [ProjectorSymbol(*sym) for sym in raw]
    for sym in raw:
        _check_symbol(scenario, sym)
    word_a = _reduce_party(s for s in raw if s.party == "A")
    word_b = _reduce_party(s for s in raw if s.party == "B")
    if word_a is None or word_b is None:
        return Monomial.zero(scenario)
    return Monomial(scenario, word_a, word_b)


def mul(m1: Monomial, m2: Monomial) -> Monomial:
    if m1.scenario != m2.scenario:
        raise AlgebraError("monomials belong to different scenarios")
    if m1.is_zero or m2.is_zero:
        return Monomial.zero(m1.scenario)
    return canonicalize(m1.scenario, m1.as_sequence() + m2.as_sequence())


def adjoint(m: Monomial) -> Monomial:
    if m.is_zero:
        return m
    # reversal of a reduced word is already reduced
    return Monomial(m.scenario, m.word_a[::-1], m.word_b[::-1])


def _reduced_words(symbols: list[ProjectorSymbol], length: int) -> Iterator[tuple[ProjectorSymbol, ...]]:
    """Words of ``length`` symbols with no two neighbours from the same setting."""
    if length == 0:
        yield ()
        return
    for word in _reduced_words(symbols, length - 1):
        for sym in symbols:
            if word and word[-1].setting == sym.setting:
                continue
            yield word + (sym,)


def monomials_up_to_level(scenario: Scenario, level: int) -> list[Monomial]:
    """Identity plus every nonzero normal-form product of at most ``level`` projectors."""
    if level < 1:
        raise AlgebraError("level must be at least 1")
    sym_a = scenario.symbols("A")
    sym_b = scenario.symbols("B")
    out = []
    for total in range(level + 1):
        for la in range(total, -1, -1):
            for wa, wb in product(_reduced_words(sym_a, la), _reduced_words(sym_b, total - la)):
                out.append(Monomial(scenario, wa, wb))
    out.sort(key=Monomial.sort_key)
    return out
