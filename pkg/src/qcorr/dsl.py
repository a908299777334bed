"""Text format for Bell functionals.

Grammar (whitespace-insensitive, case-sensitive, ``#`` starts a line comment)::

    functional := ["+"|"-"] term (("+"|"-") term)*
    term       := [number ["*"]] atom | number
    atom       := "P(" int "," int "|" int "," int ")"     joint  P(a,b|x,y)
                | "PA(" int "|" int ")"                    Alice  P_A(a|x)
                | "PB(" int "|" int ")"                    Bob    P_B(b|y)
                | "C(" int "," int ")"                     correlator of settings x, y

A correlator expands to ``sum_ab s(a) s(b) P(a,b|x,y)`` with ``s(0) = +1``
and ``s(1) = -1``; it is only defined for binary settings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import Scenario
from .bell import BellFunctional, FunctionalError

__all__ = ["ParseError", "parse_functional", "render_functional"]


class ParseError(FunctionalError):
    def __init__(self, message: str, pos: int, text: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{line}:{col}: {message}")
        self.pos = pos
        self.line = line
        self.column = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>PA|PB|P|C)
  | (?P<punct>[-+*(),|])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, scenario: Scenario):
        self.text = text
        self.scenario = scenario
        self.tokens = _tokenize(text)
        self.i = 0
        self.joint: dict[tuple[int, int, int, int], float] = {}
        self.marg_a: dict[tuple[int, int], float] = {}
        self.marg_b: dict[tuple[int, int], float] = {}
        self.constant = 0.0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.pos, self.text)

    def expect(self, text: str) -> _Token:
        tok = self.tok
        if tok.text != text:
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        self.i += 1
        return tok

    def integer(self) -> tuple[int, _Token]:
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            raise self.error("expected a non-negative integer")
        self.i += 1
        return int(tok.text), tok

    def parse(self) -> None:
        sign = 1.0
        if self.tok.text in ("+", "-"):
            sign = -1.0 if self.tok.text == "-" else 1.0
            self.i += 1
        self.term(sign)
        while self.tok.kind != "end":
            if self.tok.text not in ("+", "-"):
                raise self.error(f"expected '+' or '-', found {self.tok.text!r}")
            sign = -1.0 if self.tok.text == "-" else 1.0
            self.i += 1
            self.term(sign)

    def term(self, sign: float) -> None:
        coeff = sign
        if self.tok.kind == "number":
            coeff *= float(self.tok.text)
            self.i += 1
            if self.tok.text == "*":
                self.i += 1
            elif self.tok.kind != "name":
                self.constant += coeff
                return
        if self.tok.kind != "name":
            raise self.error("expected a number or one of P, PA, PB, C")
        self.atom(coeff)

    def atom(self, coeff: float) -> None:
        s = self.scenario
        head = self.tok
        self.i += 1
        self.expect("(")
        if head.text == "P":
            a, ta = self.integer()
            self.expect(",")
            b, tb = self.integer()
            self.expect("|")
            x, tx = self.integer()
            self.expect(",")
            y, ty = self.integer()
            self.expect(")")
            self._setting(x, s.settings_a, tx)
            self._setting(y, s.settings_b, ty)
            self._outcome(a, s.outcomes_a[x], ta)
            self._outcome(b, s.outcomes_b[y], tb)
            key = (x, y, a, b)
            self.joint[key] = self.joint.get(key, 0.0) + coeff
        elif head.text in ("PA", "PB"):
            o, to = self.integer()
            self.expect("|")
            x, tx = self.integer()
            self.expect(")")
            party = head.text[1]
            self._setting(x, s.settings(party), tx)
            self._outcome(o, s.outcomes(party)[x], to)
            target = self.marg_a if party == "A" else self.marg_b
            target[(x, o)] = target.get((x, o), 0.0) + coeff
        else:
            x, tx = self.integer()
            self.expect(",")
            y, ty = self.integer()
            self.expect(")")
            self._setting(x, s.settings_a, tx)
            self._setting(y, s.settings_b, ty)
            if s.outcomes_a[x] != 2 or s.outcomes_b[y] != 2:
                raise self.error(f"correlator C({x},{y}) needs binary settings", head)
            for a in range(2):
                for b in range(2):
                    key = (x, y, a, b)
                    value = coeff * (1 - 2 * a) * (1 - 2 * b)
                    self.joint[key] = self.joint.get(key, 0.0) + value

    def _setting(self, value: int, count: int, tok: _Token) -> None:
        if value >= count:
            raise self.error(f"setting {value} out of range (0..{count - 1})", tok)

    def _outcome(self, value: int, count: int, tok: _Token) -> None:
        if value >= count:
            raise self.error(f"outcome {value} out of range (0..{count - 1})", tok)


def parse_functional(text: str, scenario: Scenario, name: str | None = None) -> BellFunctional:
    """Parse ``text``; repeated terms accumulate."""
    p = _Parser(text, scenario)
    if p.tok.kind == "end":
        raise p.error("empty functional")
    p.parse()
    return BellFunctional(scenario, p.joint, p.marg_a, p.marg_b, p.constant, name)


def render_functional(f: BellFunctional) -> str:
    """Inverse of :func:`parse_functional` (floats printed with ``repr``)."""
    parts: list[tuple[float, str]] = []
    parts += [(v, f"P({a},{b}|{x},{y})") for (x, y, a, b), v in f.joint.items()]
    parts += [(v, f"PA({a}|{x})") for (x, a), v in f.marg_a.items()]
    parts += [(v, f"PB({b}|{y})") for (y, b), v in f.marg_b.items()]
    if f.constant != 0 or not parts:
        parts.append((f.constant, ""))
    out = []
    for i, (v, atom) in enumerate(parts):
        sign = "-" if v < 0 else "+"
        body = repr(abs(v)) + (f"*{atom}" if atom else "")
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f"{sign} {body}")
    return " ".join(out)
