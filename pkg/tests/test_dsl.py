import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BINARY
from qcorr.algebra import Scenario
from qcorr.bell import BellFunctional, FunctionalError, chsh
from qcorr.dsl import ParseError, parse_functional, render_functional

S23 = Scenario.uniform(2, 3)
MIXED = Scenario(2, 2, (2, 3), (3, 2))


def test_correlator_sum_is_chsh():
    assert parse_functional("C(0,0) + C(0,1) + C(1,0) - C(1,1)", BINARY) == chsh()


def test_constant():
    f = parse_functional("1", BINARY)
    assert f.constant == 1
    assert not f.joint and not f.marg_a and not f.marg_b


def test_two_terms():
    f = parse_functional("2 P(0,1|1,0) - 0.5 PA(0|0)", BINARY)
    assert f.joint == {(1, 0, 0, 1): 2.0}
    assert f.marg_a == {(0, 0): -0.5}
    assert f.marg_b == {}


def test_terms_accumulate_and_cancel():
    f = parse_functional("P(0,0|0,0) + 2*P(0,0|0,0) - 3 P(0,0|0,0) + PB(1|1)", BINARY)
    assert f.joint == {}
    assert f.marg_b == {(1, 1): 1.0}


def test_comments_whitespace_and_leading_sign():
    text = """
    # a comment on its own line
    -P(0,0|0,0)   # trailing comment
       + 1e-1 * PA( 1 | 1 )
    + 3
    """
    f = parse_functional(text, BINARY)
    assert f.joint == {(0, 0, 0, 0): -1.0}
    assert f.marg_a == {(1, 1): 0.1}
    assert f.constant == 3


def test_case_sensitive():
    with pytest.raises(ParseError):
        parse_functional("p(0,0|0,0)", BINARY)


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("P(0,0|0,0) +", 1, 13),
        ("P(0,0|0,0) P(0,0|0,0)", 1, 12),
        ("P(0,0|0 0)", 1, 9),
        ("C(0,0) +\n  X(1)", 2, 3),
        ("", 1, 1),
        ("2 * 3", 1, 5),
        ("P(0.5,0|0,0)", 1, 3),
    ],
)
def test_syntax_errors_have_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_functional(text, BINARY)
    assert (info.value.line, info.value.column) == (line, col)
    assert str(info.value).startswith(f"{line}:{col}:")


@pytest.mark.parametrize(
    "text, col",
    [("P(0,0|2,0)", 7), ("P(2,0|0,0)", 3), ("PB(0|5)", 6), ("C(0,3)", 5)],
)
def test_index_out_of_range(text, col):
    with pytest.raises(ParseError, match="out of range") as info:
        parse_functional(text, BINARY)
    assert info.value.column == col


def test_outcome_range_depends_on_setting():
    assert parse_functional("PA(2|1)", MIXED).marg_a == {(1, 2): 1.0}
    with pytest.raises(ParseError):
        parse_functional("PA(2|0)", MIXED)


def test_correlator_needs_binary_settings():
    with pytest.raises(ParseError, match="binary"):
        parse_functional("C(0,0)", S23)
    assert parse_functional("C(0,1)", MIXED).joint  # both settings binary
    with pytest.raises(ParseError, match="binary"):
        parse_functional("C(1,1)", MIXED)


def test_parse_error_is_functional_error():
    assert issubclass(ParseError, FunctionalError)


def test_render_examples():
    assert render_functional(BellFunctional(BINARY)) == "0.0"
    f = parse_functional("2 P(0,1|1,0) - 0.5 PA(0|0)", BINARY)
    assert render_functional(f) == "2.0*P(0,1|1,0) - 0.5*PA(0|0)"


values = st.floats(-1e6, 1e6, allow_nan=False).filter(lambda v: v != 0)


@st.composite
def functionals(draw, scenario=MIXED):
    s = scenario
    joint_keys = [
        (x, y, a, b)
        for x, y in itertools.product(range(s.settings_a), range(s.settings_b))
        for a, b in itertools.product(range(s.outcomes_a[x]), range(s.outcomes_b[y]))
    ]
    joint = draw(st.dictionaries(st.sampled_from(joint_keys), values, max_size=6))
    ka = [(x, a) for x in range(s.settings_a) for a in range(s.outcomes_a[x])]
    kb = [(y, b) for y in range(s.settings_b) for b in range(s.outcomes_b[y])]
    marg_a = draw(st.dictionaries(st.sampled_from(ka), values, max_size=3))
    marg_b = draw(st.dictionaries(st.sampled_from(kb), values, max_size=3))
    constant = draw(st.one_of(st.just(0.0), values))
    return BellFunctional(s, joint, marg_a, marg_b, constant)


@given(functionals())
def test_render_parse_roundtrip(f):
    assert parse_functional(render_functional(f), f.scenario) == f
