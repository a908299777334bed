import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MatrixModel
from qcorr.algebra import (
    A,
    B,
    AlgebraError,
    Monomial,
    Scenario,
    adjoint,
    canonicalize,
    monomials_up_to_level,
    mul,
)

S22 = Scenario.uniform(2, 2)
S23 = Scenario.uniform(2, 3)
MIXED = Scenario(2, 3, (3, 2), (2, 4, 2))


def word(s, *syms):
    return canonicalize(s, list(syms))


def test_idempotence_example():
    assert word(S22, A(0, 0), A(0, 0)) == word(S22, A(0, 0))


def test_orthogonality_example():
    assert word(S23, A(0, 0), A(0, 1)).is_zero


def test_cross_party_commutation_example():
    m = word(S22, B(0, 0), A(1, 0))
    assert m.word_a == (A(1, 0),)
    assert m.word_b == (B(0, 0),)


def test_eliminated_outcome_is_not_a_symbol():
    with pytest.raises(AlgebraError):
        canonicalize(S22, [A(0, 1)])
    with pytest.raises(AlgebraError):
        canonicalize(S22, [B(2, 0)])
    with pytest.raises(AlgebraError):
        canonicalize(S22, [("C", 0, 0)])


@pytest.mark.parametrize(
    "bad",
    [
        dict(settings_a=0, settings_b=1, outcomes_a=(), outcomes_b=(2,)),
        dict(settings_a=1, settings_b=1, outcomes_a=(1,), outcomes_b=(2,)),
        dict(settings_a=2, settings_b=1, outcomes_a=(2,), outcomes_b=(2,)),
    ],
)
def test_scenario_validation(bad):
    with pytest.raises(AlgebraError):
        Scenario(**bad)


def test_reduced_count():
    assert MIXED.reduced_count("A") == 3
    assert MIXED.reduced_count("B") == 5


def test_mul_examples():
    ident = Monomial.identity(S23)
    m = word(S23, A(1, 1), B(0, 0))
    assert mul(ident, m) == m
    assert mul(m, ident) == m
    assert mul(word(S22, A(0, 0)), word(S22, A(0, 0))) == word(S22, A(0, 0))
    assert mul(Monomial.zero(S23), ident).is_zero


def test_mul_commutes_past_other_party_then_vanishes():
    m = mul(word(S23, A(0, 0), B(0, 0)), word(S23, A(0, 1)))
    assert m.is_zero
    # same product realized with explicit projectors
    model = MatrixModel(S23, np.random.default_rng(3), dim=3)
    raw = model.word([A(0, 0), B(0, 0), A(0, 1)])
    assert np.allclose(raw, 0, atol=1e-12)


def test_mul_scenario_mismatch():
    with pytest.raises(AlgebraError):
        mul(Monomial.identity(S22), Monomial.identity(S23))


def test_adjoint_examples():
    assert adjoint(Monomial.identity(S22)).is_identity
    assert adjoint(word(S22, A(0, 0), A(1, 0))) == word(S22, A(1, 0), A(0, 0))
    assert adjoint(Monomial.zero(S22)).is_zero


def _enumerate_by_products(s, level):
    syms = s.symbols("A") + s.symbols("B")
    found = {Monomial.identity(s)}
    for length in range(1, level + 1):
        for raw in itertools.product(syms, repeat=length):
            m = canonicalize(s, list(raw))
            if not m.is_zero:
                found.add(m)
    return found


@pytest.mark.parametrize(
    "scenario, level, expected",
    [(S22, 1, 5), (S23, 1, 9), (S23, 2, 41), (S22, 2, 13), (MIXED, 2, None), (S22, 3, None)],
)
def test_monomials_match_brute_force(scenario, level, expected):
    basis = monomials_up_to_level(scenario, level)
    oracle = _enumerate_by_products(scenario, level)
    assert len(basis) == len(set(basis))
    assert set(basis) == oracle
    if expected is not None:
        assert len(basis) == expected


def test_level_one_order():
    basis = monomials_up_to_level(S22, 1)
    assert [repr(m) for m in basis] == ["I", "A(0,0)", "A(1,0)", "B(0,0)", "B(1,0)"]


@pytest.mark.parametrize("scenario", [S22, S23, MIXED])
def test_levels_are_nested_prefixes(scenario):
    lower = monomials_up_to_level(scenario, 1)
    for k in (2, 3):
        higher = monomials_up_to_level(scenario, k)
        assert higher[: len(lower)] == lower
        lower = higher


def test_level_must_be_positive():
    with pytest.raises(AlgebraError):
        monomials_up_to_level(S22, 0)


def test_deterministic_order():
    assert monomials_up_to_level(S23, 2) == monomials_up_to_level(S23, 2)


def _symbols(scenario):
    return st.sampled_from(scenario.symbols("A") + scenario.symbols("B"))


words = st.lists(_symbols(MIXED), max_size=8)


@given(words)
def test_canonicalize_idempotent(raw):
    m = canonicalize(MIXED, raw)
    again = canonicalize(MIXED, m.as_sequence()) if not m.is_zero else m
    assert again == m


@given(words, words, words)
def test_mul_associative(r1, r2, r3):
    a, b, c = (canonicalize(MIXED, r) for r in (r1, r2, r3))
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@given(st.lists(st.sampled_from(MIXED.symbols("A")), max_size=5), st.lists(st.sampled_from(MIXED.symbols("B")), max_size=5))
def test_parties_commute(ra, rb):
    ma, mb = canonicalize(MIXED, ra), canonicalize(MIXED, rb)
    assert mul(ma, mb) == mul(mb, ma)


@given(words, words)
def test_adjoint_involution_and_antihomomorphism(r1, r2):
    a, b = canonicalize(MIXED, r1), canonicalize(MIXED, r2)
    assert adjoint(adjoint(a)) == a
    assert adjoint(mul(a, b)) == mul(adjoint(b), adjoint(a))


@settings(max_examples=200)
@given(words)
def test_normal_form_matches_matrix_realization(raw):
    model = MatrixModel(MIXED, np.random.default_rng(len(raw)), dim=4)
    m = canonicalize(MIXED, raw)
    assert np.allclose(model.monomial(m), model.word(raw), atol=1e-10)
