import pytest
from hypothesis import given, settings

from bisimlogic.errors import FormulaSyntaxError, LanguageError, ScalarOutOfRange, UnknownAction
from bisimlogic.logic.syntax import (TOP, AddC, And, Dia, Not, Or, Plus, Rew, SubC, Top, actions_of,
                                     conj, const, dag_size, disj, nodes, parse_formula, to_text)

from formulas import l_formulas, lprime_formulas


def test_parse_examples():
    assert parse_formula("dia(a, T)") == Dia("a", Top())
    assert parse_formula("add(not(T), 0.3)") == AddC(Not(TOP), 0.3)
    with pytest.raises(ScalarOutOfRange):
        parse_formula("add(T, 1.5)")


def test_whitespace_is_insignificant():
    assert parse_formula(" and ( T ,\n dia(a,T) ) ") == And(TOP, Dia("a", TOP))


def test_or_is_sugar():
    assert parse_formula("or(T, dia(a, T))") == Not(And(Not(TOP), Not(Dia("a", TOP))))
    assert Or(TOP, TOP) == Not(And(Not(TOP), Not(TOP)))


@pytest.mark.parametrize("text, pos", [("dia(a T)", 6), ("and(T,)", 6), ("T T", 2), ("not(T", 5), ("$", 0)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula(text)
    assert err.value.position == pos
    assert f"position {pos}" in str(err.value)


def test_unknown_action():
    with pytest.raises(UnknownAction):
        parse_formula("dia(b, T)", actions=["a"])


def test_language_restriction():
    assert parse_formula("plus(rew(a), T)").language == "Lprime"
    assert parse_formula("dia(a, T)").language == "L"
    with pytest.raises(LanguageError):
        parse_formula("plus(T, T)", language="L")


def test_scalars_checked_on_construction():
    with pytest.raises(ScalarOutOfRange):
        SubC(TOP, -0.1)


def test_const_and_folds():
    assert const(0.3) == SubC(TOP, 1 - 0.3)
    items = [Dia("a", TOP), TOP, Not(TOP), Rew("a")]
    assert conj(items[:1]) is items[0]
    assert len(list(nodes(conj(items)))) == dag_size(conj(items))
    assert actions_of(disj(items)) == {"a"}
    assert conj(items).language == "Lprime"


def test_deep_formula_does_not_recurse():
    phi = TOP
    for _ in range(5000):
        phi = Dia("a", phi)
    assert dag_size(phi) == 5001


@settings(max_examples=150, deadline=None)
@given(l_formulas(("a", "b"), extended=True))
def test_round_trip_l(phi):
    assert parse_formula(to_text(phi)) == phi


@settings(max_examples=100, deadline=None)
@given(lprime_formulas(("a", "go")))
def test_round_trip_lprime(phi):
    assert parse_formula(to_text(phi), language="Lprime") == phi


def test_plus_prints():
    assert to_text(Plus(Rew("a"), TOP)) == "plus(rew(a), T)"
