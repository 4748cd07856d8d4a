import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bisimlogic.errors import EmptyFormulaSet, UnknownAction
from bisimlogic.instances import make_rng, random_mdp
from bisimlogic.logic.semantics import (Evaluator, eval_formula, logical_distance, op_add, op_and,
                                        op_cx, op_not, op_plus, op_scale, op_sub)
from bisimlogic.logic.syntax import TOP, And, Dia, Not, Plus, parse_formula
from bisimlogic.model import Mdp

from formulas import l_formulas, lprime_formulas


def nested(k, action="a"):
    phi = TOP
    for _ in range(k):
        phi = Dia(action, phi)
    return phi


def test_top_is_one(selfloop):
    np.testing.assert_array_equal(eval_formula(TOP, selfloop, 0.5), [1.0, 1.0])


def test_diamond_values(selfloop):
    np.testing.assert_allclose(eval_formula(nested(1), selfloop, 0.5), [1.0, 0.5])
    np.testing.assert_allclose(eval_formula(nested(2), selfloop, 0.5), [1.0, 0.25])


def test_nested_diamonds_closed_form(selfloop):
    # at s1 the value solves v_k = 0.5 v_(k-1) with v_0 = 1
    for k in range(8):
        np.testing.assert_allclose(eval_formula(nested(k), selfloop, 0.5), [1.0, 0.5 ** k])


def test_and_with_top_is_identity(selfloop):
    phi = parse_formula("add(sub(dia(a, not(dia(a, T))), 0.1), 0.05)")
    ev = Evaluator(selfloop, 0.5)
    np.testing.assert_array_equal(ev(And(phi, TOP)), ev(phi))


def test_reference_interpreter_agrees():
    rng = make_rng(3)
    m = random_mdp(rng, 4, 2)
    c = 0.6
    phi = parse_formula("cc(0.3, dia(a1, add(not(dia(a0, T)), 0.2)), scale(0.5, sub(dia(a1, T), 0.1)))")
    # hand-expanded, one line per operator
    d0 = c * m.kernel[0] @ np.ones(4) + (1 - c) * m.rewards[0]
    inner = np.minimum(1, (1 - d0) + 0.2)
    left = c * m.kernel[1] @ inner + (1 - c) * m.rewards[1]
    right = 0.5 * np.maximum(0, (c * m.kernel[1] @ np.ones(4) + (1 - c) * m.rewards[1]) - 0.1)
    np.testing.assert_allclose(eval_formula(phi, m, c), 0.3 * left + 0.7 * right, atol=1e-14)


def test_lprime_semantics(selfloop):
    ev = Evaluator(selfloop, 0.5)
    np.testing.assert_allclose(ev(parse_formula("rew(a)")), [1.0, 0.0])
    np.testing.assert_allclose(ev(parse_formula("diap(a, T)")), [0.5, 0.5])
    np.testing.assert_allclose(ev(parse_formula("plus(rew(a), diap(a, T))")), [1.0, 0.5])


def test_unknown_action_at_evaluation(selfloop):
    with pytest.raises(UnknownAction):
        eval_formula(Dia("zz", TOP), selfloop, 0.5)


def test_results_are_read_only(selfloop):
    v = eval_formula(nested(2), selfloop, 0.5)
    with pytest.raises(ValueError):
        v[0] = 0.0


def test_logical_distance_examples(selfloop):
    assert np.all(logical_distance([TOP], selfloop, 0.5) == 0.0)
    for K in range(1, 7):
        d = logical_distance([nested(k) for k in range(K + 1)], selfloop, 0.5)
        assert d[0, 1] == pytest.approx(1 - 0.5 ** K)
    with pytest.raises(EmptyFormulaSet):
        logical_distance([], selfloop, 0.5)


def test_negation_symmetry():
    m = random_mdp(make_rng(4), 4, 2)
    base = [nested(k, "a0") for k in range(4)] + [nested(2, "a1"), parse_formula("sub(dia(a1,T),0.3)")]
    closed = base + [Not(f) for f in base]
    # 1 - x is exact only up to rounding of the subtraction
    np.testing.assert_allclose(logical_distance(closed, m, 0.5, signed=True),
                               logical_distance(closed, m, 0.5), atol=1e-15, rtol=0)


# -- properties ----------------------------------------------------------------

TWO_ACTIONS = random_mdp(make_rng(5), 4, 2)


@settings(max_examples=100, deadline=None)
@given(l_formulas(TWO_ACTIONS.actions, extended=True), st.sampled_from([0.0, 0.4, 1.0]))
def test_range_preservation(phi, c):
    v = eval_formula(phi, TWO_ACTIONS, c)
    assert np.all((v >= 0.0) & (v <= 1.0))


@settings(max_examples=100, deadline=None)
@given(lprime_formulas(TWO_ACTIONS.actions))
def test_range_preservation_lprime(phi):
    v = eval_formula(phi, TWO_ACTIONS, 0.5)
    assert np.all((v >= 0.0) & (v <= 1.0))


vec = arrays(float, 6, elements=st.floats(0.0, 1.0))


@settings(max_examples=200, deadline=None)
@given(vec, vec, vec, vec, st.floats(0.0, 1.0))
def test_operators_nonexpansive(u1, u2, v1, v2, r):
    gap1 = np.abs(u1 - v1)
    gap2 = np.maximum(gap1, np.abs(u2 - v2))
    for f, gap in [(lambda a, b: op_not(a), gap1), (lambda a, b: op_add(a, r), gap1),
                   (lambda a, b: op_sub(a, r), gap1), (lambda a, b: op_scale(a, r), gap1),
                   (op_and, gap2), (lambda a, b: op_cx(a, b, r), gap2)]:
        assert np.all(np.abs(f(u1, u2) - f(v1, v2)) <= gap + 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.2, 0.5, 0.9]))
def test_diamond_nonexpansive(seed, c):
    rng = make_rng(seed)
    m = random_mdp(rng, 5, 2)
    ev = Evaluator(m, c)
    u, v = rng.random(5), rng.random(5)
    du = c * m.kernel @ u + (1 - c) * m.rewards
    dv = c * m.kernel @ v + (1 - c) * m.rewards
    assert np.abs(du - dv).max() <= np.abs(u - v).max() + 1e-12
    assert ev(TOP).shape == (5,)


def test_truncated_addition_is_not_nonexpansive():
    value_gap = op_plus(0.5, 0.5) - op_plus(0.4, 0.4)
    assert op_plus(0.5, 0.5) == 1.0 and op_plus(0.4, 0.4) == pytest.approx(0.8)
    assert value_gap == pytest.approx(0.2)
    assert value_gap > 0.1 + 1e-12
    # the same violation through the evaluator on a model with those rewards
    m = Mdp(["p", "q"], ["a"], np.eye(2)[None], np.array([[0.5, 0.4]]))
    v = eval_formula(Plus(parse_formula("rew(a)"), parse_formula("rew(a)")), m, 0.5)
    assert v[0] - v[1] == pytest.approx(0.2)
