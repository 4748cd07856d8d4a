import numpy as np
import pytest

from bisimlogic.instances import make_rng, random_mdp
from bisimlogic.logic.enumeration import enumerate_formulas, enumerate_theory
from bisimlogic.logic.semantics import Evaluator, logical_distance
from bisimlogic.logic.syntax import TOP, AddC, And, Dia, Not, SubC, nodes


def naive(m, depth, grid):
    """Every formula of depth <= ``depth``, no sharing, no deduplication."""
    layers = [[TOP]]
    everything = [TOP]
    for _ in range(depth):
        prev = everything[:]
        new = [Not(f) for f in prev]
        new += [And(f, g) for f in prev for g in prev]
        new += [Dia(a, f) for a in m.actions for f in prev]
        new += [op(f, r) for f in prev for r in grid for op in (AddC, SubC)]
        everything = prev + new
        layers.append(new)
    return everything


def vector_set(values):
    return {tuple(row) for row in np.round(values, 10)}


def test_depth_zero(selfloop):
    assert enumerate_formulas(selfloop, 0) == [TOP]


def test_depth_one_single_action(selfloop):
    raw = enumerate_formulas(selfloop, 1, [0.5], c=0.5, dedup=False)
    assert set(raw) == {TOP, Not(TOP), And(TOP, TOP), Dia("a", TOP), AddC(TOP, 0.5), SubC(TOP, 0.5)}
    dedup = enumerate_theory(selfloop, 1, [0.5], c=0.5)
    # and(T,T) and add(T,0.5) collapse onto T
    assert set(dedup.formulas) == {TOP, Not(TOP), Dia("a", TOP), SubC(TOP, 0.5)}
    assert list(dedup.depth_of) == [0, 1, 1, 1]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_matches_naive_enumerator(seed):
    m = random_mdp(make_rng(seed), 3, 2)
    ev = Evaluator(m, 0.5)
    for depth in (1, 2):
        oracle = vector_set(ev.many(naive(m, depth, [0.25, 0.5])))
        enum = enumerate_theory(m, depth, c=0.5)
        assert vector_set(enum.values) == oracle
        # stored values are the true semantics of the stored formulas
        np.testing.assert_allclose(ev.many(enum.formulas), enum.values, atol=1e-15)


def test_depth_tags_match_syntax():
    m = random_mdp(make_rng(3), 3, 2)
    enum = enumerate_theory(m, 3)

    def depth(phi):
        out = {}
        for node in nodes(phi):
            out[id(node)] = 1 + max((out[id(ch)] for ch in node.children()), default=-1)
        return out[id(phi)]

    assert [depth(f) for f in enum.formulas] == list(enum.depth_of)


@pytest.mark.parametrize("language", ["L", "Lprime"])
def test_dedup_is_sound(language):
    rng = make_rng(4)
    for _ in range(3):
        m = random_mdp(rng, 3, 2)
        full = enumerate_formulas(m, 2, c=0.5, language=language, dedup=False)
        small = enumerate_formulas(m, 2, c=0.5, language=language)
        assert len(small) < len(full)
        np.testing.assert_allclose(logical_distance(small, m, 0.5), logical_distance(full, m, 0.5),
                                   atol=1e-12)


def test_monotone_in_depth():
    m = random_mdp(make_rng(5), 5, 2)
    prev = np.zeros((5, 5))
    for depth in range(5):
        cur = logical_distance(enumerate_formulas(m, depth), m, 0.5)
        assert np.all(cur >= prev - 1e-15)
        prev = cur


def test_lprime_signature(selfloop):
    enum = enumerate_theory(selfloop, 1, [0.5], language="Lprime")
    assert all(f.language == "Lprime" or f == TOP or f == Not(TOP) for f in enum.formulas)
    kinds = {type(f).__name__ for f in enum.formulas}
    assert {"Rew", "DiaPrime"} <= kinds and "Dia" not in kinds


def test_bad_arguments(selfloop):
    with pytest.raises(ValueError):
        enumerate_formulas(selfloop, -1)
    with pytest.raises(ValueError):
        enumerate_formulas(selfloop, 1, [1.5])
