"""Interpretation of formulas as [0,1]-valued state predicates.

``dia(a, phi)`` at ``x`` is the convex combination
``c * E[phi | P[a, x]] + (1 - c) * R[a, x]``; its L' counterpart ``diap``
drops the reward term, which ``rew(a)`` exposes on its own.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch, EmptyFormulaSet, UnknownAction
from ..model import Mdp
from ..transport import expectations
from .syntax import (AddC, And, Cx, Dia, DiaPrime, Formula, Not, Plus, Rew, Scale, SubC, Top,
                     nodes)


# Interpreted operators on [0,1]; each L operator is nonexpansive for the sup distance.
def op_not(x):
    return 1.0 - x


def op_and(x, y):
    return np.minimum(x, y)


def op_add(x, r):
    return np.minimum(1.0, x + r)


def op_sub(x, r):
    return np.maximum(0.0, x - r)


def op_scale(x, r):
    return r * x


def op_cx(x, y, c):
    return c * x + (1.0 - c) * y


def op_plus(x, y):
    return np.minimum(1.0, x + y)


class Evaluator:
    """Memoising evaluator for one (model, discount) pair.

    Results are cached per formula *object*, so shared subterms of a DAG are
    evaluated once. Returned arrays are read-only.
    """

    def __init__(self, m: Mdp, c: float):
        c = float(getattr(c, "c", c))
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"discount must lie in [0,1], got {c!r}")
        self.m = m
        self.c = c
        self._cache = {}
        self._ones = np.ones(m.n_states)
        self._ones.setflags(write=False)

    def _action(self, label):
        try:
            return self.m.actions.index(label)
        except ValueError:
            raise UnknownAction(label) from None

    def _compute(self, phi, val):
        m, c = self.m, self.c
        if isinstance(phi, Top):
            return self._ones
        if isinstance(phi, Not):
            return op_not(val(phi.arg))
        if isinstance(phi, And):
            return op_and(val(phi.left), val(phi.right))
        if isinstance(phi, Dia):
            a = self._action(phi.action)
            return np.clip(c * expectations(val(phi.arg), m.kernel[a]) + (1.0 - c) * m.rewards[a], 0.0, 1.0)
        if isinstance(phi, AddC):
            return op_add(val(phi.arg), phi.r)
        if isinstance(phi, SubC):
            return op_sub(val(phi.arg), phi.r)
        if isinstance(phi, Scale):
            return op_scale(val(phi.arg), phi.r)
        if isinstance(phi, Cx):
            return np.clip(op_cx(val(phi.left), val(phi.right), phi.c), 0.0, 1.0)
        if isinstance(phi, Rew):
            return m.rewards[self._action(phi.action)]
        if isinstance(phi, DiaPrime):
            a = self._action(phi.action)
            return c * expectations(val(phi.arg), m.kernel[a])
        if isinstance(phi, Plus):
            return op_plus(val(phi.left), val(phi.right))
        raise TypeError(f"not a formula: {phi!r}")

    def __call__(self, phi: Formula) -> np.ndarray:
        hit = self._cache.get(id(phi))
        if hit is not None:
            return hit[1]

        def val(node):
            return self._cache[id(node)][1]

        for node in nodes(phi):
            if id(node) in self._cache:
                continue
            v = np.asarray(self._compute(node, val), dtype=float)
            if v.flags.writeable:
                v.setflags(write=False)
            # keep the node alive so its id cannot be reused
            self._cache[id(node)] = (node, v)
        return self._cache[id(phi)][1]

    def many(self, formulas: Sequence[Formula]) -> np.ndarray:
        if not len(formulas):
            return np.zeros((0, self.m.n_states))
        return np.stack([self(f) for f in formulas])


def eval_formula(phi: Formula, m: Mdp, c) -> np.ndarray:
    """Theory vector of ``phi``: its value at every state of ``m``."""
    return Evaluator(m, c)(phi)


def distance_from_values(values: np.ndarray, signed: bool = False, chunk: int = 4096) -> np.ndarray:
    """``max_phi |v_phi(x) - v_phi(y)|`` (or the signed difference) over the rows of ``values``."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise DimensionMismatch("values must be a (formulas, states) matrix")
    if len(values) == 0:
        raise EmptyFormulaSet("logical distance over an empty formula set")
    n = values.shape[1]
    out = np.full((n, n), -np.inf)
    for start in range(0, len(values), chunk):
        v = values[start:start + chunk]
        diff = v[:, :, None] - v[:, None, :]
        if not signed:
            diff = np.abs(diff)
        np.maximum(out, diff.max(axis=0), out=out)
    return out


def logical_distance(formulas: Sequence[Formula], m: Mdp, c, signed: bool = False,
                     evaluator: Evaluator | None = None) -> np.ndarray:
    """Logical distance restricted to ``formulas``, a lower bound on the full one.

    With ``signed=True`` the difference ``v(x) - v(y)`` is maximised without
    the absolute value; on a negation-closed set both agree.
    """
    if not len(formulas):
        raise EmptyFormulaSet("logical distance over an empty formula set")
    ev = evaluator or Evaluator(m, c)
    return distance_from_values(ev.many(formulas), signed=signed)
