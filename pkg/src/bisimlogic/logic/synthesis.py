"""Constructive witnesses: formulas whose value gaps realise the bisimulation metric.

Three layers, bottom-up:

* :func:`approximate_at_pair` shifts and truncates a separating formula so
  it matches a short predicate exactly at one state and from below, within
  ``eps``, at another;
* :func:`lattice_approximate` glues those pair approximations with min/max
  into one formula uniformly within ``eps`` of the predicate;
* :func:`expressivity_witnesses` runs that alongside Kleene iteration: at
  every level the optimal transport potential against the previous iterate
  is approximated by previous-level witnesses and wrapped in ``dia``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..bisim import _discount, action_terms
from ..errors import HypothesisViolated, MissingWitness
from ..model import Mdp
from ..transport import wasserstein_dual
from .semantics import Evaluator, distance_from_values
from .syntax import TOP, AddC, And, Dia, Formula, Not, SubC, conj, const, disj


@dataclass(frozen=True, eq=False)
class WitnessSet:
    formulas: list
    achieved: np.ndarray
    by_pair: dict = field(default_factory=dict)
    iterate: np.ndarray | None = None  # the Kleene iterate the witnesses target


def _gap_constant(hx: float, hy: float) -> float:
    """Largest ``k <= hx - hy`` whose encoding ``sub(T, 1 - k)`` plus ``hy`` rounds to at most ``hx``."""
    k = hx - hy
    for _ in range(64):
        realised = max(0.0, 1.0 - (1.0 - k))
        excess = min(1.0, realised + hy) - hx
        if excess <= 0.0:
            return k
        # the encoding is quantised at the spacing of floats near 1
        k = max(0.0, k - max(excess, float(np.spacing(1.0))))
    return 0.0


def approximate_at_pair(h, x: int, y: int, witness: Formula, eps: float, m: Mdp, c,
                        evaluator: Evaluator | None = None) -> Formula:
    """Formula ``psi`` with ``psi(y) = h(y)`` and ``0 <= h(x) - psi(x) < eps``.

    Requires ``h(x) >= h(y)`` and a witness separating the pair by more than
    ``h(x) - h(y) - eps``. When ``h(x) - h(y) < eps`` the constant ``T``
    already qualifies and is used in place of a failing witness.
    """
    h = np.asarray(h, dtype=float)
    hx, hy = float(h[x]), float(h[y])
    if hx < hy:
        raise HypothesisViolated(f"need h({x}) >= h({y}), got {hx!r} < {hy!r}")
    ev = evaluator or Evaluator(m, c)
    w = ev(witness)
    if not w[x] - w[y] > (hx - hy) - eps:
        if hx - hy < eps:
            witness, w = TOP, ev(TOP)
        else:
            raise HypothesisViolated(
                f"witness separates ({x},{y}) by {w[x] - w[y]!r}, "
                f"needs more than {hx - hy - eps!r}")
    shifted = SubC(witness, float(w[y]))
    return AddC(And(shifted, const(_gap_constant(hx, hy))), hy)


def lattice_approximate(h, eps: float, pair_witnesses: dict, m: Mdp, c,
                        evaluator: Evaluator | None = None) -> Formula:
    """``max_u min_v psi_uv``, within ``eps`` of ``h`` in sup norm (from below).

    ``pair_witnesses[(u, v)]`` must separate ``u`` from ``v`` whenever
    ``h(u) >= h(v)``; pairs with ``h(u) - h(v) < eps`` may be omitted.
    """
    h = np.asarray(h, dtype=float)
    n = len(h)
    if n == 1:
        return const(float(h[0]))
    ev = evaluator or Evaluator(m, c)
    cache = {}

    def psi(x, y):
        # oriented so h(x) >= h(y)
        if (x, y) not in cache:
            wit = pair_witnesses.get((x, y))
            if wit is None:
                if h[x] - h[y] >= eps:
                    raise MissingWitness((x, y))
                wit = TOP
            cache[x, y] = approximate_at_pair(h, x, y, wit, eps, m, c, ev)
        return cache[x, y]

    rows = []
    for u in range(n):
        terms = [psi(u, v) if h[u] >= h[v] else psi(v, u) for v in range(n) if v != u]
        rows.append(conj(terms))
    return disj(rows)


def best_pair_witnesses(pool, evaluator: Evaluator) -> dict:
    """For each ordered pair, the pool formula maximising ``phi(u) - phi(v)``."""
    values = evaluator.many(pool)
    n = values.shape[1]
    gaps = values[:, :, None] - values[:, None, :]
    best = gaps.argmax(axis=0)
    return {(u, v): pool[best[u, v]] for u in range(n) for v in range(n) if u != v}


def witness_error_bound(c, depth: int, eps: float) -> float:
    """``delta(n) = c * (delta(n-1) + eps)``, ``delta(0) = 0``."""
    c = _discount(c)
    delta = 0.0
    for _ in range(depth):
        delta = c * (delta + eps)
    return delta


def expressivity_witnesses(m: Mdp, c, depth: int, eps: float,
                           evaluator: Evaluator | None = None) -> WitnessSet:
    """Witness formulas for every ordered state pair after ``depth`` Kleene steps.

    ``achieved(x, y) >= d_depth(x, y) - witness_error_bound(c, depth, eps)``
    where ``d_depth`` is the ``depth``-th Kleene iterate.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    c = _discount(c)
    ev = evaluator or Evaluator(m, c)
    n, K, R = m.n_states, m.kernel, m.rewards
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    by_pair = {p: TOP for p in pairs}
    d = np.zeros((n, n))
    for _ in range(depth):
        terms = action_terms(d, c, m)
        pool = list({id(f): f for f in by_pair.values()}.values()) or [TOP]
        pool_witnesses = best_pair_witnesses(pool, ev)
        new = {}
        for x in range(n):
            for y in range(x + 1, n):
                a = int(np.argmax(terms[:, x, y]))
                p, q = (x, y) if R[a, x] >= R[a, y] else (y, x)
                if c > 0.0 and not np.array_equal(K[a, p], K[a, q]):
                    h = wasserstein_dual(d, K[a, p], K[a, q]).potential
                    if h @ (K[a, p] - K[a, q]) < 0:
                        h = 1.0 - h
                    g = lattice_approximate(h, eps, pool_witnesses, m, c, ev)
                else:
                    g = TOP
                phi = Dia(m.actions[a], g)
                new[p, q] = phi
                new[q, p] = Not(phi)
        by_pair = new
        d = np.clip(terms.max(axis=0), 0.0, 1.0) if n > 1 else np.zeros((1, 1))
    formulas = [by_pair[p] for p in pairs] or [TOP]
    achieved = distance_from_values(ev.many(formulas), signed=True)
    np.fill_diagonal(achieved, 0.0)
    return WitnessSet(formulas, achieved, by_pair, d)
