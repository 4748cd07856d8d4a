"""Bisimulation pseudometrics as least fixpoints of the reward/transport functional.

For a discount ``c`` the functional sends a pseudometric ``d`` to

    T(d)(x, y) = max_a  c * W_d(P[a, x], P[a, y]) + (1 - c) * |R[a, x] - R[a, y]|

where ``W_d`` is the optimal-transport lift of ``d``. ``T`` is monotone and
continuous on chains, so Kleene iteration from the zero pseudometric climbs
to its least fixpoint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .model import METRIC_TOL, Mdp, PMetric, validate_pmetric
from .transport import transport_value


@dataclass(frozen=True)
class DiscountConfig:
    c: float

    def __post_init__(self):
        c = float(self.c)
        if not 0.0 <= c <= 1.0:
            raise ValidationError(f"discount must lie in [0,1], got {self.c!r}")
        object.__setattr__(self, "c", c)


def _discount(c) -> float:
    return c.c if isinstance(c, DiscountConfig) else DiscountConfig(c).c


@dataclass(frozen=True, eq=False)
class FixpointReport:
    metric: PMetric
    iterations: int
    final_delta: float
    converged: bool


def _matrix(d, m: Mdp) -> np.ndarray:
    d = validate_pmetric(d).d
    if d.shape[0] != m.n_states:
        raise DimensionMismatch(f"metric is {d.shape[0]}x{d.shape[0]} for a {m.n_states}-state model")
    return d


def _action_term(d, c, m, a, x, y) -> float:
    reward_gap = abs(m.rewards[a, x] - m.rewards[a, y])
    if c == 0.0:
        return reward_gap
    w = transport_value(d, m.kernel[a, x], m.kernel[a, y])
    return c * w + (1.0 - c) * reward_gap


def lift_mrp(d, c, a: int, m: Mdp, x: int, y: int) -> float:
    """``c * W_d(P[a,x], P[a,y]) + (1-c) * |R[a,x] - R[a,y]|`` for one action."""
    return _action_term(_matrix(d, m), _discount(c), m, a, x, y)


def lift_mdp(d, c, m: Mdp, x: int, y: int) -> float:
    """Maximum of :func:`lift_mrp` over the actions of ``m``."""
    d, c = _matrix(d, m), _discount(c)
    return max(_action_term(d, c, m, a, x, y) for a in range(m.n_actions))


def action_terms(d: np.ndarray, c: float, m: Mdp) -> np.ndarray:
    """Per-action lift values, shape ``(n_actions, n, n)``; upper triangle mirrored."""
    n, k = m.n_states, m.n_actions
    terms = np.zeros((k, n, n))
    for x in range(n):
        for y in range(x + 1, n):
            for a in range(k):
                terms[a, x, y] = terms[a, y, x] = _action_term(d, c, m, a, x, y)
    return terms


def _apply(d: np.ndarray, c: float, m: Mdp) -> np.ndarray:
    if m.n_states == 1:
        return np.zeros((1, 1))
    return np.clip(action_terms(d, c, m).max(axis=0), 0.0, 1.0)


def apply_functional(d, c, m: Mdp) -> PMetric:
    """One application of the functional; the result is validated as a pseudometric."""
    return validate_pmetric(_apply(_matrix(d, m), _discount(c), m))


def kleene_iterates(m: Mdp, c) -> Iterator[np.ndarray]:
    """Yield ``d_0 = 0, d_1 = T(d_0), d_2 = T(d_1), ...`` forever."""
    c = _discount(c)
    d = np.zeros((m.n_states, m.n_states))
    while True:
        yield d
        d = _apply(d, c, m)


def default_max_iters(c, tol: float) -> int:
    c = _discount(c)
    if c in (0.0, 1.0):
        return 1000
    return 10 * math.ceil(math.log(tol) / math.log(c))


def bisim_metric(m: Mdp, c, tol: float = 1e-9, max_iters: int | None = None) -> FixpointReport:
    """Kleene iteration until the sup-norm step is at most ``tol``.

    Not converging within ``max_iters`` is reported through
    ``converged=False``, never raised: at ``c = 1`` progress can be
    arbitrarily slow.
    """
    c = _discount(c)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iters is None:
        max_iters = default_max_iters(c, tol)
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    d = np.zeros((m.n_states, m.n_states))
    delta = math.inf
    it = 0
    while it < max_iters:
        nxt = _apply(d, c, m)
        it += 1
        delta = float(np.abs(nxt - d).max())
        d = nxt
        if c == 0.0:
            # T ignores its argument, so T(d_1) = d_1 exactly
            delta = 0.0
        if delta <= tol:
            break
    return FixpointReport(validate_pmetric(d), it, delta, delta <= tol)


def certify_upper_bound(m: Mdp, c, d, tol: float = METRIC_TOL) -> bool:
    """True iff ``T(d) <= d`` entrywise (within ``tol``).

    Any such prefixpoint dominates the least fixpoint, so a True answer
    certifies ``bisim_metric(m, c) <= d``.
    """
    d = _matrix(d, m)
    return bool(np.all(_apply(d, _discount(c), m) <= d + tol))
