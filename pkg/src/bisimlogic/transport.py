"""Exact optimal transport between finite distributions.

The primal side minimises the expected cost over couplings; the dual side
maximises ``h @ (mu - nu)`` over [0,1]-valued potentials that are short
(1-Lipschitz) for the cost pseudometric. On a finite space the two optima
coincide, and :func:`duality_gap` measures how closely the solvers agree.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidExponent
from .model import Dist, validate_pmetric
from .simplex import solve_potential, solve_transport

FEASIBILITY_TOL = 1e-8
DUALITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class TransportSolution:
    value: float
    coupling: np.ndarray
    potential: np.ndarray
    gap: float
    primal_value: float
    dual_value: float


def _as_probs(mu) -> np.ndarray:
    return mu.probs if isinstance(mu, Dist) else Dist(mu).probs


def _operands(d, mu, nu):
    d = validate_pmetric(d).d
    mu, nu = _as_probs(mu), _as_probs(nu)
    if not (len(mu) == len(nu) == d.shape[0]):
        raise DimensionMismatch(
            f"metric is {d.shape[0]}x{d.shape[0]} but marginals have lengths {len(mu)}, {len(nu)}")
    return d, mu, nu


def expectation(p, mu) -> float:
    """Expected value of the predicate ``p`` under ``mu``."""
    p = np.asarray(p, dtype=float)
    mu = _as_probs(mu)
    if p.shape != mu.shape:
        raise DimensionMismatch(f"predicate has length {len(p)}, distribution {len(mu)}")
    return float(min(1.0, max(0.0, p @ mu)))


def expectations(p, kernel) -> np.ndarray:
    """Row-wise expectations ``kernel @ p`` for a stack of distributions."""
    p = np.asarray(p, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    if kernel.shape[-1] != p.shape[-1]:
        raise DimensionMismatch(f"kernel rows have length {kernel.shape[-1]}, predicate {p.shape[-1]}")
    return np.clip(kernel @ p, 0.0, 1.0)


def transport_value(d: np.ndarray, mu: np.ndarray, nu: np.ndarray) -> float:
    """Primal optimum only, no validation. Used on hot paths by ``bisim``."""
    if np.array_equal(mu, nu):
        return 0.0
    return solve_transport(d, mu, nu)[0]


def _solve(d, mu, nu) -> TransportSolution:
    if np.array_equal(mu, nu):
        n = len(mu)
        return TransportSolution(0.0, np.diag(mu), np.zeros(n), 0.0, 0.0, 0.0)
    primal, omega = solve_transport(d, mu, nu)
    dual, h = solve_potential(d, mu, nu)
    # normalise the potential so min h = 0; the objective is shift-invariant
    h = h - h.min()
    return TransportSolution(primal, omega, h, abs(primal - dual), primal, dual)


def wasserstein_primal(d, mu, nu) -> TransportSolution:
    """Optimal coupling attaining ``min_omega sum d * omega``.

    ``value`` is the primal optimum; ``potential`` and ``gap`` come from a
    dual solve on the same instance.
    """
    return _solve(*_operands(d, mu, nu))


def wasserstein_dual(d, mu, nu) -> TransportSolution:
    """Optimal short potential attaining ``max_h h @ (mu - nu)``; ``value`` is the dual optimum."""
    sol = _solve(*_operands(d, mu, nu))
    return TransportSolution(sol.dual_value, sol.coupling, sol.potential, sol.gap,
                             sol.primal_value, sol.dual_value)


def duality_gap(d, mu, nu) -> float:
    return wasserstein_primal(d, mu, nu).gap


def is_short(h, d, tol: float = 1e-9) -> bool:
    """``h(x) - h(y) <= d(x, y) + tol`` for every ordered pair."""
    h = np.asarray(h, dtype=float)
    d = np.asarray(d, dtype=float)
    return bool(np.all(h[:, None] - h[None, :] <= d + tol))


def wasserstein_p_solution(d, mu, nu, p: float):
    """``(W_p, coupling)`` for the cost ``d**p``."""
    if not p >= 1:
        raise InvalidExponent(f"exponent must be >= 1, got {p!r}")
    d, mu, nu = _operands(d, mu, nu)
    if np.array_equal(mu, nu):
        return 0.0, np.diag(mu)
    value, omega = solve_transport(d ** p, mu, nu)
    return float(max(value, 0.0) ** (1.0 / p)), omega


def wasserstein_p(d, mu, nu, p: float) -> float:
    """p-Wasserstein distance ``(min_omega sum d**p * omega) ** (1/p)``."""
    return wasserstein_p_solution(d, mu, nu, p)[0]

