"""Dense tableau simplex with Bland's anti-cycling rule.

The tableau ``T`` has one row per constraint plus a final reduced-cost row;
the last column is the right-hand side. ``basis[i]`` is the column basic in
row ``i``. Only columns ``< ncols`` may enter, which is how artificial
variables are barred in phase II.

Two interchangeable kernels run the pivoting loop: :func:`run_simplex_loops`
(explicit loops, compiled by numba when available) and
:func:`run_simplex_numpy` (vectorised row operations). :data:`run_simplex`
is whichever one the environment selects.
"""
import numpy as np

from ._jit import NUMBA_ENABLED, njit
from .errors import SolverFailure

PIVOT_TOL = 1e-11
RATIO_TOL = 1e-13

OPTIMAL, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2


@njit
def run_simplex_loops(T, basis, ncols, tol, max_iter):
    m = T.shape[0] - 1
    w = T.shape[1]
    rhs = w - 1
    for it in range(max_iter):
        col = -1
        for j in range(ncols):
            if T[m, j] < -tol:
                col = j
                break
        if col < 0:
            return OPTIMAL, it
        row = -1
        best = 0.0
        for i in range(m):
            a = T[i, col]
            if a > tol:
                ratio = T[i, rhs] / a
                if row < 0 or ratio < best - RATIO_TOL:
                    row = i
                    best = ratio
                elif ratio <= best + RATIO_TOL and basis[i] < basis[row]:
                    row = i
                    if ratio < best:
                        best = ratio
        if row < 0:
            return UNBOUNDED, it
        piv = T[row, col]
        for k in range(w):
            T[row, k] /= piv
        T[row, col] = 1.0
        for i in range(m + 1):
            if i == row:
                continue
            f = T[i, col]
            if f != 0.0:
                for k in range(w):
                    T[i, k] -= f * T[row, k]
                T[i, col] = 0.0
        for i in range(m):
            if T[i, rhs] < 0.0 and T[i, rhs] > -tol:
                T[i, rhs] = 0.0
        basis[row] = col
    return ITERATION_LIMIT, max_iter


def run_simplex_numpy(T, basis, ncols, tol, max_iter):
    m = T.shape[0] - 1
    for it in range(max_iter):
        negative = np.flatnonzero(T[m, :ncols] < -tol)
        if negative.size == 0:
            return OPTIMAL, it
        col = negative[0]
        column = T[:m, col]
        eligible = np.flatnonzero(column > tol)
        if eligible.size == 0:
            return UNBOUNDED, it
        ratios = T[eligible, -1] / column[eligible]
        best = ratios.min()
        tied = eligible[ratios <= best + RATIO_TOL]
        row = tied[np.argmin(basis[tied])]
        T[row] /= T[row, col]
        T[row, col] = 1.0
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        rhs = T[:m, -1]
        rhs[(rhs < 0.0) & (rhs > -tol)] = 0.0
        basis[row] = col
    return ITERATION_LIMIT, max_iter


run_simplex = run_simplex_loops if NUMBA_ENABLED else run_simplex_numpy


def _max_iter(T):
    # Bland's rule terminates; this only guards against numerical stalls.
    return 50 * T.shape[1] * T.shape[0] + 1000


def _check(status, what):
    if status == UNBOUNDED:
        raise SolverFailure(f"{what}: unbounded direction on a bounded problem")
    if status == ITERATION_LIMIT:
        raise SolverFailure(f"{what}: iteration limit reached")


_transport_rows = {}


def _transport_constraints(n):
    """Equality rows of the transportation polytope, last column-sum row dropped."""
    A = _transport_rows.get(n)
    if A is None:
        A = np.zeros((2 * n - 1, n * n))
        for i in range(n):
            A[i, i * n:(i + 1) * n] = 1.0
        for j in range(n - 1):
            A[n + j, j::n] = 1.0
        A.setflags(write=False)
        _transport_rows[n] = A
    return A


def solve_transport(cost, mu, nu, kernel=None):
    """Minimise ``sum(cost * omega)`` over couplings of ``mu`` and ``nu``.

    Two-phase simplex: phase I from an artificial basis, then phase II on the
    structural columns. Returns ``(value, coupling)``.
    """
    run = run_simplex if kernel is None else kernel
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if n == 1:
        return float(cost[0, 0]), np.ones((1, 1))
    A = _transport_constraints(n)
    m, nv = A.shape
    b = np.concatenate([mu, nu[:-1]])
    T = np.zeros((m + 1, nv + m + 1))
    T[:m, :nv] = A
    T[:m, nv:nv + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :nv] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(nv, nv + m, dtype=np.int64)
    status, _ = run(T, basis, nv + m, PIVOT_TOL, _max_iter(T))
    _check(status, "transport phase I")
    if -T[m, -1] > 1e-9:
        raise SolverFailure(f"transport phase I: marginals are infeasible (residual {-T[m, -1]!r})")
    for r in range(m):
        if basis[r] >= nv:
            candidates = np.flatnonzero(np.abs(T[r, :nv]) > PIVOT_TOL)
            if candidates.size:
                _pivot(T, basis, r, candidates[0])
    c = cost.ravel()
    cb = np.array([c[j] if j < nv else 0.0 for j in basis])
    T[m, :] = 0.0
    T[m, :nv] = c
    T[m] -= cb @ T[:m]
    status, _ = run(T, basis, nv, PIVOT_TOL, _max_iter(T))
    _check(status, "transport phase II")
    x = np.zeros(nv + m)
    x[basis] = T[:m, -1]
    omega = np.clip(x[:nv], 0.0, None).reshape(n, n)
    return float(np.sum(cost * omega)), omega


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def solve_potential(cost, mu, nu, kernel=None):
    """Maximise ``h @ (mu - nu)`` over ``h`` in [0,1]^n with ``h[i] - h[j] <= cost[i, j]``.

    The origin is feasible (costs are nonnegative), so the slack basis starts
    phase II directly. Returns ``(value, h)``.
    """
    run = run_simplex if kernel is None else kernel
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    diff = np.asarray(mu, dtype=float) - np.asarray(nu, dtype=float)
    ii, jj = np.nonzero(~np.eye(n, dtype=bool))
    m = len(ii) + n
    T = np.zeros((m + 1, n + m + 1))
    k = np.arange(len(ii))
    T[k, ii] = 1.0
    T[k, jj] = -1.0
    T[len(ii) + np.arange(n), np.arange(n)] = 1.0
    T[:m, n:n + m] = np.eye(m)
    T[:len(ii), -1] = cost[ii, jj]
    T[len(ii):m, -1] = 1.0
    T[m, :n] = -diff
    basis = np.arange(n, n + m, dtype=np.int64)
    status, _ = run(T, basis, n + m, PIVOT_TOL, _max_iter(T))
    _check(status, "potential LP")
    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    h = np.clip(x[:n], 0.0, 1.0)
    return float(h @ diff), h
