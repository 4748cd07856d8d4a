"""Both simplex kernels against each other and against HiGHS (scipy)."""
import numpy as np
import pytest
from scipy.optimize import linprog

from bisimlogic import _jit
from bisimlogic.instances import make_rng, random_dist, random_pmetric
from bisimlogic.simplex import (OPTIMAL, run_simplex, run_simplex_loops, run_simplex_numpy,
                                solve_potential, solve_transport)

KERNELS = [run_simplex_loops, run_simplex_numpy]


def highs_transport(cost, mu, nu):
    n = len(mu)
    A = np.vstack([np.kron(np.eye(n), np.ones(n)), np.kron(np.ones(n), np.eye(n))])
    res = linprog(cost.ravel(), A_eq=A, b_eq=np.concatenate([mu, nu]), bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


def test_selected_kernel_matches_environment():
    expected = run_simplex_loops if _jit.NUMBA_ENABLED else run_simplex_numpy
    assert run_simplex is expected


@pytest.mark.parametrize("kernel", KERNELS, ids=["loops", "numpy"])
def test_transport_matches_highs(kernel):
    rng = make_rng(7)
    for _ in range(60):
        n = int(rng.integers(1, 8))
        d, mu, nu = random_pmetric(rng, n), random_dist(rng, n), random_dist(rng, n)
        value, omega = solve_transport(d, mu, nu, kernel=kernel)
        assert value == pytest.approx(highs_transport(d, mu, nu), abs=1e-9)
        np.testing.assert_allclose(omega.sum(axis=1), mu, atol=1e-8)
        np.testing.assert_allclose(omega.sum(axis=0), nu, atol=1e-8)
        assert omega.min() >= 0.0


@pytest.mark.parametrize("kernel", KERNELS, ids=["loops", "numpy"])
def test_potential_matches_transport(kernel):
    rng = make_rng(8)
    for _ in range(60):
        n = int(rng.integers(1, 8))
        d, mu, nu = random_pmetric(rng, n), random_dist(rng, n), random_dist(rng, n)
        value, h = solve_potential(d, mu, nu, kernel=kernel)
        assert value == pytest.approx(solve_transport(d, mu, nu)[0], abs=1e-9)
        assert np.all(h[:, None] - h[None, :] <= d + 1e-9)


def test_kernels_agree_bitwise_on_values():
    rng = make_rng(9)
    for _ in range(30):
        n = int(rng.integers(2, 8))
        d, mu, nu = random_pmetric(rng, n), random_dist(rng, n), random_dist(rng, n)
        a = solve_transport(d, mu, nu, kernel=run_simplex_loops)[0]
        b = solve_transport(d, mu, nu, kernel=run_simplex_numpy)[0]
        assert a == pytest.approx(b, abs=1e-12)


@pytest.mark.parametrize("kernel", KERNELS, ids=["loops", "numpy"])
def test_degenerate_instances_terminate(kernel):
    # all-zero costs and point masses give massively degenerate bases
    n = 6
    for d in (np.zeros((n, n)), 1.0 - np.eye(n)):
        mu = np.zeros(n)
        mu[0] = 1.0
        nu = np.full(n, 1.0 / n)
        value, _ = solve_transport(d, mu, nu, kernel=kernel)
        assert value == pytest.approx(d[0].mean(), abs=1e-12)


def test_bland_on_beale_cycling_example():
    # Beale's LP cycles under the textbook largest-coefficient rule.
    c = np.array([-0.75, 150.0, -0.02, 6.0])
    A = np.array([[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]])
    b = np.array([0.0, 0.0, 1.0])
    for kernel in KERNELS:
        T = np.zeros((4, 8))
        T[:3, :4] = A
        T[:3, 4:7] = np.eye(3)
        T[:3, -1] = b
        T[3, :4] = c
        basis = np.array([4, 5, 6], dtype=np.int64)
        status, iters = kernel(T, basis, 7, 1e-11, 1000)
        assert status == OPTIMAL
        assert -T[3, -1] == pytest.approx(-0.05)
