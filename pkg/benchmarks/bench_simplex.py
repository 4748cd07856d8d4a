"""Compare the numba and pure-numpy simplex kernels on random transport LPs.

    python3 benchmarks/bench_simplex.py [--sizes 4 8 16] [--count 50]

Both kernels are called directly, so one process measures both paths
(the numba one is warmed up first; without numba both rows run numpy).
"""
import argparse
import time

from bisimlogic import NUMBA_ENABLED
from bisimlogic.instances import make_rng, random_dist, random_pmetric
from bisimlogic.simplex import run_simplex_loops, run_simplex_numpy, solve_potential, solve_transport


def bench(kernel, cases):
    start = time.perf_counter()
    worst = 0.0
    for d, mu, nu in cases:
        gap = solve_transport(d, mu, nu, kernel=kernel)[0] - solve_potential(d, mu, nu, kernel=kernel)[0]
        worst = max(worst, abs(gap))
    return (time.perf_counter() - start) / len(cases), worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = make_rng(args.seed)
    warm = [(random_pmetric(rng, 3), random_dist(rng, 3), random_dist(rng, 3))]
    bench(run_simplex_loops, warm)  # trigger compilation

    print(f"numba enabled: {NUMBA_ENABLED}")
    print(f"{'n':>4} {'loops ms':>10} {'numpy ms':>10} {'speedup':>8} {'max |P-D|':>10}")
    for n in args.sizes:
        cases = [(random_pmetric(rng, n), random_dist(rng, n), random_dist(rng, n)) for _ in range(args.count)]
        t_loops, gap_a = bench(run_simplex_loops, cases)
        t_numpy, gap_b = bench(run_simplex_numpy, cases)
        print(f"{n:>4} {1e3 * t_loops:>10.3f} {1e3 * t_numpy:>10.3f} {t_numpy / t_loops:>8.1f} "
              f"{max(gap_a, gap_b):>10.1e}")


if __name__ == "__main__":
    main()
