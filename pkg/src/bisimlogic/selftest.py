"""Property suites on seeded random instances, run by ``bisimlogic selftest``.

Each suite checks one invariant on many instances and records every
failure with the instance that produced it. Passing ``slack`` replaces all
the per-suite tolerances, e.g. ``slack=0`` to demand exact equalities.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bisim import bisim_metric, certify_upper_bound, kleene_iterates
from .errors import MetricError
from .instances import make_rng, random_corpus, random_dist, random_pmetric
from .logic.enumeration import enumerate_theory
from .logic.semantics import Evaluator, op_add, op_and, op_cx, op_not, op_scale, op_sub
from .logic.synthesis import approximate_at_pair
from .model import validate_pmetric
from .transport import wasserstein_primal


MAX_WITNESSES = 5


@dataclass
class SuiteResult:
    name: str
    total: int = 0
    failed: int = 0
    witnesses: list = field(default_factory=list)  # first few failures only

    @property
    def passed(self) -> int:
        return self.total - self.failed

    def check(self, ok: bool, witness: str):
        self.total += 1
        if not ok:
            self.fail(witness)

    def fail(self, witness: str):
        self.failed += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)


def _tol(slack, default):
    return default if slack is None else slack


def duality_suite(seed, slack=None, count=200) -> SuiteResult:
    res = SuiteResult("duality")
    tol = _tol(slack, 1e-6)
    rng = make_rng(seed)
    for i in range(count):
        n = int(rng.integers(1, 9))
        d, mu, nu = random_pmetric(rng, n), random_dist(rng, n), random_dist(rng, n)
        gap = wasserstein_primal(d, mu, nu).gap
        res.check(gap <= tol, f"instance {i}: n={n} gap={gap!r}")
    return res


def _corpus(seed, count=20):
    return random_corpus(seed + 1, count, max_states=5, max_actions=3)


def pseudometric_suite(seed, slack=None) -> SuiteResult:
    res = SuiteResult("pseudometric")
    tol = _tol(slack, 1e-9)
    for i, m in enumerate(_corpus(seed)):
        it = kleene_iterates(m, 0.5)
        for step in range(12):
            d = next(it)
            try:
                validate_pmetric(d, tol=tol)
                res.check(True, "")
            except MetricError as exc:
                res.check(False, f"model {i} iterate {step}: {exc} witness={exc.witness}")
    return res


def fixpoint_suite(seed, slack=None) -> SuiteResult:
    res = SuiteResult("fixpoint")
    for i, m in enumerate(_corpus(seed)):
        rep = bisim_metric(m, 0.5, tol=1e-9)
        ok = certify_upper_bound(m, 0.5, rep.metric, tol=_tol(slack, 1e-9))
        res.check(ok and rep.converged, f"model {i}: converged={rep.converged} certified={ok}")
    return res


def adequacy_suite(seed, slack=None) -> SuiteResult:
    res = SuiteResult("adequacy")
    tol = _tol(slack, 1e-6)
    for i, m in enumerate(_corpus(seed, count=10)):
        d = bisim_metric(m, 0.5).metric.d
        values = enumerate_theory(m, 3, c=0.5).values
        gaps = np.abs(values[:, :, None] - values[:, None, :])
        excess = float((gaps - d).max())
        res.check(excess <= tol, f"model {i}: max formula gap exceeds metric by {excess!r}")
    return res


def pair_approximation_suite(seed, slack=None, count=300) -> SuiteResult:
    res = SuiteResult("pair-approximation")
    tol = _tol(slack, 1e-12)
    rng = make_rng(seed + 2)
    for i, m in enumerate(_corpus(seed, count=count // 10)):
        ev = Evaluator(m, 0.5)
        values = enumerate_theory(m, 2, c=0.5)
        for _ in range(10):
            h = rng.random(m.n_states)
            x, y = map(int, rng.choice(m.n_states, 2, replace=False))
            if h[x] < h[y]:
                x, y = y, x
            v = values.values
            k = int(np.argmax(v[:, x] - v[:, y]))
            # smallest eps the best enumerated witness satisfies, plus margin
            eps = max(float((h[x] - h[y]) - (v[k, x] - v[k, y])), 0.0) + 1e-3
            psi = approximate_at_pair(h, x, y, values.formulas[k], eps, m, 0.5, ev)
            pv = ev(psi)
            ok = abs(pv[y] - h[y]) <= tol and 0.0 <= h[x] - pv[x] < eps
            res.check(ok, f"model {i} pair ({x},{y}): psi(y)-h(y)={pv[y] - h[y]!r}, "
                          f"h(x)-psi(x)={h[x] - pv[x]!r}, eps={eps!r}")
    return res


def nonexpansive_suite(seed, slack=None, count=10_000) -> SuiteResult:
    res = SuiteResult("nonexpansive")
    tol = _tol(slack, 1e-12)
    rng = make_rng(seed + 3)
    u, v, r = rng.random((count, 2)), rng.random((count, 2)), rng.random(count)
    ops = {
        "not": (lambda a, s: op_not(a[:, 0]), 1),
        "and": (lambda a, s: op_and(a[:, 0], a[:, 1]), 2),
        "add": (lambda a, s: op_add(a[:, 0], s), 1),
        "sub": (lambda a, s: op_sub(a[:, 0], s), 1),
        "scale": (lambda a, s: op_scale(a[:, 0], s), 1),
        "cc": (lambda a, s: op_cx(a[:, 0], a[:, 1], s), 2),
    }
    for name, (f, arity) in ops.items():
        arg_gap = np.abs(u[:, :arity] - v[:, :arity]).max(axis=1)
        val_gap = np.abs(f(u, r) - f(v, r))
        res.total += count
        for k in np.flatnonzero(val_gap > arg_gap + tol):
            res.fail(f"{name}: u={u[k, :arity]} v={v[k, :arity]} r={r[k]!r} "
                     f"value gap {val_gap[k]!r} > argument gap {arg_gap[k]!r}")
    return res


SUITES = (duality_suite, pseudometric_suite, fixpoint_suite, adequacy_suite,
          pair_approximation_suite, nonexpansive_suite)


def run_selftest(seed: int = 0, slack: float | None = None) -> list:
    return [suite(seed, slack) for suite in SUITES]
