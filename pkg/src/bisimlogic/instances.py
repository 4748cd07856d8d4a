"""Seeded random instances and the bundled model corpus.

All randomness is drawn from ``numpy.random.Generator(PCG64(seed))``
(``numpy.random.default_rng(seed)``), so a seed fixes every instance. Draws
are small integers scaled by a denominator, which keeps entries rational
and produces ties and zero-probability states, the degenerate cases the
simplex solver has to survive.
"""
from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .model import Mdp, load_model

DENOMINATOR = 20


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_dist(rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.integers(0, 5, n).astype(float)
    w[rng.integers(n)] += 1.0
    return w / w.sum()


def random_pmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    """Shortest-path closure of a random symmetric [0,1] matrix."""
    d = rng.integers(0, DENOMINATOR + 1, (n, n)) / DENOMINATOR
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def random_mdp(rng: np.random.Generator, n_states: int, n_actions: int) -> Mdp:
    kernel = np.array([[random_dist(rng, n_states) for _ in range(n_states)] for _ in range(n_actions)])
    rewards = rng.integers(0, DENOMINATOR + 1, (n_actions, n_states)) / DENOMINATOR
    return Mdp([f"s{i}" for i in range(n_states)], [f"a{j}" for j in range(n_actions)], kernel, rewards)


def random_corpus(seed: int, count: int, max_states: int, max_actions: int, min_states: int = 2):
    rng = make_rng(seed)
    return [random_mdp(rng, int(rng.integers(min_states, max_states + 1)),
                       int(rng.integers(1, max_actions + 1))) for _ in range(count)]


FIXTURES = ("selfloop", "bisimilar", "cycle", "chain", "two_action")


def fixture(name: str) -> Mdp:
    """One of the bundled models in ``bisimlogic/fixtures``."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return load_model(resources.files(__package__).joinpath("fixtures", f"{name}.json").read_bytes())


def fixture_corpus() -> dict:
    return {name: fixture(name) for name in FIXTURES}
