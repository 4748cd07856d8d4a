import numpy as np
import pytest

from bisimlogic.instances import fixture, fixture_corpus, random_corpus
from bisimlogic.model import Mdp


@pytest.fixture
def selfloop():
    """Two absorbing states with rewards 1 and 0."""
    return fixture("selfloop")


@pytest.fixture
def bisimilar():
    return fixture("bisimilar")


@pytest.fixture(scope="session")
def corpus():
    """Bundled fixtures followed by seeded random models."""
    models = list(fixture_corpus().values())
    models += random_corpus(seed=1234, count=12, max_states=5, max_actions=3)
    return models


def mdp(kernel, rewards):
    kernel = np.asarray(kernel, dtype=float)
    if kernel.ndim == 2:
        kernel, rewards = kernel[None], np.asarray(rewards, dtype=float)[None]
    k, n, _ = kernel.shape
    return Mdp([f"s{i}" for i in range(n)], [chr(ord("a") + j) for j in range(k)], kernel, rewards)
