import numpy as np
import pytest


def random_state(rng, d, n=1):
    v = rng.normal(size=d**n) + 1j * rng.normal(size=d**n)
    return v / np.linalg.norm(v)


def random_phases(rng, d):
    return rng.uniform(0, 2 * np.pi, d)


def fidelity(u, v):
    return abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
