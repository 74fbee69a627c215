from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "berlab",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("berlab")


def ginibre(rng, n, m=None):
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2 * max(n, m))


def hermitian(rng, n):
    g = ginibre(rng, n)
    return 0.5 * (g + g.conj().T)


def positive(rng, n):
    g = ginibre(rng, n)
    p = g.conj().T @ g
    return 0.5 * (p + p.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
