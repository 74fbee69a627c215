from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from berlab.cmatrix import adjoint
from berlab.radii import _rotated_top, half_norm_check, numerical_radius
from conftest import ginibre

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize(
    "a, want",
    [(np.eye(3), 1.0), ([[0, 1], [0, 0]], 0.5), (np.diag([1, 1j]), 1.0), ([[1, 2], [3, 4]], 2.5 + math.sqrt(8.5))],
)
def test_examples(a, want):
    assert numerical_radius(a).value == pytest.approx(want, abs=1e-9)


def test_hermitian_shortcut():
    est = numerical_radius(np.diag([-3.0, 1.0]))
    assert est.value == 3.0 and est.theta == pytest.approx(math.pi)


@given(seeds, st.integers(1, 8))
def test_estimate_consistent_with_angle(seed, n):
    a = ginibre(np.random.default_rng(seed), n)
    est = numerical_radius(a)
    assert 0 <= est.theta < 2 * math.pi
    assert _rotated_top(a, est.theta)[0] == pytest.approx(est.value, abs=1e-10)


@given(seeds, st.integers(1, 8), st.floats(0.1, 10), st.floats(0, 2 * math.pi))
def test_homogeneity_and_adjoint(seed, n, mag, phase):
    a = ginibre(np.random.default_rng(seed), n)
    w = numerical_radius(a).value
    alpha = mag * complex(math.cos(phase), math.sin(phase))
    assert numerical_radius(alpha * a).value == pytest.approx(mag * w, rel=1e-8)
    assert numerical_radius(adjoint(a)).value == pytest.approx(w, abs=1e-8)


@given(seeds, st.integers(1, 8))
def test_normal_matrices(seed, n):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    q, _ = np.linalg.qr(ginibre(rng, n))
    a = q @ np.diag(d) @ q.conj().T
    assert numerical_radius(a).value == pytest.approx(np.max(np.abs(d)), abs=1e-6)


@given(seeds, st.integers(1, 8))
def test_refinement_beats_sweep(seed, n):
    a = ginibre(np.random.default_rng(seed), n)
    sweep = np.max(_rotated_top(a, np.linspace(0, 2 * math.pi, 360, endpoint=False)))
    assert numerical_radius(a).value >= sweep


def test_half_norm_examples():
    rep = half_norm_check([[0, 1], [0, 0]])
    assert rep.passed
    lower = rep.children[0]
    assert lower.lhs == pytest.approx(0.5) and lower.rhs == pytest.approx(0.5)
    assert half_norm_check(np.eye(2)).passed
    zero = half_norm_check(np.zeros((2, 2)))
    assert zero.passed and zero.lhs == 0 and zero.rhs == 0


@given(seeds, st.integers(1, 8))
def test_half_norm_always_passes(seed, n):
    rep = half_norm_check(ginibre(np.random.default_rng(seed), n) * 3)
    assert rep.passed and rep.passed == (rep.slack >= -rep.tol)
