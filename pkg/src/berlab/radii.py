"""Numerical radius and the norm-equivalence check."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .cmatrix import adjoint, as_matrix, herm_eig, operator_norm
from .errors import DimMismatch
from .report import combine, make_report

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
HALF_NORM_TOL = 1e-7


class RadiusEstimate(NamedTuple):
    value: float
    theta: float


def _rotated_top(a: np.ndarray, thetas) -> np.ndarray:
    """``lambda_max(Re(e^{i theta} a))`` for each angle."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    ph = np.exp(1j * thetas)[:, None, None]
    h = 0.5 * (ph * a + np.conj(ph) * adjoint(a))
    return np.linalg.eigvalsh(h)[:, -1]


def numerical_radius(a, sweep: int = 360, refine: int = 40) -> RadiusEstimate:
    """``w(a) = max_theta lambda_max(Re(e^{i theta} a))``.

    A uniform sweep of ``sweep`` angles locates the maximizing angle, then
    golden-section search over the neighbouring cells refines it. Hermitian
    input short-circuits to ``max |eigenvalue|``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimMismatch(f"square matrix required, got shape {a.shape}")
    if np.array_equal(a, adjoint(a)):
        vals = herm_eig(a).eigenvalues
        if vals[-1] >= -vals[0]:
            return RadiusEstimate(max(float(vals[-1]), 0.0), 0.0)
        return RadiusEstimate(float(-vals[0]), math.pi)

    sweep = max(int(sweep), 1)
    thetas = np.linspace(0.0, 2.0 * np.pi, sweep, endpoint=False)
    tops = _rotated_top(a, thetas)
    k = int(np.argmax(tops))
    best_t, best_v = float(thetas[k]), float(tops[k])

    width = 2.0 * np.pi / sweep
    lo, hi = best_t - width, best_t + width
    c, d = hi - _INVPHI * (hi - lo), lo + _INVPHI * (hi - lo)
    fc, fd = _rotated_top(a, [c, d])
    for _ in range(int(refine)):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = _rotated_top(a, c)[0]
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = _rotated_top(a, d)[0]
    cand_t, cand_v = (c, fc) if fc >= fd else (d, fd)
    if cand_v > best_v:
        best_t, best_v = float(cand_t), float(cand_v)
    return RadiusEstimate(max(best_v, 0.0), best_t % (2.0 * np.pi))


def half_norm_check(a, tol: float = HALF_NORM_TOL):
    """``||a|| / 2 <= w(a) <= ||a||`` reported as two sub-checks."""
    a = as_matrix(a)
    w = numerical_radius(a).value
    norm = operator_norm(a)
    lower = make_report("half_norm.lower", 0.5 * norm, w, tol)
    upper = make_report("half_norm.upper", w, norm, tol)
    return combine("half_norm", [lower, upper], provenance={"dim": a.shape[0]})
