"""Dense complex linear algebra on numpy arrays.

Operators are plain ``complex128`` arrays of shape ``(rows, cols)`` holding
the matrix in an orthonormal basis. Everything here is a pure function.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimMismatch, NegativeSpectrum, NoConvergence, NotHermitian

HERMITIAN_RTOL = 1e-10
NEGATIVE_RTOL = 1e-8
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
GELFAND_MAX_SQUARINGS = 30
# norm of a renormalized power below this counts as collapse to zero
_UNDERFLOW_GUARD = 1e-280


class HermEig(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns


def as_matrix(a) -> np.ndarray:
    """Validate and convert ``a`` into a finite 2-D complex array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def adjoint(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=np.complex128)).T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + adjoint(a))


def _require_square(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"square matrix required, got shape {a.shape}")


def _require_hermitian(a: np.ndarray) -> None:
    _require_square(a)
    # Frobenius norm bounds the operator norm from above, so this is the
    # more permissive reading of the relative tolerance.
    scale = max(1.0, float(np.linalg.norm(a)))
    if float(np.linalg.norm(a - adjoint(a))) > HERMITIAN_RTOL * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> HermEig:
    """Cyclic complex Jacobi eigensolver for Hermitian matrices.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary, then applies a real Jacobi rotation. Sweeps stop when
    the off-diagonal Frobenius mass drops below ``tol * ||a||_F``.
    """
    a = as_matrix(a)
    _require_hermitian(a)
    n = a.shape[0]
    work = hermitian_part(a).copy()
    vecs = identity(n)
    target = tol * float(np.linalg.norm(work))

    def off_mass() -> float:
        return float(np.linalg.norm(work - np.diag(np.diag(work))))

    sweeps = 0
    while off_mass() > target:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = work[p, p].real
                aqq = work[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                work[:, idx] = work[:, idx] @ g
                work[idx, :] = adjoint(g) @ work[idx, :]
                work[p, q] = work[q, p] = 0.0
                work[p, p] = work[p, p].real
                work[q, q] = work[q, q].real
                vecs[:, idx] = vecs[:, idx] @ g

    vals = np.diag(work).real.copy()
    order = np.argsort(vals, kind="stable")
    return HermEig(vals[order], vecs[:, order])


def herm_eig(a, method: str = "lapack") -> HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` runs
    the dependency-free cyclic Jacobi solver.
    """
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    a = as_matrix(a)
    _require_hermitian(a)
    vals, vecs = np.linalg.eigh(hermitian_part(a))
    return HermEig(vals, vecs)


def operator_norm(a) -> float:
    """Largest singular value, via the top eigenvalue of the Gram matrix."""
    a = np.asarray(a, dtype=np.complex128)
    gram = adjoint(a) @ a if a.shape[0] >= a.shape[1] else a @ adjoint(a)
    top = np.linalg.eigvalsh(hermitian_part(gram))[-1]
    return math.sqrt(max(float(top), 0.0))


def apply_fn(p, fn: Callable[[np.ndarray], np.ndarray], zero_floor: float = 0.0) -> np.ndarray:
    """Functional calculus ``fn(p)`` for a Hermitian positive semidefinite ``p``.

    Eigenvalues slightly below zero (roundoff) are clamped; anything below
    ``-1e-8 * ||p||`` raises NegativeSpectrum. Eigenvalues under
    ``zero_floor`` are treated as exact zeros before ``fn`` is applied.
    """
    vals, vecs = herm_eig(p)
    scale = float(np.max(np.abs(vals)))
    if vals[0] < -NEGATIVE_RTOL * scale:
        raise NegativeSpectrum(f"eigenvalue {vals[0]:.3e} below zero")
    vals = np.where(vals < max(zero_floor, 0.0), 0.0, vals)
    mapped = np.asarray(fn(vals), dtype=np.float64)
    out = (vecs * mapped) @ adjoint(vecs)
    return hermitian_part(out)


def abs_op(x) -> np.ndarray:
    """Matrix absolute value ``(x* x)^(1/2)`` of a square matrix."""
    x = as_matrix(x)
    _require_square(x)
    return apply_fn(adjoint(x) @ x, np.sqrt)


def power_psd(p, exponent: float, zero_floor: float = 1e-14) -> np.ndarray:
    """Fractional power of a PSD matrix with tiny eigenvalues snapped to zero."""
    return apply_fn(p, lambda t: np.power(t, exponent), zero_floor=zero_floor)


def gelfand_spectral_radius(a, tol: float = 1e-6, max_squarings: int = GELFAND_MAX_SQUARINGS) -> float:
    """Spectral radius from ``||A^(2^m)||^(1/2^m)`` by scaled repeated squaring.

    The running power is kept at unit norm and its log-magnitude accumulated
    separately, so neither overflow nor underflow occurs for large ``m``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(a)
    _require_square(a)
    norm = operator_norm(a)
    if norm == 0.0:
        return 0.0
    unit = a / norm
    log_mag = math.log(norm)
    prev = norm
    for m in range(1, max_squarings + 1):
        unit = unit @ unit
        n = operator_norm(unit)
        if n < _UNDERFLOW_GUARD:
            return 0.0
        unit = unit / n
        log_mag = 2.0 * log_mag + math.log(n)
        est = math.exp(log_mag / 2.0**m)
        if m >= 3 and abs(prev - est) <= 0.25 * tol * est:
            return est
        prev = est
    raise NoConvergence(f"spectral radius estimate unstable after {max_squarings} squarings")


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(v) for v in flat.real],
        "im": [float(v) for v in flat.imag],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"rows", "cols", "re", "im"}`` (row-major) into a matrix."""
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or re.shape != (rows * cols,) or im.shape != (rows * cols,):
        raise ValueError("matrix entry count does not match rows * cols")
    return as_matrix((re + 1j * im).reshape(rows, cols))
