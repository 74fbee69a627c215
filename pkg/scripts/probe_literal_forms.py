"""Evaluate two printed formulas literally, next to the forms the package uses.

1. The 2x2 corollary: the printed middle term ``r([[a, b+c], [b+c, d]]) / 2``
   against ``w(M)`` and ``r(M + M^T) / 2`` for nonnegative ``M``.
2. The contraction power corollary: the printed exponent ``rp(1-alpha)`` on
   ``|X*|`` against ``rq(1-alpha)``. Reports the largest lhs/rhs ratio each
   form reaches on random contractions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from _config import parse_config
from berlab.berezin import berezin_number
from berlab.cmatrix import abs_op, adjoint, operator_norm, power_psd
from berlab.harness import SUITE_CONFIG
from berlab.radii import numerical_radius
from berlab.rkhs import TruncatedHardy


@dataclass(frozen=True)
class ProbeConfig:
    """Literal-form probe."""

    trials: int = 200
    power_trials: int = 60
    dim: int = 4
    seed: int = 7


def spectral_radius(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def probe_two_by_two(cfg: ProbeConfig, rng) -> None:
    worst_literal = worst_sym = 0.0
    for _ in range(cfg.trials):
        a, b, c, d = rng.uniform(0, 3, 4)
        m = np.array([[a, b], [c, d]])
        w = numerical_radius(m).value
        literal = 0.5 * spectral_radius(np.array([[a, b + c], [b + c, d]]))
        sym = 0.5 * spectral_radius(m + m.T)
        worst_literal = max(worst_literal, abs(w - literal))
        worst_sym = max(worst_sym, abs(w - sym))
    print(f"2x2: max |w - literal| = {worst_literal:.3e}   max |w - r(M+M^T)/2| = {worst_sym:.3e}")


def _contraction(rng, n: int, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * g / operator_norm(g)


def probe_power(cfg: ProbeConfig, rng) -> None:
    space = TruncatedHardy(cfg.dim)
    worst = {"rq": 0.0, "rp": 0.0}
    for _ in range(cfg.power_trials):
        r = float(rng.choice([2.0, 3.0]))
        q = float(rng.uniform(1.05, 1.6))
        p = q / (q - 1.0)
        alpha = float(rng.choice([0.25, 0.5]))
        a = _contraction(rng, cfg.dim)
        b = _contraction(rng, cfg.dim)
        x = _contraction(rng, cfg.dim, rng.uniform(0.2, 1.0))
        lhs = berezin_number(adjoint(a) @ x @ b, space, SUITE_CONFIG).value ** r
        left = adjoint(b) @ power_psd(abs_op(x), r * p * alpha) @ b / p
        for key, e in (("rq", r * q), ("rp", r * p)):
            right = adjoint(a) @ power_psd(abs_op(adjoint(x)), e * (1 - alpha)) @ a / q
            # norm upper-bounds ber, so a ratio above 1 here is a real violation
            rhs = operator_norm(left + right)
            worst[key] = max(worst[key], lhs / rhs)
    print(f"contraction power: max ratio with rq(1-alpha) = {worst['rq']:.6f}, "
          f"with rp(1-alpha) = {worst['rp']:.6f}")


def main(cfg: ProbeConfig) -> None:
    rng = np.random.default_rng(cfg.seed)
    probe_two_by_two(cfg, rng)
    probe_power(cfg, rng)


if __name__ == "__main__":
    main(parse_config(ProbeConfig))
