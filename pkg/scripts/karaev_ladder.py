"""Berezin number of the rank-one Karaev operator as the truncation grows.

The estimate is compared against a fine 1D scan of ``t(1-t)/(1-t^N)``,
which is the closed form of the symbol maximum along the positive axis.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from _config import parse_config
from berlab.berezin import berezin_number, karaev_operator
from berlab.radii import numerical_radius
from berlab.rkhs import TruncatedHardy


@dataclass(frozen=True)
class LadderConfig:
    """Truncation ladder for the Karaev example."""

    dims: tuple = (2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64)
    oracle_grid: int = 200_000


def oracle(n: int, grid: int) -> float:
    t = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    return float(np.max(t * (1.0 - t) / (1.0 - t**n)))


def main(cfg: LadderConfig) -> None:
    print(f"{'N':>4} {'ber':>12} {'oracle':>12} {'gap':>10} {'w':>10} {'sec':>6}")
    for n in cfg.dims:
        start = time.perf_counter()
        op = karaev_operator(n)
        est = berezin_number(op, TruncatedHardy(n))
        w = numerical_radius(op).value
        ref = oracle(n, cfg.oracle_grid)
        print(f"{n:>4} {est.value:>12.8f} {ref:>12.8f} {est.value - ref:>10.1e} {w:>10.6f} "
              f"{time.perf_counter() - start:>6.2f}")


if __name__ == "__main__":
    main(parse_config(LadderConfig))
