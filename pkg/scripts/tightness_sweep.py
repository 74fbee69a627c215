"""How close does each inequality get to equality on seeded draws?

Prints the largest lhs/rhs ratio found per checker. A ratio above 1 + 1e-6
stops the run with the offending seed.
"""

from __future__ import annotations

from dataclasses import dataclass

from _config import parse_config
from berlab.harness import CATALOG, tightness_search


@dataclass(frozen=True)
class SweepConfig:
    """Tightness sweep across checkers."""

    checkers: tuple = tuple(CATALOG)
    budget: int = 20
    seed: int = 0
    mode: str = "tight"
    family: str = "random"


def main(cfg: SweepConfig) -> None:
    for name in cfg.checkers:
        best = tightness_search(name, cfg.budget, cfg.seed, cfg.mode, family=cfg.family)
        params = {k: v for k, v in best.provenance.items() if k in ("r", "p", "q", "alpha", "pair")}
        print(f"{name:16s} ratio {best.ratio:.9f}  seed {best.provenance.get('seed')}  {params}")


if __name__ == "__main__":
    main(parse_config(SweepConfig))
