"""Run the checker catalog and print a per-checker summary table."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from _config import parse_config
from berlab.harness import CATALOG, run_suite


@dataclass(frozen=True)
class SuiteConfig:
    """Seeded suite over the checker catalog."""

    checkers: tuple = tuple(CATALOG)
    n: int = 50
    seed: int = 0
    mode: str = "certified"
    family: str = "random"
    out: str = ""


def main(cfg: SuiteConfig) -> int:
    res = run_suite(cfg.checkers, cfg.n, cfg.seed, cfg.mode, family=cfg.family)
    print(f"{'checker':16s} {'pass':>6} {'worst slack':>13} {'max ratio':>11}")
    for name, reps in res.reports.items():
        ok = sum(r.passed for r in reps)
        ratio = max((r.ratio for r in reps), default=float("nan"))
        print(f"{name:16s} {ok:>3}/{len(reps):<3}{res.worst_slack[name]:>13.3e} {ratio:>11.6f}")
    print(f"{res.n_passed}/{res.n_total} passed in {res.wall_time:.1f}s ({cfg.mode}, {cfg.family})")
    if cfg.out:
        path = Path(cfg.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(res.to_json() + "\n")
    return 0 if res.n_failed == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main(parse_config(SuiteConfig)))
