"""Seeded instance generation, the checker catalog and suite execution.

Every instance draws from its own generator, seeded by a splitmix64 hash
of ``(base seed, checker id, instance index)``, so results do not depend on
execution order or worker count.
"""

from __future__ import annotations

import json
import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .berezin import SearchConfig
from .cmatrix import identity, operator_norm
from .errors import BadExponent, BadSpec, BerlabError, BoundViolation, InvalidPair, UnknownChecker
from .inequalities import (
    TIGHT_CONFIG,
    ExponentSet,
    FGPair,
    check_basic_order,
    check_block_bound,
    check_embed_monotone,
    check_euclid_blocks,
    check_euclid_offdiag,
    check_mccarty,
    check_mixed_schwarz,
    check_offdiag_fg,
    check_offdiag_power,
    check_product,
    check_sums,
    check_two_by_two,
    log_pair,
    power_pair,
)
from .opmatrix import assemble, diag_blocks
from .radii import half_norm_check
from .report import MODES, CheckReport
from .rkhs import DirectSumSpace, FiniteSet, TruncatedBergman, TruncatedHardy

KINDS = ("general", "hermitian", "positive", "contraction", "unitary")
FAMILIES = ("random", "equality")
R_CHOICES = (1.0, 1.5, 2.0, 3.0)
ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)
Q_MIN = 1.0 + 1e-3
MAX_DISK_N = 16
MAX_COMPONENT_N = 8
MAX_POINTS = 12
MAX_FEATURE_DIM = 8
RATIO_LIMIT = 1.0 + 1e-6

# lighter search for bulk certified runs; the LHS is a lower estimate either way
SUITE_CONFIG = SearchConfig(radial=48, angular=96, refine=32, multistart=12, cycles=8, product_budget=1 << 16)

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the splitmix64 finalizer (Steele, Lea, Flood constants)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def instance_seed(base_seed: int, checker: str, index: int) -> int:
    salt = zlib.crc32(checker.encode())
    return splitmix64(splitmix64((int(base_seed) & _MASK64) ^ (salt << 32)) ^ int(index))


@dataclass(frozen=True)
class InstanceSpec:
    seed: int
    dim: int
    kind: str = "general"
    space: str | None = None
    r_choices: tuple = R_CHOICES
    q_range: tuple = (Q_MIN, 2.0)
    pair_family: str = "power"

    def __post_init__(self):
        if not 1 <= int(self.dim) <= 64:
            raise BadSpec(f"dim must lie in [1, 64], got {self.dim}")
        if self.kind not in KINDS:
            raise BadSpec(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if not 0 <= int(self.seed) <= _MASK64:
            raise BadSpec("seed must be a 64-bit unsigned integer")
        if self.pair_family not in ("power", "log1p", "mixed"):
            raise BadSpec(f"unknown pair family {self.pair_family!r}")


def _ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return z / math.sqrt(2.0 * max(rows, cols))


def _operator(rng: np.random.Generator, dim: int, kind: str = "general") -> np.ndarray:
    g = _ginibre(rng, dim)
    if kind == "general":
        return g
    if kind == "hermitian":
        return 0.5 * (g + g.conj().T)
    if kind == "positive":
        p = g.conj().T @ g
        return 0.5 * (p + p.conj().T)
    if kind == "contraction":
        return g / (operator_norm(g) + 1e-12)
    if kind == "unitary":
        q, r = np.linalg.qr(g)
        d = np.diag(r)
        return q * np.where(d == 0, 1.0, d / np.abs(d))
    raise BadSpec(f"unknown kind {kind!r}")


def gen_operator(spec: InstanceSpec) -> np.ndarray:
    """Ginibre matrix shaped by ``spec.kind``; bit-identical for a fixed spec."""
    return _operator(np.random.default_rng(int(spec.seed)), int(spec.dim), spec.kind)


# -- random pieces ------------------------------------------------------------


def _vector(rng, dim: int, norm: float) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v * (norm / np.linalg.norm(v))


def _finite(rng, dim: int | None = None):
    dim = dim if dim is not None else int(rng.integers(1, MAX_FEATURE_DIM + 1))
    k = int(rng.integers(1, MAX_POINTS + 1))
    feats = rng.standard_normal((k, dim)) + 1j * rng.standard_normal((k, dim))
    return FiniteSet(feats), f"finite:{k}x{dim}"


def _disk(rng, n_max: int, n: int | None = None):
    n = n if n is not None else int(rng.integers(2, n_max + 1))
    if rng.random() < 0.5:
        return TruncatedHardy(n), f"hardy:{n}"
    return TruncatedBergman(n), f"bergman:{n}"


def _single_space(rng):
    return _disk(rng, MAX_DISK_N) if rng.random() < 0.7 else _finite(rng)


def _component(rng, dim: int | None = None):
    if rng.random() < 0.7:
        if dim is not None and dim < 2:
            return _finite(rng, dim)
        return _disk(rng, MAX_COMPONENT_N, dim)
    return _finite(rng, dim)


def _sum_space(rng, n: int = 2, equal: bool = False, same: bool = False):
    dim = int(rng.integers(2, MAX_COMPONENT_N + 1)) if equal else None
    parts = [_component(rng, dim)] * n if same else [_component(rng, dim) for _ in range(n)]
    return DirectSumSpace(tuple(s for s, _ in parts)), [d for _, d in parts]


def _exponents(rng) -> dict:
    r = float(rng.choice(R_CHOICES))
    q = float(rng.uniform(max(Q_MIN, 2.0 / r), 2.0))
    return {"r": r, "q": q, "alpha": float(rng.choice(ALPHAS))}


def _pair_label(rng) -> str:
    if rng.random() < 0.2:
        return "log1p"
    return f"power:{float(rng.choice(ALPHAS)):g}"


def _pair(params) -> FGPair:
    lab = params["pair"]
    return log_pair() if lab == "log1p" else power_pair(float(lab.split(":", 1)[1]))


def _scale(rng) -> float:
    return float(np.exp(rng.uniform(-1.0, 1.0)))


# -- catalog ----------------------------------------------------------------------


class Case(NamedTuple):
    """One instance: JSON-safe parameters plus a runner taking ``(params, mode, cfg)``."""

    params: dict
    run: Callable[[dict, str, SearchConfig], CheckReport]


def _mccarty(rng, family):
    d = int(rng.integers(1, 9))
    if family == "equality":
        t = np.diag(rng.uniform(0.1, 3.0, d)).astype(complex)
        x = np.zeros(d, complex)
        x[int(rng.integers(d))] = 1.0
    else:
        t = _operator(rng, d, "positive") * _scale(rng)
        x = _vector(rng, d, float(rng.uniform(0.0, 1.0)))
    params = {"dim": d, "r": float(rng.choice(R_CHOICES))}
    return Case(params, lambda p, mode, cfg: check_mccarty(t, x, p["r"], mode=mode))


def _mixed_schwarz(rng, family):
    d = int(rng.integers(1, 9))
    params = {"dim": d, "pair": _pair_label(rng)}
    if family == "equality":
        t = identity(d)
        x = y = _vector(rng, d, 1.0)
    else:
        t = _operator(rng, d) * _scale(rng)
        x, y = _vector(rng, d, 1.0), _vector(rng, d, float(rng.uniform(0.0, 2.0)))
    return Case(params, lambda p, mode, cfg: check_mixed_schwarz(t, x, y, _pair(p), mode=mode))


def _block_bound(rng, family):
    n = 2 if family == "equality" or rng.random() < 0.7 else 3
    spaces, desc = _sum_space(rng, n)
    dims = spaces.dims
    if family == "equality":
        t = diag_blocks([identity(d) for d in dims], spaces)
    else:
        t = assemble([[_ginibre(rng, di, dj) * _scale(rng) for dj in dims] for di in dims], spaces)
    return Case({"spaces": desc}, lambda p, mode, cfg: check_block_bound(t, cfg, mode=mode))


def _two_by_two(rng, family):
    spaces, desc = _sum_space(rng, 2)
    d1, d2 = spaces.dims
    if family == "equality":
        t = diag_blocks([identity(d1), identity(d2)], spaces)
    elif rng.random() < 0.25:
        t = diag_blocks([_operator(rng, d1), _operator(rng, d2)], spaces)
    else:
        t = assemble([[_operator(rng, d1), _ginibre(rng, d1, d2)], [_ginibre(rng, d2, d1), _operator(rng, d2)]],
                     spaces)
    return Case({"spaces": desc}, lambda p, mode, cfg: check_two_by_two(t, cfg, mode=mode))


def _offdiag_blocks(rng, family):
    # the swap symbol reaches 1 only where both kernels coincide
    spaces, desc = _sum_space(rng, 2, equal=True, same=family == "equality")
    d = spaces.dims[0]
    if family == "equality":
        return spaces, desc, identity(d), identity(d)
    return spaces, desc, _operator(rng, d) * _scale(rng), _operator(rng, d) * _scale(rng)


def _offdiag_fg(rng, family):
    spaces, desc, x, y = _offdiag_blocks(rng, family)
    params = {"spaces": desc, "r": float(rng.choice(R_CHOICES)), "pair": _pair_label(rng)}
    if family == "equality":
        params.update(r=1.0, pair="power:0.5")
    return Case(params, lambda p, mode, cfg: check_offdiag_fg(x, y, _pair(p), p["r"], spaces, cfg, mode=mode))


def _offdiag_power(rng, family):
    spaces, desc, x, y = _offdiag_blocks(rng, family)
    params = {"spaces": desc, "r": float(rng.choice(R_CHOICES)), "alpha": float(rng.choice(ALPHAS))}
    if family == "equality":
        params.update(r=1.0, alpha=0.5)
    return Case(params, lambda p, mode, cfg: check_offdiag_power(x, y, p["alpha"], p["r"], spaces, cfg, mode=mode))


def _exps(p) -> ExponentSet:
    return ExponentSet.from_q(p["r"], p["q"], p.get("alpha", 0.5))


TAME_RP = 40.0


def tame_p_side(as_, bs, xs, pair: FGPair, r: float, p: float, contraction: bool):
    """Shrink inputs so the ``p``-side power cannot overflow once ``r p`` is large.

    General form: scale the ``B_i`` until ``sum ||B_i||^2 max f(s)^2 <= 1``.
    Contraction form: scale each ``X_i`` to norm at most 1, so ``f(|X_i|) <= 1``
    for power and log pairs. Below ``r p = TAME_RP`` inputs pass through.
    """
    if r * p <= TAME_RP:
        return list(as_), list(bs), list(xs)
    if contraction:
        return list(as_), list(bs), [x / max(1.0, operator_norm(x)) for x in xs]
    mass = sum(operator_norm(b) ** 2 * float(np.max(pair.f(np.linalg.svd(x, compute_uv=False)))) ** 2
               for b, x in zip(bs, xs))
    c = 1.0 / math.sqrt(max(1.0, mass))
    return list(as_), [c * b for b in bs], list(xs)


def _tamed_run(check, as_, bs, xs, space, single: bool):
    def run(p, mode, cfg):
        pair, exps = _pair(p), _exps(p)
        a2, b2, x2 = tame_p_side(as_, bs, xs, pair, exps.r, exps.p, p["contraction"])
        if single:
            a2, b2, x2 = a2[0], b2[0], x2[0]
        return check(a2, b2, x2, pair, exps, space, cfg, mode=mode, contraction=p["contraction"])

    return run


def _product(rng, family):
    space, desc = _single_space(rng)
    d = space.dim
    params = {"space": desc, **_exponents(rng), "pair": _pair_label(rng), "contraction": bool(rng.random() < 0.5)}
    if family == "equality":
        params.update(r=1.0, q=2.0, pair="power:0.5", contraction=False)
        a = b = identity(d)
        x = _operator(rng, d, "positive")
    elif params["contraction"]:
        a, b = _operator(rng, d, "contraction"), _operator(rng, d, "contraction")
        x = _operator(rng, d) * _scale(rng)
    else:
        a, b, x = (_operator(rng, d) * _scale(rng) for _ in range(3))
    return Case(params, _tamed_run(check_product, [a], [b], [x], space, single=True))


def _sums(rng, family):
    space, desc = _single_space(rng)
    d = space.dim
    n = int(rng.integers(1, 4))
    params = {"space": desc, "n": n, **_exponents(rng), "pair": _pair_label(rng),
              "contraction": bool(rng.random() < 0.5)}
    if family == "equality":
        params.update(n=2, r=1.0, q=2.0, pair="power:0.5", contraction=False)
        x = _operator(rng, d, "positive")
        as_ = bs = [identity(d) / math.sqrt(2.0)] * 2
        xs = [x, x]
    elif params["contraction"]:
        as_ = [_operator(rng, d, "contraction") / math.sqrt(n) for _ in range(n)]
        bs = [_operator(rng, d, "contraction") / math.sqrt(n) for _ in range(n)]
        xs = [_operator(rng, d) * _scale(rng) for _ in range(n)]
    else:
        as_, bs, xs = ([_operator(rng, d) * _scale(rng) for _ in range(n)] for _ in range(3))
    return Case(params, _tamed_run(check_sums, as_, bs, xs, space, single=False))


def _euclid_offdiag(rng, family):
    spaces, desc = _sum_space(rng, 2, equal=True, same=family == "equality")
    d = spaces.dims[0]
    n = int(rng.integers(1, 4))
    params = {"spaces": desc, "n": n, "p": float(rng.uniform(1.0, 3.0)), "pair": _pair_label(rng)}
    if family == "equality":
        params.update(n=1, p=1.0, pair="power:0.5")
        xs = ys = [identity(d)]
    else:
        xs = [_operator(rng, d) * _scale(rng) for _ in range(n)]
        ys = [_operator(rng, d) * _scale(rng) for _ in range(n)]
    return Case(params, lambda p, mode, cfg: check_euclid_offdiag(xs, ys, _pair(p), p["p"], spaces, cfg, mode=mode))


def _euclid_blocks(rng, family):
    spaces, desc = _sum_space(rng, 2)
    d1, d2 = spaces.dims
    n = int(rng.integers(1, 4))
    params = {"spaces": desc, "n": n, "p": float(rng.uniform(1.0, 3.0))}
    if family == "equality":
        params.update(n=1, p=1.0)
        ts = [diag_blocks([identity(d1), identity(d2)], spaces)]
    else:
        ts = [
            assemble([[_operator(rng, d1), _ginibre(rng, d1, d2)], [_ginibre(rng, d2, d1), _operator(rng, d2)]],
                     spaces)
            for _ in range(n)
        ]
    return Case(params, lambda p, mode, cfg: check_euclid_blocks(ts, p["p"], cfg, mode=mode))


def _basic_order(rng, family):
    space, desc = _single_space(rng)
    a = identity(space.dim) if family == "equality" else _operator(rng, space.dim) * _scale(rng)
    return Case({"space": desc}, lambda p, mode, cfg: check_basic_order(a, space, cfg, mode=mode))


def _embed_monotone(rng, family):
    space, desc = _component(rng)
    pad, pdesc = _component(rng)
    d = space.dim
    if family == "equality":
        x = y = np.zeros((d, d), complex)
    else:
        x, y = _operator(rng, d) * _scale(rng), _operator(rng, d) * _scale(rng)
    return Case({"space": desc, "pad": pdesc},
                lambda p, mode, cfg: check_embed_monotone(x, y, space, pad, cfg, mode=mode))


def _half_norm(rng, family):
    d = int(rng.integers(1, 9))
    a = identity(d) if family == "equality" else _operator(rng, d) * _scale(rng)
    return Case({"dim": d}, lambda p, mode, cfg: half_norm_check(a))


CATALOG: dict[str, Callable] = {
    "mccarty": _mccarty,
    "mixed_schwarz": _mixed_schwarz,
    "block_bound": _block_bound,
    "two_by_two": _two_by_two,
    "offdiag_fg": _offdiag_fg,
    "offdiag_power": _offdiag_power,
    "product": _product,
    "sums": _sums,
    "euclid_offdiag": _euclid_offdiag,
    "euclid_blocks": _euclid_blocks,
    "basic_order": _basic_order,
    "embed_monotone": _embed_monotone,
    "half_norm": _half_norm,
}


def _builder(checker: str):
    try:
        return CATALOG[checker]
    except KeyError:
        raise UnknownChecker(f"unknown checker {checker!r}; known: {', '.join(CATALOG)}") from None


def build_case(checker: str, seed: int, family: str = "random") -> Case:
    if family not in FAMILIES:
        raise BadSpec(f"unknown family {family!r}; expected one of {FAMILIES}")
    return _builder(checker)(np.random.default_rng(seed), family)


def _run_case(case: Case, params: dict, mode: str, cfg: SearchConfig, prov: dict) -> CheckReport:
    rep = case.run(params, mode, cfg)
    return _with_provenance(rep, {**prov, **params})


def _with_provenance(rep: CheckReport, extra: dict) -> CheckReport:
    from dataclasses import replace

    return replace(rep, provenance={**rep.provenance, **extra})


def run_instance(checker: str, index: int, base_seed: int, mode: str = "certified",
                 cfg: SearchConfig | None = None, family: str = "random") -> CheckReport:
    seed = instance_seed(base_seed, checker, index)
    case = build_case(checker, seed, family)
    cfg = cfg or (TIGHT_CONFIG if mode == "tight" else SUITE_CONFIG)
    prov = {"seed": seed, "index": int(index), "family": family}
    return _run_case(case, case.params, mode, cfg, prov)


@dataclass
class SuiteResult:
    reports: dict = field(default_factory=dict)  # checker -> list[CheckReport]
    mode: str = "certified"
    base_seed: int = 0
    wall_time: float = 0.0

    @property
    def n_total(self) -> int:
        return sum(len(v) for v in self.reports.values())

    @property
    def n_passed(self) -> int:
        return sum(r.passed for v in self.reports.values() for r in v)

    @property
    def n_failed(self) -> int:
        return self.n_total - self.n_passed

    @property
    def worst_slack(self) -> dict:
        return {k: min(r.slack for r in v) for k, v in self.reports.items() if v}

    def failures(self) -> list:
        return [r for v in self.reports.values() for r in v if not r.passed]

    def to_dict(self, include_time: bool = False) -> dict:
        out = {
            "mode": self.mode,
            "seed": self.base_seed,
            "total": self.n_total,
            "passed": self.n_passed,
            "worst_slack": self.worst_slack,
            "reports": {k: [r.to_dict() for r in v] for k, v in self.reports.items()},
        }
        if include_time:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self) -> str:
        """Deterministic serialization; wall time is left out on purpose."""
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=False)

    def csv_rows(self) -> list:
        rows = [("checker", "seed", "lhs", "rhs", "slack", "pass", "mode")]
        for k, v in self.reports.items():
            for r in v:
                rows.append((k, r.provenance.get("seed"), r.lhs, r.rhs, r.slack, r.passed, r.mode))
        return rows


def worker_count() -> int:
    raw = os.environ.get("BERLAB_THREADS", "1").strip() or "1"
    try:
        n = int(raw)
    except ValueError:
        raise BadSpec(f"BERLAB_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise BadSpec("BERLAB_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def run_suite(checkers, n: int, base_seed: int = 0, mode: str = "certified", cfg: SearchConfig | None = None,
              workers: int | None = None, family: str = "random") -> SuiteResult:
    """Run every checker on ``n`` seeded instances; report order is instance order."""
    checkers = list(checkers)
    for c in checkers:
        _builder(c)
    if mode not in MODES:
        raise BadSpec(f"mode must be one of {MODES}")
    if int(n) < 0:
        raise BadSpec("n must be >= 0")
    workers = worker_count() if workers is None else max(int(workers), 1)
    jobs = [(c, i) for c in checkers for i in range(int(n))]
    start = time.perf_counter()

    def one(job):
        return run_instance(job[0], job[1], base_seed, mode, cfg, family)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(one, jobs))
    else:
        out = [one(j) for j in jobs]
    reports = {c: [] for c in checkers}
    for (c, _), rep in zip(jobs, out):
        reports[c].append(rep)
    return SuiteResult(reports, mode, int(base_seed), time.perf_counter() - start)


def load_suite_config(path) -> dict:
    """``{"checkers": [...], "n": int, "seed": int, "mode": ...}``; unknown ids raise UnknownChecker."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadSpec(f"suite config is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("checkers"), list):
        raise BadSpec("suite config needs a 'checkers' list")
    extra = set(obj) - {"checkers", "n", "seed", "mode"}
    if extra:
        raise BadSpec(f"unknown suite config keys: {sorted(extra)}")
    for c in obj["checkers"]:
        _builder(c)
    cfg = {"checkers": obj["checkers"], "n": obj.get("n", 200), "seed": obj.get("seed", 0),
           "mode": obj.get("mode", "certified")}
    if not isinstance(cfg["n"], int) or cfg["n"] < 0 or not isinstance(cfg["seed"], int):
        raise BadSpec("'n' and 'seed' must be nonnegative integers")
    if cfg["mode"] not in MODES:
        raise BadSpec(f"mode must be one of {MODES}")
    return cfg


# -- tightness ------------------------------------------------------------------

_NUDGE = {"r": (0.25, 1.0, 4.0), "q": (0.05, Q_MIN, 2.0), "p": (0.1, 1.0, 4.0), "alpha": (0.1, 0.0, 1.0)}


def _perturbations(params: dict, rng) -> list:
    out = []
    for key, (step, lo, hi) in _NUDGE.items():
        if key not in params or isinstance(params[key], bool):
            continue
        for sign in (-1.0, 1.0):
            v = float(np.clip(params[key] + sign * step * rng.uniform(0.5, 1.0), lo, hi))
            if v != params[key]:
                out.append({**params, key: v})
    return out


def tightness_search(checker: str, budget: int, base_seed: int = 0, mode: str = "certified",
                     cfg: SearchConfig | None = None, family: str = "random") -> CheckReport:
    """Instance with the largest ``lhs / rhs`` among ``budget`` seeded draws.

    Each draw is also re-run with small moves of its exponents (invalid moves
    are skipped). A ratio above ``1 + 1e-6`` means a numerical violation and
    raises BoundViolation.
    """
    build = _builder(checker)
    if int(budget) < 1:
        raise BadSpec("budget must be >= 1")
    cfg = cfg or (TIGHT_CONFIG if mode == "tight" else SUITE_CONFIG)
    best = None
    for i in range(int(budget)):
        seed = instance_seed(base_seed, checker, i)
        rng = np.random.default_rng(seed)
        case = build(rng, family)
        prov = {"seed": seed, "index": i, "family": family}
        for params in [case.params] + _perturbations(case.params, rng):
            try:
                rep = _run_case(case, params, mode, cfg, prov)
            except (BadExponent, InvalidPair):
                continue
            if rep.ratio > RATIO_LIMIT:
                raise BoundViolation(f"{checker}: ratio {rep.ratio!r} at seed {seed} with {params}")
            if best is None or rep.ratio > best.ratio:
                best = rep
    if best is None:
        raise BerlabError(f"{checker}: no valid instance in budget")
    return best
