"""Berezin symbols, Berezin numbers and the supremum search behind them.

The supremum over the domain is realized in two stages: a coarse scan
(polar grid per disk component, full enumeration for finite sets, product
grids for direct sums) followed by cyclic coordinate golden-section
refinement in ``(r, theta)`` around the best cells. The result is always a
lower estimate of the true supremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .cmatrix import as_matrix
from .errors import BadExponent, DimMismatch
from .rkhs import DirectSumSpace, block_offsets, components_of, direct_sum_kernel, normalized_kernel

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchConfig:
    radial: int = 64
    angular: int = 128
    refine: int = 40
    multistart: int = 16
    tol: float = 1e-6
    cycles: int = 10
    top_k: int = 4
    # coarse product-grid size cap for direct sums
    product_budget: int = 1 << 18
    seed: int = 0

    def __post_init__(self):
        for name in ("radial", "angular", "refine", "multistart", "cycles", "top_k", "product_budget"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"SearchConfig.{name} must be >= 1")
        if not self.tol > 0:
            raise ValueError("SearchConfig.tol must be positive")


class BerezinEstimate(NamedTuple):
    value: float
    argmax: object  # point, or tuple of points for a direct sum
    coarse_value: float
    mode: str = "lower-estimate"
    seed: int = 0


def _check_op(op, space) -> np.ndarray:
    op = as_matrix(op)
    dim = space.dim
    if op.shape != (dim, dim):
        raise DimMismatch(f"operator shape {op.shape} does not match space dimension {dim}")
    return op


def berezin_symbol(op, space, lam) -> complex:
    """``<A k^_lam, k^_lam>`` for a space or, with a tuple of points, a direct sum."""
    op = _check_op(op, space)
    if isinstance(space, DirectSumSpace):
        k = direct_sum_kernel(space, lam)
    else:
        k = normalized_kernel(space, lam)
    return complex(np.vdot(k, op @ k))


class _Candidates(NamedTuple):
    """Coarse sample of one component's domain."""

    points: np.ndarray  # complex points (disk) or indices (finite)
    r: np.ndarray | None
    theta: np.ndarray | None
    dr: float
    dtheta: float


def _polar_candidates(radial: int, angular: int) -> _Candidates:
    radial = max(int(radial), 2)
    angular = max(int(angular), 1)
    rs = np.linspace(0.0, 1.0, radial)
    ts = np.linspace(0.0, 2.0 * np.pi, angular, endpoint=False)
    r = np.concatenate([[0.0], np.repeat(rs[1:], angular)])
    theta = np.concatenate([[0.0], np.tile(ts, radial - 1)])
    return _Candidates(r * np.exp(1j * theta), r, theta, 1.0 / (radial - 1), 2.0 * np.pi / angular)


def _finite_candidates(space) -> _Candidates:
    return _Candidates(np.arange(space.size), None, None, 0.0, 0.0)


def _component_grids(comps, cfg: SearchConfig) -> list:
    if len(comps) == 1:
        c = comps[0]
        return [_polar_candidates(cfg.radial, cfg.angular) if c.is_disk else _finite_candidates(c)]
    finite_total = 1
    n_disk = 0
    for c in comps:
        if c.is_disk:
            n_disk += 1
        else:
            finite_total *= c.size
    grids = []
    if n_disk:
        per_disk = max(cfg.product_budget / finite_total, 1.0) ** (1.0 / n_disk)
        scale = math.sqrt(min(per_disk / (cfg.radial * cfg.angular), 1.0))
        radial = min(cfg.radial, max(3, round(cfg.radial * scale)))
        angular = min(cfg.angular, max(4, round(cfg.angular * scale)))
    for c in comps:
        grids.append(_polar_candidates(radial, angular) if c.is_disk else _finite_candidates(c))
    return grids


class _Objective:
    """Joint objective ``|symbol|`` or ``(sum |symbol_i|^p)^(1/p)`` over a domain."""

    def __init__(self, ops, space, p=None):
        self.comps = components_of(space)
        self.offsets = block_offsets(space) if isinstance(space, DirectSumSpace) else (0,)
        self.ops = [_check_op(op, space) for op in ops]
        self.p = p

    def _combine(self, syms):
        if self.p is None:
            return np.abs(syms[0])
        acc = sum(np.abs(s) ** self.p for s in syms)
        return acc ** (1.0 / self.p)

    def symbols(self, pts) -> list:
        """Symbols of every operator at a batch of point tuples (one array per component)."""
        k = np.concatenate([c.coeff_rows(x) for c, x in zip(self.comps, pts)], axis=1)
        den = np.sum(np.abs(k) ** 2, axis=1)
        kc = np.conj(k)
        return [np.sum(kc * (k @ op.T), axis=1) / den for op in self.ops]

    def values(self, pts) -> np.ndarray:
        return self._combine(self.symbols(pts))

    def grid_symbols(self, grids) -> list:
        """Symbols on the full product of per-component candidate lists."""
        m = len(self.comps)
        rows = [c.coeff_rows(g.points) for c, g in zip(self.comps, grids)]
        sizes = [len(g.points) for g in grids]

        def along(vec, axes):
            shape = [1] * m
            for ax, n in zip(axes, vec.shape):
                shape[ax] = n
            return vec.reshape(shape)

        den = sum(along(np.sum(np.abs(k) ** 2, axis=1), (i,)) for i, k in enumerate(rows))
        out = []
        for op in self.ops:
            num = np.zeros(sizes, dtype=np.complex128)
            for i in range(m):
                si = slice(self.offsets[i], self.offsets[i] + self.comps[i].dim)
                for j in range(m):
                    sj = slice(self.offsets[j], self.offsets[j] + self.comps[j].dim)
                    block = op[si, sj]
                    if not np.any(block):
                        continue
                    if i == j:
                        diag = np.sum(np.conj(rows[i]) * (rows[i] @ block.T), axis=1)
                        num = num + along(diag, (i,))
                    else:
                        g = np.conj(rows[i]) @ block @ rows[j].T
                        num = num + (along(g, (i, j)) if i < j else along(g.T, (j, i)))
            out.append(num / den)
        return out


def _golden_max(f, lo, hi, iters):
    """Lockstep golden-section maximization over per-start brackets."""
    a, b = lo.copy(), hi.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc >= fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        x = np.where(left, b - _INVPHI * (b - a), a + _INVPHI * (b - a))
        fx = f(x)
        c, d = np.where(left, x, d), np.where(left, c, x)
        fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)
    take_c = fc >= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd)


def _search(obj: _Objective, cfg: SearchConfig) -> BerezinEstimate:
    comps = obj.comps
    m = len(comps)
    grids = _component_grids(comps, cfg)
    coarse = obj._combine(obj.grid_symbols(grids)).reshape(-1)
    order = np.argsort(-coarse, kind="stable")
    coarse_value = float(coarse[order[0]])

    top = order[: cfg.top_k]
    multi = np.unravel_index(top, [len(g.points) for g in grids])
    state = []  # per component: dict of arrays
    for i, (c, g) in enumerate(zip(comps, grids)):
        if c.is_disk:
            state.append({"r": g.r[multi[i]].copy(), "t": g.theta[multi[i]].copy()})
        else:
            state.append({"i": g.points[multi[i]].copy()})

    if m > 1 and any(c.is_disk for c in comps) and cfg.multistart > 0:
        rng = np.random.default_rng(cfg.seed)
        n = cfg.multistart
        for c, s in zip(comps, state):
            if c.is_disk:
                s["r"] = np.concatenate([s["r"], np.sqrt(rng.uniform(0.0, 1.0, n))])
                s["t"] = np.concatenate([s["t"], rng.uniform(0.0, 2.0 * np.pi, n)])
            else:
                s["i"] = np.concatenate([s["i"], rng.integers(0, c.size, n)])

    def points(st):
        return [s["r"] * np.exp(1j * s["t"]) if c.is_disk else s["i"] for c, s in zip(comps, st)]

    current = obj.values(points(state))
    disk_idx = [i for i, c in enumerate(comps) if c.is_disk]

    for _ in range(cfg.cycles if disk_idx else 0):
        before = current.copy()
        for i in disk_idx:
            for key, width in (("r", grids[i].dr), ("t", grids[i].dtheta)):
                base = state[i][key]
                lo, hi = base - width, base + width
                if key == "r":
                    lo, hi = np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)

                def along(x, i=i, key=key):
                    trial = [dict(s) for s in state]
                    trial[i][key] = x
                    return obj.values(points(trial))

                cands = [_golden_max(along, lo, hi, cfg.refine)]
                if key == "r":
                    cands += [(lo, along(lo)), (hi, along(hi))]
                for x, fx in cands:
                    better = fx > current
                    state[i][key] = np.where(better, x, state[i][key])
                    current = np.where(better, fx, current)
        # coordinate ascent creeps along ridges; stop only when it has stalled
        gain = float(np.max(current - before))
        if gain <= 1e-3 * cfg.tol * max(1.0, float(np.max(current))):
            break

    best = int(np.argmax(current))
    pts = points(state)
    arg = [complex(p[best]) if c.is_disk else int(p[best]) for c, p in zip(comps, pts)]
    value = float(obj.values([np.array([a]) for a in arg])[0])
    argmax = tuple(arg) if m > 1 else arg[0]
    return BerezinEstimate(value, argmax, coarse_value, "lower-estimate", cfg.seed)


def berezin_number(op, space, cfg: SearchConfig | None = None) -> BerezinEstimate:
    """Lower estimate of ``sup |<A k^, k^>|`` over the domain of ``space``."""
    return _search(_Objective([op], space), cfg or SearchConfig())


def euclid_berezin_number(ops: Sequence, p: float, space, cfg: SearchConfig | None = None) -> BerezinEstimate:
    """Lower estimate of ``sup (sum_i |<T_i k^, k^>|^p)^(1/p)``."""
    if not p >= 1:
        raise BadExponent(f"exponent p must be >= 1, got {p}")
    if len(ops) == 0:
        raise ValueError("at least one operator required")
    return _search(_Objective(list(ops), space, p=float(p)), cfg or SearchConfig())


def berezin_set_sample(op, space, grid: int = 32) -> np.ndarray:
    """Symbol values on a polar grid (``grid`` radii x ``2*grid`` angles per disk)."""
    if int(grid) < 1:
        raise ValueError("grid must be >= 1")
    obj = _Objective([op], space)
    grids = [
        _polar_candidates(max(int(grid), 2), 2 * int(grid)) if c.is_disk else _finite_candidates(c)
        for c in obj.comps
    ]
    return obj.grid_symbols(grids)[0].reshape(-1)


def karaev_operator(n: int) -> np.ndarray:
    """Rank-one ``<., e_1> e_1`` on truncated Hardy(``n``), ``e_1(z) = z``."""
    if int(n) < 2:
        raise ValueError("the rank-one example needs n >= 2")
    a = np.zeros((int(n), int(n)), dtype=np.complex128)
    a[1, 1] = 1.0
    return a
