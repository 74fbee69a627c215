"""Checkers for Berezin-number inequalities on operators and operator matrices.

Every checker evaluates both sides of one inequality on a concrete instance
and returns a :class:`CheckReport`. Berezin numbers on the left are search
estimates, i.e. lower bounds, which is sound. On the right they are not, so
two regimes exist:

``certified``
    every Berezin number on the right is replaced by the operator norm,
    which dominates it; the check can then only fail on a real violation.
``tight``
    the right side keeps the search estimate (with a larger search budget)
    and the tolerance widens to ``TIGHT_TOL``; equality cases show up as
    zero slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .berezin import SearchConfig, berezin_number, berezin_set_sample, euclid_berezin_number
from .cmatrix import abs_op, adjoint, apply_fn, as_matrix, herm_eig, identity, operator_norm
from .errors import BadExponent, ContractionRequired, DimMismatch, InvalidPair, NegativeSpectrum, ShapeMismatch
from .opmatrix import BlockOperator, compress, embed_corner, off_diag
from .radii import numerical_radius
from .report import MODES, CheckReport, combine, make_report
from .rkhs import DirectSumSpace, normalized_kernel

CERTIFIED_TOL = 1e-7
TIGHT_TOL = 1e-5
EXACT_TOL = 1e-9
BLOCK_CERTIFIED_TOL = 1e-9
IDENTITY_TOL = 1e-6
ZERO_FLOOR = 1e-14
CONTRACTION_SLACK = 1e-9

TIGHT_CONFIG = SearchConfig(radial=96, angular=192, refine=50, multistart=24, cycles=16, tol=1e-9)

_PAIR_GRID = np.concatenate([[0.0], np.logspace(-6, 3, 63)])


@dataclass(frozen=True)
class FGPair:
    """Nonnegative ``f, g`` on ``[0, inf)`` with ``f(t) g(t) = t``; both act elementwise on arrays."""

    f: Callable
    g: Callable
    label: str

    def __post_init__(self):
        t = _PAIR_GRID
        with np.errstate(all="ignore"):
            fv = np.asarray(self.f(t), dtype=np.float64)
            gv = np.asarray(self.g(t), dtype=np.float64)
        if not (np.all(np.isfinite(fv)) and np.all(np.isfinite(gv))):
            raise InvalidPair(f"{self.label}: non-finite values on the validation grid")
        if np.any(fv < 0) or np.any(gv < 0):
            raise InvalidPair(f"{self.label}: f and g must be nonnegative")
        if np.any(np.abs(fv * gv - t) > 1e-9 * np.maximum(1.0, t)):
            raise InvalidPair(f"{self.label}: f(t) g(t) != t")


def power_pair(alpha: float) -> FGPair:
    """``f = t^alpha``, ``g = t^(1 - alpha)`` for ``alpha`` in ``[0, 1]``."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise InvalidPair(f"power pair needs alpha in [0, 1], got {alpha}")
    return FGPair(lambda t: np.power(t, alpha), lambda t: np.power(t, 1.0 - alpha), f"power:{alpha:g}")


def _t_over_log1p(t):
    t = np.asarray(t, dtype=np.float64)
    out = np.ones_like(t)
    pos = t > 0
    out[pos] = t[pos] / np.log1p(t[pos])
    return out


def log_pair() -> FGPair:
    """``f = log(1 + t)``, ``g = t / log(1 + t)`` (``g(0) = 1``)."""
    return FGPair(np.log1p, _t_over_log1p, "log1p")


def as_pair(pair) -> FGPair:
    if isinstance(pair, FGPair):
        return pair
    if pair == "sqrt":
        return power_pair(0.5)
    if pair == "log1p":
        return log_pair()
    if isinstance(pair, str) and pair.startswith("power:"):
        return power_pair(float(pair.split(":", 1)[1]))
    raise InvalidPair(f"unknown pair {pair!r}")


@dataclass(frozen=True)
class ExponentSet:
    """``r >= 1``, conjugate ``p, q`` with ``p r >= q r >= 2``, and ``alpha`` in ``[0, 1]``."""

    r: float
    p: float
    q: float
    alpha: float = 0.5

    def __post_init__(self):
        r, p, q, a = self.r, self.p, self.q, self.alpha
        if not r >= 1:
            raise BadExponent(f"r must be >= 1, got {r}")
        if not (p > 1 and q > 1) or abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
            raise BadExponent(f"p={p}, q={q} are not conjugate exponents")
        eps = 1e-12
        if not (p * r >= q * r - eps and q * r >= 2.0 - eps):
            raise BadExponent(f"need p r >= q r >= 2, got p r={p * r}, q r={q * r}")
        if not 0.0 <= a <= 1.0:
            raise BadExponent(f"alpha must lie in [0, 1], got {a}")

    @classmethod
    def from_q(cls, r: float, q: float, alpha: float = 0.5) -> "ExponentSet":
        return cls(float(r), q / (q - 1.0), float(q), float(alpha))

    def as_dict(self) -> dict:
        return {"r": self.r, "p": self.p, "q": self.q, "alpha": self.alpha}


def _setup(mode: str, cfg, certified_tol: float):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "tight":
        return cfg or TIGHT_CONFIG, TIGHT_TOL
    return cfg or SearchConfig(), certified_tol


def _rhs_ber(op, space, mode: str, cfg) -> float:
    """Berezin number where it appears on a right-hand side."""
    if mode == "certified":
        return operator_norm(op)
    return berezin_number(op, space, cfg).value


def _fn_of_abs(x, fn) -> np.ndarray:
    return apply_fn(abs_op(x), fn, zero_floor=ZERO_FLOOR)


def _psd_power(m, exponent: float) -> np.ndarray:
    # overflow surfaces as non-finite entries, checked by the caller
    with np.errstate(over="ignore", invalid="ignore"):
        return apply_fn(m, lambda t: np.power(t, exponent), zero_floor=ZERO_FLOOR)


def _vector(x, n: int) -> np.ndarray:
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.shape != (n,):
        raise DimMismatch(f"vector of length {n} expected, got {v.shape}")
    return v


# -- lemmas ---------------------------------------------------------------


def check_mccarty(t, x, r: float, *, mode: str = "certified", provenance=None) -> CheckReport:
    """``<t x, x>^r <= <t^r x, x>`` for PSD ``t``, ``||x|| <= 1``, ``r >= 1``."""
    if not r >= 1:
        raise BadExponent(f"r must be >= 1, got {r}")
    t = as_matrix(t)
    x = _vector(x, t.shape[0])
    if np.linalg.norm(x) > 1.0 + 1e-12:
        raise ValueError("McCarty inequality needs ||x|| <= 1")
    vals = herm_eig(t).eigenvalues
    if vals[0] < -1e-10 * max(1.0, float(np.max(np.abs(vals)))):
        raise NegativeSpectrum("McCarty inequality needs a positive operator")
    base = max(float(np.vdot(x, t @ x).real), 0.0)
    rhs = float(np.vdot(x, _psd_power(t, r) @ x).real)
    prov = {"dim": t.shape[0], "r": r, **(provenance or {})}
    return make_report("mccarty", base**r, rhs, EXACT_TOL, mode, prov)


def check_mixed_schwarz(t, x, y, pair, *, mode: str = "certified", provenance=None) -> CheckReport:
    """``|<t x, y>|^2 <= <f^2(|t|) x, x> <g^2(|t*|) y, y>``."""
    pair = as_pair(pair)
    t = as_matrix(t)
    n = t.shape[0]
    x, y = _vector(x, n), _vector(y, n)
    lhs = abs(np.vdot(y, t @ x)) ** 2
    fx = _fn_of_abs(t, lambda s: pair.f(s) ** 2)
    gy = _fn_of_abs(adjoint(t), lambda s: pair.g(s) ** 2)
    rhs = float(np.vdot(x, fx @ x).real) * float(np.vdot(y, gy @ y).real)
    prov = {"dim": n, "pair": pair.label, **(provenance or {})}
    return make_report("mixed_schwarz", lhs, rhs, EXACT_TOL, mode, prov)


# -- operator matrices ----------------------------------------------------


def check_block_bound(t: BlockOperator, cfg: SearchConfig | None = None, *, mode: str = "certified",
                      provenance=None) -> CheckReport:
    """``ber(T) <= w([t_ij])`` with ``ber(T_ii)`` on the diagonal and ``||T_ij||`` off it."""
    cfg, tol = _setup(mode, cfg, BLOCK_CERTIFIED_TOL)
    lhs = berezin_number(t.flat, t.spaces, cfg).value
    # certified: ||T_ii|| >= ber(T_ii), and w is monotone on nonnegative matrices
    comp = compress(t, "hou-norm" if mode == "certified" else "ber-diag", cfg)
    rhs = numerical_radius(comp).value
    prov = {"dims": list(t.spaces.dims), **(provenance or {})}
    return make_report("block_bound", lhs, rhs, tol, mode, prov)


def two_by_two_bound(a: float, b: float, c: float, d: float) -> float:
    """``(a + d)/2 + sqrt((a - d)^2 + (b + c)^2)/2``."""
    return 0.5 * (a + d) + 0.5 * math.hypot(a - d, b + c)


def check_two_by_two(t: BlockOperator, cfg: SearchConfig | None = None, *, mode: str = "certified",
                     provenance=None) -> CheckReport:
    """Closed-form bound for ``[[A, B], [C, D]]``, plus the max rule when ``B = C = 0``.

    Also confirms that ``w([[a, b], [c, d]])`` for the scalar compression
    equals half the spectral radius of its symmetrization ``M + M^T`` and the
    closed form.
    """
    if t.n != 2:
        raise ShapeMismatch("a 2x2 block operator is required")
    cfg, tol = _setup(mode, cfg, CERTIFIED_TOL)
    (ba, bb), (bc, bd) = t.blocks
    s1, s2 = t.spaces.components
    a, d = _rhs_ber(ba, s1, mode, cfg), _rhs_ber(bd, s2, mode, cfg)
    nb, nc = operator_norm(bb), operator_norm(bc)
    lhs = berezin_number(t.flat, t.spaces, cfg).value
    prov = {"dims": list(t.spaces.dims), **(provenance or {})}

    children = [make_report("two_by_two.bound", lhs, two_by_two_bound(a, nb, nc, d), tol, mode)]
    if nb == 0.0 and nc == 0.0:
        children.append(make_report("two_by_two.max_rule", lhs, max(a, d), tol, mode))

    m = np.array([[a, nb], [nc, d]])
    w = numerical_radius(m).value
    sym = herm_eig(m + m.T).eigenvalues
    half_r = 0.5 * float(np.max(np.abs(sym)))
    gap = max(abs(w - half_r), abs(half_r - two_by_two_bound(a, nb, nc, d)))
    children.append(make_report("two_by_two.identity", gap, 0.0, IDENTITY_TOL, mode, kind="identity"))
    return combine("two_by_two", children, mode, prov)


def _offdiag_terms(x, y, pair: FGPair, power: float, spaces: DirectSumSpace, mode: str, cfg):
    """``ber(f^{2s}(|X|) + g^{2s}(|Y*|))`` over component 2 and ``ber(f^{2s}(|Y|) + g^{2s}(|X*|))`` over 1."""
    s = 2.0 * power
    fpow = lambda t: pair.f(t) ** s  # noqa: E731
    gpow = lambda t: pair.g(t) ** s  # noqa: E731
    m2 = _fn_of_abs(x, fpow) + _fn_of_abs(adjoint(y), gpow)
    m1 = _fn_of_abs(y, fpow) + _fn_of_abs(adjoint(x), gpow)
    s1, s2 = spaces.components
    return _rhs_ber(m2, s2, mode, cfg), _rhs_ber(m1, s1, mode, cfg)


def _require_offdiag_shapes(x, y, spaces: DirectSumSpace):
    if len(spaces) != 2:
        raise ShapeMismatch("off-diagonal checks need a two-component direct sum")
    d1, d2 = spaces.dims
    if d1 != d2:
        raise ShapeMismatch("off-diagonal checks need equal component dimensions (|X| of a square X)")
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != (d1, d2) or y.shape != (d2, d1):
        raise ShapeMismatch(f"blocks must be {d1}x{d2}, got {x.shape} and {y.shape}")
    return x, y


def check_offdiag_fg(x, y, pair, r: float, spaces: DirectSumSpace, cfg: SearchConfig | None = None, *,
                     mode: str = "certified", provenance=None, checker: str = "offdiag_fg") -> CheckReport:
    """``ber^r([[0, X], [Y, 0]]) <= 2^(r-2) ber^(1/2)(f^2r(|X|) + g^2r(|Y*|)) ber^(1/2)(f^2r(|Y|) + g^2r(|X*|))``."""
    if not r >= 1:
        raise BadExponent(f"r must be >= 1, got {r}")
    pair = as_pair(pair)
    x, y = _require_offdiag_shapes(x, y, spaces)
    cfg, tol = _setup(mode, cfg, CERTIFIED_TOL)
    t = off_diag(x, y, spaces)
    lhs = berezin_number(t.flat, spaces, cfg).value ** r
    b2, b1 = _offdiag_terms(x, y, pair, r, spaces, mode, cfg)
    rhs = 2.0 ** (r - 2.0) * math.sqrt(b2) * math.sqrt(b1)
    prov = {"dims": list(spaces.dims), "r": r, "pair": pair.label, **(provenance or {})}
    return make_report(checker, lhs, rhs, tol, mode, prov)


def check_offdiag_power(x, y, alpha: float, r: float, spaces: DirectSumSpace, cfg: SearchConfig | None = None, *,
                        mode: str = "certified", provenance=None) -> CheckReport:
    """The off-diagonal bound with ``f = t^alpha``, ``g = t^(1 - alpha)``."""
    return check_offdiag_fg(x, y, power_pair(alpha), r, spaces, cfg, mode=mode, provenance=provenance,
                            checker="offdiag_power")


# -- products A* X B --------------------------------------------------------


def _product_check(checker, as_, bs, xs, pair, exps: ExponentSet, space, cfg, mode, contraction, provenance):
    pair = as_pair(pair)
    if not (len(as_) == len(bs) == len(xs) >= 1):
        raise ShapeMismatch("A, B and X lists must have equal nonzero length")
    dim = space.dim
    as_ = [as_matrix(m) for m in as_]
    bs = [as_matrix(m) for m in bs]
    xs = [as_matrix(m) for m in xs]
    if any(m.shape != (dim, dim) for m in (*as_, *bs, *xs)):
        raise ShapeMismatch(f"all operators must be {dim}x{dim}")
    cfg, tol = _setup(mode, cfg, CERTIFIED_TOL)
    r, p, q = exps.r, exps.p, exps.q
    eye = identity(dim)

    if contraction:
        for name, ms in (("A", as_), ("B", bs)):
            gram = sum(adjoint(m) @ m for m in ms)
            if herm_eig(eye - gram).eigenvalues[0] < -CONTRACTION_SLACK:
                raise ContractionRequired(f"sum of {name}_i* {name}_i is not <= I")
        fp = lambda t: pair.f(t) ** (r * p)  # noqa: E731
        gq = lambda t: pair.g(t) ** (r * q)  # noqa: E731
        left = sum(adjoint(b) @ _fn_of_abs(x, fp) @ b for b, x in zip(bs, xs))
        right = sum(adjoint(a) @ _fn_of_abs(adjoint(x), gq) @ a for a, x in zip(as_, xs))
        m = left / p + right / q
    else:
        f2 = lambda t: pair.f(t) ** 2  # noqa: E731
        g2 = lambda t: pair.g(t) ** 2  # noqa: E731
        left = sum(adjoint(b) @ _fn_of_abs(x, f2) @ b for b, x in zip(bs, xs))
        right = sum(adjoint(a) @ _fn_of_abs(adjoint(x), g2) @ a for a, x in zip(as_, xs))
        m = _psd_power(left, r * p / 2.0) / p + _psd_power(right, r * q / 2.0) / q
    m = 0.5 * (m + adjoint(m))
    if not np.all(np.isfinite(m)):
        raise OverflowError(f"{checker}: right-side operator overflows at r p = {r * p:g}; rescale the inputs")

    target = sum(adjoint(a) @ x @ b for a, x, b in zip(as_, xs, bs))
    lhs = berezin_number(target, space, cfg).value ** r
    rhs = _rhs_ber(m, space, mode, cfg)
    prov = {"dim": dim, "n": len(xs), **exps.as_dict(), "pair": pair.label, "contraction": bool(contraction),
            **(provenance or {})}
    return make_report(checker, lhs, rhs, tol, mode, prov)


def check_product(a, b, x, pair, exps: ExponentSet, space, cfg: SearchConfig | None = None, *,
                  mode: str = "certified", contraction: bool = False, provenance=None) -> CheckReport:
    """``ber^r(A* X B) <= ber((1/p)[B* f^2(|X|) B]^(rp/2) + (1/q)[A* g^2(|X*|) A]^(rq/2))``.

    With ``contraction=True`` (``||A||, ||B|| <= 1``) the right side becomes
    ``ber((1/p) B* f^(rp)(|X|) B + (1/q) A* g^(rq)(|X*|) A)``.
    """
    a, b = as_matrix(a), as_matrix(b)
    if contraction and (operator_norm(a) > 1.0 + CONTRACTION_SLACK or operator_norm(b) > 1.0 + CONTRACTION_SLACK):
        raise ContractionRequired("A and B must be contractions")
    return _product_check("product", [a], [b], [x], pair, exps, space, cfg, mode, contraction, provenance)


def check_sums(as_: Sequence, bs: Sequence, xs: Sequence, pair, exps: ExponentSet, space,
               cfg: SearchConfig | None = None, *, mode: str = "certified", contraction: bool = False,
               provenance=None) -> CheckReport:
    """The ``A* X B`` bound for ``sum_i A_i* X_i B_i``; the contraction form needs ``sum A_i* A_i <= I``."""
    return _product_check("sums", list(as_), list(bs), list(xs), pair, exps, space, cfg, mode, contraction,
                          provenance)


# -- generalized Euclidean Berezin number ------------------------------------


def check_euclid_offdiag(xs: Sequence, ys: Sequence, pair, p: float, spaces: DirectSumSpace,
                         cfg: SearchConfig | None = None, *, mode: str = "certified", provenance=None) -> CheckReport:
    """``ber_p^p(T_1..T_n) <= 2^(p-2) sum_i ber^(1/2)(f^2p(|X_i|) + g^2p(|Y_i*|)) ber^(1/2)(f^2p(|Y_i|) + g^2p(|X_i*|))``."""
    if not p >= 1:
        raise BadExponent(f"p must be >= 1, got {p}")
    if len(xs) != len(ys) or not xs:
        raise ShapeMismatch("X and Y lists must have equal nonzero length")
    pair = as_pair(pair)
    cfg, tol = _setup(mode, cfg, CERTIFIED_TOL)
    pairs = [_require_offdiag_shapes(x, y, spaces) for x, y in zip(xs, ys)]
    ops = [off_diag(x, y, spaces).flat for x, y in pairs]
    lhs = euclid_berezin_number(ops, p, spaces, cfg).value ** p
    total = 0.0
    for x, y in pairs:
        b2, b1 = _offdiag_terms(x, y, pair, p, spaces, mode, cfg)
        total += math.sqrt(b2) * math.sqrt(b1)
    rhs = 2.0 ** (p - 2.0) * total
    prov = {"dims": list(spaces.dims), "n": len(xs), "p": p, "pair": pair.label, **(provenance or {})}
    return make_report("euclid_offdiag", lhs, rhs, tol, mode, prov)


def check_euclid_blocks(ts: Sequence[BlockOperator], p: float, cfg: SearchConfig | None = None, *,
                        mode: str = "certified", provenance=None) -> CheckReport:
    """``ber_p^p(T_1..T_n) <= 2^(-p) sum_i (a_i + d_i + sqrt((a_i - d_i)^2 + (||B_i|| + ||C_i||)^2))^p``."""
    if not p >= 1:
        raise BadExponent(f"p must be >= 1, got {p}")
    if not ts:
        raise ShapeMismatch("at least one block operator required")
    spaces = ts[0].spaces
    if any(t.n != 2 for t in ts) or any(t.spaces != spaces for t in ts):
        raise ShapeMismatch("all operators must be 2x2 over the same direct sum")
    cfg, tol = _setup(mode, cfg, CERTIFIED_TOL)
    lhs = euclid_berezin_number([t.flat for t in ts], p, spaces, cfg).value ** p
    s1, s2 = spaces.components
    total = 0.0
    for t in ts:
        (ba, bb), (bc, bd) = t.blocks
        a, d = _rhs_ber(ba, s1, mode, cfg), _rhs_ber(bd, s2, mode, cfg)
        total += (2.0 * two_by_two_bound(a, operator_norm(bb), operator_norm(bc), d)) ** p
    rhs = 2.0 ** (-p) * total
    prov = {"dims": list(spaces.dims), "n": len(ts), "p": p, **(provenance or {})}
    return make_report("euclid_blocks", lhs, rhs, tol, mode, prov)


# -- basic facts ---------------------------------------------------------------


def check_basic_order(a, space, cfg: SearchConfig | None = None, *, mode: str = "certified", grid: int = 24,
                      provenance=None) -> CheckReport:
    """``ber(A) <= w(A) <= ||A||`` and every sampled symbol value inside the numerical range disk."""
    cfg, _ = _setup(mode, cfg, CERTIFIED_TOL)
    a = as_matrix(a)
    ber = berezin_number(a, space, cfg).value
    w = numerical_radius(a).value
    norm = operator_norm(a)
    sample = berezin_set_sample(a, space, grid)
    children = [
        make_report("basic_order.ber_le_w", ber, w, CERTIFIED_TOL, mode),
        make_report("basic_order.w_le_norm", w, norm, CERTIFIED_TOL, mode),
        make_report("basic_order.set_in_range", float(np.max(np.abs(sample))), w, CERTIFIED_TOL, mode),
    ]
    prov = {"dim": a.shape[0], **(provenance or {})}
    return combine("basic_order", children, mode, prov)


def check_embed_monotone(x, y, space, pad, cfg: SearchConfig | None = None, *, mode: str = "certified",
                         grid: int = 8, provenance=None) -> CheckReport:
    """Facts behind the corner-embedding lemma, for both ``x`` and ``y``.

    ``ber([[Z, 0], [0, 0]]) <= ber(Z)``, and the symbol of ``Z`` at ``lam``
    equals the quadratic form of the embedding at ``(k^_lam, 0)``.
    """
    cfg, tol = _setup(mode, cfg, CERTIFIED_TOL)
    spaces = DirectSumSpace((space, pad))
    if space.is_disk:
        r = np.linspace(0.0, 1.0, grid)
        pts = [complex(v) for v in (r[:, None] * np.exp(2j * np.pi * np.arange(grid) / grid)).reshape(-1)]
    else:
        pts = list(range(space.size))
    children = []
    for name, z in (("x", x), ("y", y)):
        z = as_matrix(z)
        if z.shape != (space.dim, space.dim):
            raise ShapeMismatch(f"{name} must be {space.dim}x{space.dim}")
        emb = embed_corner(z, spaces)
        est = berezin_number(z, space, cfg)
        lhs = berezin_number(emb.flat, spaces, cfg).value
        rhs = operator_norm(z) if mode == "certified" else est.value
        children.append(make_report(f"embed_monotone.{name}.ber", lhs, rhs, tol, mode))
        gap = 0.0
        pad_zero = np.zeros(pad.dim, dtype=np.complex128)
        for lam in pts + [est.argmax]:
            k = normalized_kernel(space, lam)
            v = np.concatenate([k, pad_zero])
            gap = max(gap, abs(np.vdot(k, z @ k) - np.vdot(v, emb.flat @ v)))
        children.append(make_report(f"embed_monotone.{name}.symbol", gap, 0.0, tol, mode, kind="identity"))
    prov = {"dims": [space.dim, pad.dim], **(provenance or {})}
    return combine("embed_monotone", children, mode, prov)
