from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berlab.berezin import SearchConfig, karaev_operator
from berlab.cmatrix import identity, operator_norm
from berlab.harness import tame_p_side
from berlab.errors import BadExponent, ContractionRequired, InvalidPair, NegativeSpectrum, ShapeMismatch
from berlab.inequalities import (
    TIGHT_TOL,
    ExponentSet,
    FGPair,
    as_pair,
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
    two_by_two_bound,
)
from berlab.opmatrix import assemble, diag_blocks, off_diag
from berlab.rkhs import DirectSumSpace, FiniteSet, TruncatedBergman, TruncatedHardy
from conftest import ginibre, positive

seeds = st.integers(0, 2**32 - 1)
FAST = SearchConfig(radial=32, angular=64, refine=30, cycles=6, multistart=8, product_budget=1 << 14)
H4 = TruncatedHardy(4)
H4x2 = DirectSumSpace((H4, H4))
SQRT = power_pair(0.5)


def equality(rep, tol=1e-9):
    assert rep.passed
    assert abs(rep.slack) <= tol, rep.to_dict()


# -- types --------------------------------------------------------------------


def test_pairs_validate():
    for a in (0, 0.25, 0.5, 1):
        power_pair(a)
    log_pair()
    with pytest.raises(InvalidPair):
        FGPair(lambda t: t, lambda t: t, "bad")
    with pytest.raises(InvalidPair):
        FGPair(lambda t: -np.ones_like(t), lambda t: -t, "negative")
    with pytest.raises(InvalidPair):
        power_pair(1.5)
    assert as_pair("sqrt").label == "power:0.5"
    assert as_pair("log1p").label == "log1p"
    with pytest.raises(InvalidPair):
        as_pair("cosh")


def test_exponent_set_validation():
    ExponentSet(1, 2, 2)
    ExponentSet.from_q(2, 1.5)
    ExponentSet(3, 3, 1.5)
    with pytest.raises(BadExponent):
        ExponentSet(0.5, 2, 2)
    with pytest.raises(BadExponent):
        ExponentSet(1, 2, 3)
    with pytest.raises(BadExponent):
        ExponentSet(1, 1.5, 3)  # pr < qr
    with pytest.raises(BadExponent):
        ExponentSet.from_q(1, 1.5)  # qr < 2
    with pytest.raises(BadExponent):
        ExponentSet(1, 2, 2, alpha=2)


@given(st.floats(1, 4), st.floats(1.001, 2))
def test_exponent_set_accepts_exactly_the_constraint(r, q):
    p = q / (q - 1)
    ok = q * r >= 2 and p * r >= q * r
    if ok:
        ExponentSet(r, p, q)
    else:
        with pytest.raises(BadExponent):
            ExponentSet(r, p, q)


# -- lemmas --------------------------------------------------------------------


def test_mccarty_examples():
    v = np.array([0.6, 0.8j])
    for r in (1, 2.5):
        equality(check_mccarty(np.eye(2), v, r))
    rep = check_mccarty(np.diag([1, 4]), np.array([1, 1]) / math.sqrt(2), 2)
    assert rep.lhs == pytest.approx(6.25) and rep.rhs == pytest.approx(8.5)
    equality(check_mccarty(np.diag([1, 4]), [1, 0], 3))
    with pytest.raises(NegativeSpectrum):
        check_mccarty(np.diag([1, -1]), [1, 0], 2)
    with pytest.raises(BadExponent):
        check_mccarty(np.eye(2), [1, 0], 0.5)
    with pytest.raises(ValueError):
        check_mccarty(np.eye(2), [1, 1], 2)


@given(seeds, st.integers(1, 8), st.floats(1, 4))
def test_mccarty_random(seed, n, r):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x *= rng.uniform(0, 1) / np.linalg.norm(x)
    assert check_mccarty(positive(rng, n) * 3, x, r).passed


def test_mixed_schwarz_examples():
    equality(check_mixed_schwarz([[0, 2], [0, 0]], [0, 1], [1, 0], SQRT))
    rep = check_mixed_schwarz([[0, 2], [0, 0]], [0, 1], [1, 0], SQRT)
    assert rep.lhs == pytest.approx(4) and rep.rhs == pytest.approx(4)
    v = np.array([0.6, 0.8])
    for pair in (SQRT, power_pair(0), log_pair()):
        equality(check_mixed_schwarz(np.eye(2), v, v, pair))
    rep = check_mixed_schwarz(ginibre(np.random.default_rng(0), 3), np.zeros(3), np.ones(3), SQRT)
    assert rep.lhs == 0 and rep.rhs == 0


@given(seeds, st.integers(1, 8), st.sampled_from(["power:0", "power:0.3", "sqrt", "power:1", "log1p"]))
def test_mixed_schwarz_random(seed, n, pair):
    rng = np.random.default_rng(seed)
    t = ginibre(rng, n) * rng.uniform(0.1, 5)
    x, y = ginibre(rng, n, 1)[:, 0], ginibre(rng, n, 1)[:, 0]
    assert check_mixed_schwarz(t, x, y, pair).passed


# -- operator matrices ------------------------------------------------------------


def one_points(k=2):
    return DirectSumSpace(tuple(FiniteSet(np.ones((1, 1))) for _ in range(k)))


@pytest.mark.parametrize("mode", ["certified", "tight"])
def test_block_bound_examples(mode):
    t = assemble([[[[1]], [[2]]], [[[3]], [[4]]]], one_points())
    rep = check_block_bound(t, mode=mode)
    assert rep.lhs == pytest.approx(5, abs=1e-12)
    assert rep.rhs == pytest.approx(2.5 + math.sqrt(8.5), abs=1e-9)
    assert rep.passed
    zero = diag_blocks([np.zeros((4, 4))] * 2, H4x2)
    equality(check_block_bound(zero, mode=mode))
    corner = diag_blocks([np.eye(4), np.zeros((4, 4))], H4x2)
    rep = check_block_bound(corner, mode=mode)
    assert rep.lhs == pytest.approx(0.8, abs=1e-9) and rep.rhs == pytest.approx(1, abs=1e-9)


def test_block_bound_tolerances():
    t = diag_blocks([np.eye(2)] * 2, DirectSumSpace((TruncatedHardy(2), TruncatedHardy(2))))
    assert check_block_bound(t).tol == 1e-9
    assert check_block_bound(t, mode="tight").tol == TIGHT_TOL


@pytest.mark.parametrize("mode", ["certified", "tight"])
def test_two_by_two_examples(mode):
    rep = check_two_by_two(diag_blocks([np.eye(4)] * 2, H4x2), mode=mode)
    assert rep.passed
    names = [c.checker for c in rep.children]
    assert names == ["two_by_two.bound", "two_by_two.max_rule", "two_by_two.identity"]
    for c in rep.children[:2]:
        equality(c, 1e-9)
    swap = off_diag(np.eye(4), np.eye(4), H4x2)
    bound = check_two_by_two(swap, mode=mode).children[0]
    equality(bound, 1e-9)
    assert bound.lhs == pytest.approx(1, abs=1e-9)


def test_two_by_two_karaev_max_rule():
    h = TruncatedHardy(64)
    s = DirectSumSpace((h, h))
    t = diag_blocks([karaev_operator(64), np.zeros((64, 64))], s)
    rep = check_two_by_two(t, FAST, mode="tight")
    rule = rep.children[1]
    assert rule.checker == "two_by_two.max_rule"
    assert rule.lhs <= 0.25 + 5e-3 and rule.rhs == pytest.approx(0.25, abs=1e-6)
    assert rep.passed


def test_two_by_two_closed_form():
    assert two_by_two_bound(1, 2, 3, 4) == pytest.approx(2.5 + math.sqrt(9 + 25) / 2)
    assert two_by_two_bound(2, 0, 0, 1) == pytest.approx(2)


@settings(max_examples=10)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_two_by_two_identity_child(seed, d1, d2):
    rng = np.random.default_rng(seed)
    s = DirectSumSpace((TruncatedHardy(d1 + 1), TruncatedBergman(d2 + 1)))
    dims = s.dims
    t = assemble([[ginibre(rng, a, b) for b in dims] for a in dims], s)
    rep = check_two_by_two(t, FAST)
    ident = rep.children[-1]
    assert ident.checker == "two_by_two.identity" and ident.lhs <= 1e-6
    assert rep.passed


def test_two_by_two_requires_two_blocks():
    s = DirectSumSpace((TruncatedHardy(2),) * 3)
    with pytest.raises(ShapeMismatch):
        check_two_by_two(diag_blocks([np.eye(2)] * 3, s))


@pytest.mark.parametrize("mode", ["certified", "tight"])
def test_offdiag_examples(mode):
    eye = np.eye(4)
    equality(check_offdiag_fg(eye, eye, SQRT, 1, H4x2, mode=mode))
    z = np.zeros((4, 4))
    equality(check_offdiag_fg(z, z, SQRT, 2, H4x2, mode=mode))
    # g(0) = 1 for the log pair, so zero blocks still leave a positive right side
    rep = check_offdiag_fg(z, z, log_pair(), 2, H4x2, mode=mode)
    assert rep.lhs == 0 and rep.rhs == pytest.approx(1)
    rep = check_offdiag_power(eye, eye, 0.5, 1, H4x2, mode=mode)
    ref = check_offdiag_fg(eye, eye, SQRT, 1, H4x2, mode=mode)
    assert (rep.lhs, rep.rhs) == (ref.lhs, ref.rhs) and rep.checker == "offdiag_power"
    for r in (1, 2, 3):
        rep = check_offdiag_power(eye, eye, 1.0, r, H4x2, mode=mode)
        assert rep.rhs == pytest.approx(2 ** (r - 1), rel=1e-9) and rep.lhs == pytest.approx(1, abs=1e-9)
    rng = np.random.default_rng(7)
    assert check_offdiag_power(z, ginibre(rng, 4), 0.3, 2, H4x2, FAST, mode=mode).passed


def test_offdiag_random_seeded():
    rng = np.random.default_rng(11)
    rep = check_offdiag_power(ginibre(rng, 4), ginibre(rng, 4), 0.3, 2, H4x2, FAST)
    assert rep.passed and rep.slack > 0


def test_offdiag_errors():
    with pytest.raises(BadExponent):
        check_offdiag_fg(np.eye(4), np.eye(4), SQRT, 0.5, H4x2)
    s = DirectSumSpace((TruncatedHardy(2), TruncatedHardy(3)))
    with pytest.raises(ShapeMismatch):
        check_offdiag_fg(np.ones((2, 3)), np.ones((3, 2)), SQRT, 1, s)


# -- products ---------------------------------------------------------------------------

E_SMOKE = ExponentSet(1, 2, 2)


def test_product_equality_example():
    h = TruncatedHardy(2)
    x = np.diag([1.0, 2.0])
    rep = check_product(np.eye(2), np.eye(2), x, SQRT, E_SMOKE, h, mode="tight")
    assert rep.lhs == pytest.approx(1.5, abs=1e-9) and rep.rhs == pytest.approx(1.5, abs=1e-9)
    equality(rep)
    rep = check_product(np.eye(2), np.eye(2), np.zeros((2, 2)), SQRT, E_SMOKE, h)
    assert rep.lhs == 0 and rep.rhs >= 0


@settings(max_examples=15)
@given(seeds, st.integers(1, 6), st.sampled_from([1.0, 1.5, 2.0, 3.0]), st.floats(0, 1),
       st.sampled_from(["power:0", "power:0.25", "sqrt", "power:1", "log1p"]), st.booleans())
def test_product_random(seed, n, r, u, pair, contraction):
    rng = np.random.default_rng(seed)
    q = max(1.001, 2 / r) + u * (2 - max(1.001, 2 / r))
    exps = ExponentSet.from_q(r, q)
    kind = (lambda m: m / (operator_norm(m) + 1e-12)) if contraction else (lambda m: m)
    a, b, x = kind(ginibre(rng, n)), kind(ginibre(rng, n)), ginibre(rng, n) * 2
    (a,), (b,), (x,) = tame_p_side([a], [b], [x], as_pair(pair), exps.r, exps.p, contraction)
    rep = check_product(a, b, x, pair, exps, TruncatedBergman(n), FAST, contraction=contraction)
    assert rep.passed, rep.to_dict()


def test_product_overflow_is_reported():
    x = 10 * np.eye(2)
    with pytest.raises(OverflowError):
        check_product(np.eye(2), np.eye(2), x, "power:1", ExponentSet.from_q(3, 1.001), TruncatedHardy(2))


def test_product_contraction_required():
    with pytest.raises(ContractionRequired):
        check_product(2 * np.eye(2), np.eye(2), np.eye(2), SQRT, E_SMOKE, TruncatedHardy(2), contraction=True)
    with pytest.raises(ShapeMismatch):
        check_product(np.eye(3), np.eye(2), np.eye(2), SQRT, E_SMOKE, TruncatedHardy(2))


@settings(max_examples=10)
@given(seeds, st.integers(1, 5), st.booleans())
def test_sums_n1_matches_product(seed, n, contraction):
    rng = np.random.default_rng(seed)
    scale = (lambda m: m / (operator_norm(m) + 1e-12)) if contraction else (lambda m: m)
    a, b, x = scale(ginibre(rng, n)), scale(ginibre(rng, n)), ginibre(rng, n)
    exps = ExponentSet.from_q(2, 1.5, 0.25)
    h = TruncatedHardy(n)
    p = check_product(a, b, x, power_pair(0.25), exps, h, FAST, contraction=contraction)
    s = check_sums([a], [b], [x], power_pair(0.25), exps, h, FAST, contraction=contraction)
    assert s.lhs == pytest.approx(p.lhs, abs=1e-10) and s.rhs == pytest.approx(p.rhs, abs=1e-10)
    assert s.checker == "sums"


def test_sums_examples():
    rng = np.random.default_rng(3)
    h = TruncatedBergman(4)
    x = positive(rng, 4)
    half = np.eye(4) / math.sqrt(2)
    equality(check_sums([half, half], [half, half], [x, x], SQRT, E_SMOKE, h, mode="tight"), 1e-9)
    rep = check_sums([half] * 2, [half] * 2, [np.zeros((4, 4))] * 2, SQRT, E_SMOKE, h)
    assert rep.lhs == 0 and rep.rhs >= 0
    with pytest.raises(ContractionRequired):
        check_sums([np.eye(4)] * 2, [half] * 2, [x] * 2, SQRT, E_SMOKE, h, contraction=True)
    with pytest.raises(ShapeMismatch):
        check_sums([half], [half, half], [x], SQRT, E_SMOKE, h)


@settings(max_examples=15)
@given(seeds, st.integers(1, 5), st.floats(0.2, 5), st.sampled_from([1.0, 1.5, 2.0, 3.0]),
       st.floats(1.001, 2), st.booleans())
def test_product_scaling_covariance(seed, n, s, r, q, contraction):
    """Scaling X by s scales both sides by s^r when alpha = 1/p."""
    q = max(q, 2 / r)
    rng = np.random.default_rng(seed)
    exps = ExponentSet.from_q(r, q)
    pair = power_pair(1 / exps.p)
    scale = (lambda m: m / (operator_norm(m) + 1e-12)) if contraction else (lambda m: m)
    a, b, x = scale(ginibre(rng, n)), scale(ginibre(rng, n)), ginibre(rng, n)
    h = TruncatedHardy(n)
    base = check_product(a, b, x, pair, exps, h, FAST, contraction=contraction)
    big = check_product(a, b, s * x, pair, exps, h, FAST, contraction=contraction)
    assert big.rhs == pytest.approx(s**r * base.rhs, rel=1e-8)
    assert big.lhs == pytest.approx(s**r * base.lhs, rel=1e-8)


# -- Euclidean -----------------------------------------------------------------------------


@pytest.mark.parametrize("mode", ["certified", "tight"])
def test_euclid_offdiag_examples(mode):
    eye = np.eye(4)
    equality(check_euclid_offdiag([eye], [eye], SQRT, 1, H4x2, mode=mode))
    z = np.zeros((4, 4))
    equality(check_euclid_offdiag([z, z], [z, z], SQRT, 2, H4x2, mode=mode))


def test_euclid_offdiag_random():
    rng = np.random.default_rng(5)
    s = DirectSumSpace((TruncatedHardy(3), TruncatedBergman(3)))
    xs = [ginibre(rng, 3) for _ in range(3)]
    ys = [ginibre(rng, 3) for _ in range(3)]
    assert check_euclid_offdiag(xs, ys, power_pair(0.3), 2, s, FAST).passed
    with pytest.raises(BadExponent):
        check_euclid_offdiag(xs, ys, SQRT, 0.5, s)
    with pytest.raises(ShapeMismatch):
        check_euclid_offdiag(xs, ys[:2], SQRT, 2, s)


@settings(max_examples=8)
@given(seeds, st.sampled_from(["sqrt", "power:0.75", "log1p"]))
def test_euclid_offdiag_n1_reduction(seed, pair):
    rng = np.random.default_rng(seed)
    s = DirectSumSpace((TruncatedHardy(3), TruncatedHardy(3)))
    x, y = ginibre(rng, 3), ginibre(rng, 3)
    e = check_euclid_offdiag([x], [y], pair, 1, s, FAST)
    o = check_offdiag_fg(x, y, pair, 1, s, FAST)
    assert e.lhs == pytest.approx(o.lhs, abs=1e-10) and e.rhs == pytest.approx(o.rhs, abs=1e-10)


@pytest.mark.parametrize("mode", ["certified", "tight"])
def test_euclid_blocks_examples(mode):
    equality(check_euclid_blocks([diag_blocks([np.eye(4)] * 2, H4x2)], 1, mode=mode))
    equality(check_euclid_blocks([off_diag(np.eye(4), np.eye(4), H4x2)], 1, mode=mode))


def test_euclid_blocks_random_and_reduction():
    rng = np.random.default_rng(9)
    s = DirectSumSpace((TruncatedHardy(2), TruncatedBergman(3)))
    dims = s.dims
    ts = [assemble([[ginibre(rng, a, b) for b in dims] for a in dims], s) for _ in range(2)]
    assert check_euclid_blocks(ts, 3, FAST).passed
    one = check_euclid_blocks(ts[:1], 1, FAST)
    bound = check_two_by_two(ts[0], FAST).children[0]
    assert one.lhs == pytest.approx(bound.lhs, abs=1e-10) and one.rhs == pytest.approx(bound.rhs, abs=1e-10)
    other = DirectSumSpace((TruncatedHardy(2), TruncatedHardy(3)))
    with pytest.raises(ShapeMismatch):
        check_euclid_blocks([ts[0], diag_blocks([np.eye(2), np.eye(3)], other)], 1)


# -- basic facts -----------------------------------------------------------------------------------


def test_basic_order_examples():
    rep = check_basic_order(karaev_operator(64), TruncatedHardy(64))
    assert rep.passed
    ber_w, w_norm, _ = rep.children
    assert ber_w.lhs == pytest.approx(0.25, abs=5e-3) and ber_w.rhs == pytest.approx(1, abs=1e-9)
    assert w_norm.rhs == pytest.approx(1, abs=1e-12)
    rep = check_basic_order(np.eye(3), TruncatedBergman(3))
    for c in rep.children:
        equality(c, 1e-9)
    assert check_basic_order(ginibre(np.random.default_rng(1), 5), TruncatedHardy(5), FAST).passed


def test_embed_monotone_examples():
    rep = check_embed_monotone(np.eye(4), np.eye(4), H4, H4)
    ber = rep.children[0]
    assert ber.lhs == pytest.approx(0.8, abs=1e-9) and ber.rhs == pytest.approx(1)
    assert rep.passed
    z = np.zeros((4, 4))
    equality(check_embed_monotone(z, z, H4, H4))
    h = TruncatedHardy(8)
    assert check_embed_monotone(karaev_operator(8), np.eye(8), h, TruncatedBergman(3), FAST).passed
    with pytest.raises(ShapeMismatch):
        check_embed_monotone(np.eye(3), z, H4, H4)


# -- cross-mode invariants -------------------------------------------------------------------------


@settings(max_examples=6)
@given(seeds)
def test_certified_never_weaker(seed):
    rng = np.random.default_rng(seed)
    s = DirectSumSpace((TruncatedHardy(3), TruncatedBergman(2)))
    dims = s.dims
    t = assemble([[ginibre(rng, a, b) for b in dims] for a in dims], s)
    eq = DirectSumSpace((TruncatedHardy(3), TruncatedHardy(3)))
    x, y = ginibre(rng, 3), ginibre(rng, 3)
    cases = [
        lambda mode: check_block_bound(t, FAST, mode=mode),
        lambda mode: check_two_by_two(t, FAST, mode=mode).children[0],
        lambda mode: check_offdiag_fg(x, y, SQRT, 1.5, eq, FAST, mode=mode),
        lambda mode: check_euclid_blocks([t], 2, FAST, mode=mode),
        lambda mode: check_product(x, y, x @ y, SQRT, E_SMOKE, TruncatedHardy(3), FAST, mode=mode),
    ]
    for run in cases:
        cert, tight = run("certified"), run("tight")
        assert cert.rhs >= tight.rhs - 1e-9
        for rep in (cert, tight):
            assert rep.passed == (rep.slack >= -rep.tol)


def test_bad_mode():
    with pytest.raises(ValueError):
        check_offdiag_fg(np.eye(4), np.eye(4), SQRT, 1, H4x2, mode="loose")


def test_identity_helper():
    assert np.array_equal(identity(2), np.eye(2))
