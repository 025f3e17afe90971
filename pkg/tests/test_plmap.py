from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homeoforge.plmap import (
    CircleMap,
    Interval,
    PeriodizedMap,
    PLMapError,
    PLSegmentMap,
    compose,
    invert,
    is_eps_advancing,
    sup_distance,
    support_in,
    translated_compare,
)
from homeoforge.scalar import SILVER
from homeoforge.thompson import bump, f_generator, lift_rotation, nu_embed

X0, X1 = f_generator(0), f_generator(1)
F_GENS = [X0, X1, X0.inverse(), X1.inverse()]


def random_f(rng: random.Random, length: int) -> PLSegmentMap:
    out = PLSegmentMap.identity(0, 1)
    for _ in range(length):
        out = out.then(rng.choice(F_GENS))
    return out


def random_periodized(rng: random.Random, c, length: int) -> PeriodizedMap:
    gens = [nu_embed(X0, c), nu_embed(X1, c), lift_rotation(c, Fraction(1, 2)),
            PeriodizedMap.translation(Fraction(1, 3), c)]
    gens += [g.inverse() for g in gens]
    out = PeriodizedMap.identity(c)
    for _ in range(length):
        out = out.then(rng.choice(gens))
    return out


seeds = st.integers(0, 10 ** 6)


# segment maps ----------------------------------------------------------------

def test_x0_value():
    assert X0(Fraction(1, 2)) == Fraction(1, 4)


def test_identity_evaluates_to_itself():
    e = PLSegmentMap.identity(-3, 3)
    assert e(Fraction(7, 5)) == Fraction(7, 5)
    assert e(SILVER - 1) == SILVER - 1


def test_out_of_domain_rejected():
    with pytest.raises(PLMapError):
        X0(Fraction(3, 2))


def test_nonmonotone_and_degenerate_rejected():
    with pytest.raises(PLMapError):
        PLSegmentMap([(0, 0), (Fraction(1, 2), Fraction(3, 4)), (1, Fraction(1, 2))])
    with pytest.raises(PLMapError):
        PLSegmentMap([(0, 0), (0, 1)])


def test_collinear_breakpoints_merged():
    m = PLSegmentMap([(0, 0), (Fraction(1, 2), Fraction(1, 2)), (1, 1)])
    assert len(m.breaks) == 2
    assert m == PLSegmentMap.identity(0, 1)


def test_square_of_x0_matches_pointwise():
    sq = compose(X0, X0)
    assert len(sq.breaks) <= 2 * len(X0.breaks) - 1
    for k in range(101):
        x = Fraction(k, 100)
        assert sq(x) == X0(X0(x))


@given(seeds)
def test_segment_group_laws(seed):
    rng = random.Random(seed)
    f, g, h = (random_f(rng, rng.randint(0, 6)) for _ in range(3))
    assert f.then(g).then(h) == f.then(g.then(h))
    assert f.then(f.inverse()).is_identity()
    assert invert(invert(f)) == f


@given(seeds)
def test_composition_never_leaves_collinear_breaks(seed):
    rng = random.Random(seed)
    m = random_f(rng, 8)
    for (x0, y0), (x1, y1), (x2, y2) in zip(m.breaks, m.breaks[1:], m.breaks[2:]):
        assert (y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0)


@given(seeds)
def test_preimage_inverts_evaluation(seed):
    rng = random.Random(seed)
    m = random_f(rng, 5)
    x = Fraction(rng.randint(0, 64), 64)
    assert m.preimage(m(x)) == x


# periodized and circle maps -----------------------------------------------------

def test_translation_by_lambda():
    t = PeriodizedMap.translation(SILVER, SILVER)
    assert t(0) == SILVER
    assert compose(PeriodizedMap.translation(Fraction(1, 3)), PeriodizedMap.translation(Fraction(1, 4))) \
        == PeriodizedMap.translation(Fraction(7, 12))


@pytest.mark.parametrize("c", [Fraction(1), SILVER])
def test_periodized_group_laws(c):
    rng = random.Random(3)
    for _ in range(25):
        f, g, h = (random_periodized(rng, c, rng.randint(0, 5)) for _ in range(3))
        assert f.then(g).then(h) == f.then(g.then(h))
        assert f.then(f.inverse()).is_identity()


@given(seeds)
def test_periodized_commutes_with_period(seed):
    rng = random.Random(seed)
    c = rng.choice([Fraction(1), SILVER])
    f = random_periodized(rng, c, 4)
    x = Fraction(rng.randint(-200, 200), 37)
    for n in (-2, 1, 3):
        assert f(x + n * c) == f(x) + n * c


def test_period_mismatch_rejected():
    with pytest.raises(PLMapError):
        PeriodizedMap.identity(1).then(PeriodizedMap.identity(SILVER))


def test_circle_map_canonical_lift():
    r = CircleMap.rotation(Fraction(3, 2))
    assert r.lift(0) == Fraction(1, 2)
    assert r.then(r).is_identity()
    assert CircleMap(PeriodizedMap.translation(Fraction(5))).is_identity()


# supports --------------------------------------------------------------------

def test_support_of_identity_is_empty():
    assert support_in(PLSegmentMap.identity(0, 1), (0, 1)) == []


def test_support_of_x0():
    assert support_in(X0, (0, 1)) == [Interval.open(0, 1)]


def test_support_of_bump():
    b = bump(Fraction(1, 4), Fraction(1, 2))
    assert support_in(b, (0, 1)) == [Interval.open(Fraction(1, 4), Fraction(1, 2))]


def test_support_finds_interior_fixed_points():
    # crosses the diagonal at 1/2 inside a linear piece
    m = PLSegmentMap([(0, 0), (Fraction(1, 4), Fraction(1, 8)), (Fraction(3, 4), Fraction(7, 8)), (1, 1)])
    assert support_in(m, (0, 1)) == [Interval.open(0, Fraction(1, 2)), Interval.open(Fraction(1, 2), 1)]


@given(seeds)
def test_support_intervals_are_maximal_and_moved(seed):
    rng = random.Random(seed)
    m = random_f(rng, rng.randint(1, 6))
    parts = support_in(m, (0, 1))
    for S in parts:
        assert m(S.mid) != S.mid
        assert m(S.lo) == S.lo and m(S.hi) == S.hi
    # outside the support everything is fixed
    for k in range(65):
        x = Fraction(k, 64)
        if not any(x in S for S in parts):
            assert m(x) == x


# distances --------------------------------------------------------------------

def brute_sup(f, g, lo, hi):
    xs = {x for x, _ in f.restrict(lo, hi).breaks} | {x for x, _ in g.restrict(lo, hi).breaks}
    return max(abs(f(x) - g(x)) for x in xs)


def test_sup_distance_examples():
    e = PLSegmentMap.identity(0, 1)
    assert sup_distance(X0, X0, (0, 1))[0] == 0
    assert sup_distance(X0, e, (0, 1)) == (Fraction(1, 4), Fraction(1, 2))
    d = Fraction(3, 16)
    assert sup_distance(PLSegmentMap.translation(0, 1, d), e, (0, 1))[0] == d


@given(seeds)
def test_sup_distance_matches_breakpoint_oracle(seed):
    rng = random.Random(seed)
    f, g = random_f(rng, 5), random_f(rng, 5)
    val, wit = sup_distance(f, g, (0, 1))
    assert val == brute_sup(f, g, 0, 1)
    assert abs(f(wit) - g(wit)) == val
    # no dyadic sample point beats it
    for k in range(129):
        x = Fraction(k, 128)
        assert abs(f(x) - g(x)) <= val


def test_translated_compare_period_one_vanishes():
    f = nu_embed(X0).then(lift_rotation(1, Fraction(1, 2)))
    for m in range(-3, 4):
        assert translated_compare(f, (0, 1), (m, m + 1)) == 0


def test_translated_compare_mixed_scales_positive():
    from homeoforge.gline import GLambdaContext, WordMap
    from homeoforge.word import Word

    ctx = GLambdaContext()
    g = WordMap(Word.parse("x0 x0lam"), ctx)
    assert translated_compare(g, (0, 1), (0, 1)) == 0
    assert translated_compare(g, (0, 1), (1, 2)) > 0


def test_translated_compare_length_mismatch():
    with pytest.raises(PLMapError):
        translated_compare(nu_embed(X0), (0, 1), (0, 2))


def test_eps_advancing():
    e = PLSegmentMap.identity(0, 1)
    assert is_eps_advancing(e, (0, 1), Fraction(1, 100)) == (True, None)
    eps = Fraction(1, 16)
    ok, wit = is_eps_advancing(PeriodizedMap.translation(-2 * eps), (0, 1), eps)
    assert not ok and wit is not None
    ok, wit = is_eps_advancing(X0, (0, 1), Fraction(1, 4))
    assert ok
    ok, wit = is_eps_advancing(X0, (0, 1), Fraction(1, 5))
    assert not ok and X0(wit) - wit < -Fraction(1, 5)
