from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from homeoforge.scalar import (
    SILVER,
    SQRT2,
    DivisionByZero,
    QuadScalar,
    compare,
    continued_fraction,
    convergents,
    floor,
    parse_scalar,
    period_index,
    quad,
    sign,
    to_text,
)

from conftest import rand_quad

fractions = st.fractions(max_denominator=64).filter(lambda f: abs(f) < 1000)
scalars = st.builds(quad, fractions, fractions)


def interval_value(x) -> mpmath.iv.mpf:
    """Independent oracle: evaluate a + b sqrt d with outward-rounded intervals."""
    if isinstance(x, QuadScalar):
        a = mpmath.iv.mpf(x.a.numerator) / x.a.denominator
        b = mpmath.iv.mpf(x.b.numerator) / x.b.denominator
        return a + b * mpmath.iv.sqrt(x.d)
    return mpmath.iv.mpf(x.numerator) / x.denominator


# field operations ---------------------------------------------------------------

def test_conjugate_product_is_one():
    assert quad(1, 1) * quad(-1, 1) == 1
    assert isinstance(quad(1, 1) * quad(-1, 1), Fraction)


def test_silver_square():
    assert SILVER * SILVER == quad(3, 2)


def test_additive_identity():
    assert SILVER + 0 == SILVER


def test_division_by_zero_is_explicit():
    with pytest.raises(DivisionByZero):
        SILVER / (SQRT2 - SQRT2)
    with pytest.raises(ZeroDivisionError):
        SILVER / 0


def test_field_mismatch_rejected():
    with pytest.raises(ValueError):
        quad(1, 1, 2) + quad(1, 1, 3)


def test_non_squarefree_rejected():
    with pytest.raises(ValueError):
        quad(1, 1, 4)


@given(scalars, scalars, scalars)
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    if x != 0:
        assert x * (1 / x) == 1


@given(scalars)
def test_canonical_form_is_unique(x):
    # re-normalizing through the text form changes nothing
    assert parse_scalar(to_text(x)) == x
    assert to_text(parse_scalar(to_text(x))) == to_text(x)
    assert not isinstance(x, QuadScalar) or x.b != 0


# ordering -----------------------------------------------------------------

def test_compare_examples():
    assert compare(12, 5 * SILVER) == -1
    assert compare(SILVER, SILVER) == 0
    assert compare(SILVER, 2) == 1


def test_compare_agrees_with_interval_oracle():
    rng = random.Random(7)
    mpmath.iv.dps = 60
    checked = 0
    for _ in range(10_000):
        x, y = rand_quad(rng), rand_quad(rng)
        diff = interval_value(x) - interval_value(y)
        c = compare(x, y)
        if x == y:
            assert c == 0
            continue
        if diff.a > 0:
            assert c == 1
        elif diff.b < 0:
            assert c == -1
        else:
            continue  # interval straddles zero; the oracle is silent
        checked += 1
    assert checked > 9_000


@given(scalars)
def test_sign_consistent_with_negation(x):
    assert sign(-x) == -sign(x)
    assert (sign(x) == 0) == (x == 0)


@given(scalars, scalars)
def test_order_is_total_and_antisymmetric(x, y):
    assert compare(x, y) == -compare(y, x)
    assert (x < y) + (x == y) + (x > y) == 1


# floors and periods -------------------------------------------------------

def test_period_index_examples():
    assert period_index(SILVER, Fraction(1)) == 2
    assert period_index(Fraction(0), SILVER) == 0
    assert period_index(Fraction(5), SILVER) == 2


@given(scalars, st.sampled_from([Fraction(1), Fraction(1, 3), SILVER, SQRT2 / 2]))
def test_period_index_brackets(x, c):
    n = period_index(x, c)
    assert n * c <= x < (n + 1) * c


def test_period_index_needs_positive_period():
    with pytest.raises(ValueError):
        period_index(Fraction(1), -SILVER)


@given(scalars)
def test_floor_against_interval_oracle(x):
    n = floor(x)
    mpmath.iv.dps = 40
    v = interval_value(x)
    assert n <= v.b and n + 1 > v.a


# continued fractions ----------------------------------------------------------

def test_cf_of_silver_ratio():
    cf = continued_fraction(SILVER, 4)
    assert cf.quotients == (2, 2, 2, 2)
    assert cf.convergents() == [2, Fraction(5, 2), Fraction(12, 5), Fraction(29, 12)]


def test_cf_of_sqrt2():
    assert continued_fraction(SQRT2, 3).quotients == (1, 2, 2)


def test_cf_detects_period():
    cf = continued_fraction(SQRT2, 6)
    assert cf.period_start == 1 and cf.period_length == 1


def test_cf_rejects_rationals_and_bad_depth():
    with pytest.raises(ValueError):
        continued_fraction(Fraction(3, 2), 4)
    with pytest.raises(ValueError):
        continued_fraction(SILVER, 0)


def test_convergents_bracket_lambda():
    conv = continued_fraction(SILVER, 10).convergents()
    for k, c in enumerate(conv):
        assert (c < SILVER) == (k % 2 == 0)


@pytest.mark.parametrize("lam", [SILVER, SQRT2, quad(0, 1, 3), quad(Fraction(1, 2), Fraction(1, 2), 5)])
def test_convergents_are_best_approximations(lam):
    conv = [c for c in continued_fraction(lam, 12).convergents() if c.denominator <= 50]
    for c in conv[1:]:
        p, q = c.numerator, c.denominator
        err = abs(q * lam - p)
        for q2 in range(1, q):
            p2 = floor(q2 * lam + Fraction(1, 2))
            assert err < abs(q2 * lam - p2)


def test_convergent_recurrence():
    assert convergents([1, 2, 2, 2]) == [1, Fraction(3, 2), Fraction(7, 5), Fraction(17, 12)]


# text form ----------------------------------------------------------------

@pytest.mark.parametrize("text,value", [
    ("3/4", Fraction(3, 4)),
    ("-7", Fraction(-7)),
    ("1+√2", SILVER),
    ("1+sqrt2", SILVER),
    ("-1/2-3/5√2", quad(Fraction(-1, 2), Fraction(-3, 5))),
    ("√2", SQRT2),
])
def test_parse(text, value):
    assert parse_scalar(text) == value


def test_print_forms():
    assert to_text(SILVER) == "1+1√2"
    assert to_text(Fraction(-3, 4)) == "-3/4"


@pytest.mark.parametrize("bad", ["", "abc", "1/2/3", "2√"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_scalar(bad)
