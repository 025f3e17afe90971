from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homeoforge.plmap import CircleMap, PeriodizedMap, PLMapError, PLSegmentMap, support_in
from homeoforge.scalar import SILVER
from homeoforge.thompson import (
    bump,
    center_element,
    dyadic_transport,
    f_generator,
    f_transport,
    is_dyadic,
    lift,
    lift_rotation,
    nu_embed,
    t_generator_rotation,
    validate_thompson,
)

X0, X1 = f_generator(0), f_generator(1)
inv = PLSegmentMap.inverse


def functional(*maps):
    """Product read as composition: functional(a, b) = a o b (b applied first)."""
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = out.then(m)
    return out


def right(*maps):
    """Product under the right action: apply maps left to right."""
    out = maps[0]
    for m in maps[1:]:
        out = out.then(m)
    return out


def comm(prod, a, b):
    return prod(a, b, a.inverse(), b.inverse())


def random_f(rng, length):
    gens = [X0, X1, inv(X0), inv(X1)]
    out = PLSegmentMap.identity(0, 1)
    for _ in range(length):
        out = out.then(rng.choice(gens))
    return out


def random_t(rng, length, c=Fraction(1)):
    gens = [CircleMap(nu_embed(X0, c)), CircleMap(nu_embed(X1, c)),
            t_generator_rotation(c, Fraction(1, 2)), t_generator_rotation(c, Fraction(1, 8))]
    gens += [g.inverse() for g in gens]
    out = CircleMap.identity(c)
    for _ in range(length):
        out = out.then(rng.choice(gens))
    return out


seeds = st.integers(0, 10 ** 6)


# generators and relations ----------------------------------------------------

def test_generator_values():
    assert X0(Fraction(1, 2)) == Fraction(1, 4)
    assert X1(Fraction(1, 4)) == Fraction(1, 4)
    assert X1(Fraction(3, 4)) == Fraction(5, 8)


def test_x1_is_x0_on_right_half():
    assert X1.restrict(Fraction(1, 2), 1) == X0.rescale(Fraction(1, 2), 1)


def test_f_relations_in_functional_reading():
    a = functional(X0, inv(X1))
    assert comm(functional, a, functional(inv(X0), X1, X0)).is_identity()
    assert comm(functional, a, functional(inv(X0), inv(X0), X1, X0, X0)).is_identity()


def test_right_action_reads_words_backwards():
    rng = random.Random(5)
    gens = [X0, X1, inv(X0), inv(X1)]
    for _ in range(20):
        w = [rng.choice(gens) for _ in range(rng.randint(1, 7))]
        assert right(*w) == functional(*reversed(w))


def test_f_relation_fails_in_right_reading_without_reversal():
    a = right(X0, inv(X1))
    assert not comm(right, a, right(inv(X0), X1, X0)).is_identity()
    # the reversed words satisfy it
    a = right(inv(X1), X0)
    b = right(X0, X1, inv(X0))
    assert right(b.inverse(), a.inverse(), b, a).is_identity()


def test_x0_x1_do_not_commute():
    assert not comm(right, X0, X1).is_identity()


# validity -------------------------------------------------------------------

def test_validate_generators():
    assert validate_thompson(X0)
    assert validate_thompson(X1)


def test_validate_rejects_slope_three():
    m = PLSegmentMap([(0, 0), (Fraction(1, 4), Fraction(3, 4)), (1, 1)])
    res = validate_thompson(m)
    assert not res and res.kind == "slope"


def test_validate_rejects_triadic_breakpoint():
    # slopes 1/2, 2, 1/2 are fine; the breakpoints at 1/3 and 2/3 are not dyadic
    third = Fraction(1, 3)
    m = PLSegmentMap([(0, 0), (third, third / 2), (2 * third, Fraction(5, 6)), (1, 1)])
    res = validate_thompson(m)
    assert not res and res.kind == "breakpoint"
    assert res.where[0] == third


@given(seeds)
def test_products_stay_in_f(seed):
    rng = random.Random(seed)
    assert validate_thompson(random_f(rng, rng.randint(0, 10)))


@given(seeds, st.sampled_from([Fraction(1), SILVER]))
def test_products_stay_in_t(seed, c):
    rng = random.Random(seed)
    assert validate_thompson(random_t(rng, rng.randint(0, 8), c), c)


def test_dyadic_predicate():
    assert is_dyadic(Fraction(3, 8)) and not is_dyadic(Fraction(1, 3)) and not is_dyadic(SILVER)


# rotations and lifts ---------------------------------------------------------

def test_rotation_zero_is_identity():
    assert t_generator_rotation(1, 0).is_identity()


def test_half_rotation():
    r = t_generator_rotation(1, Fraction(1, 2))
    assert lift(r)(0) == Fraction(1, 2)
    assert r.then(r).is_identity()
    # rigid rotation: displacement constant, so translation number 1/2
    assert all(lift(r)(Fraction(k, 7)) - Fraction(k, 7) == Fraction(1, 2) for k in range(7))


def test_rotation_needs_dyadic():
    with pytest.raises(ValueError):
        t_generator_rotation(1, Fraction(1, 3))


def test_lift_of_identity():
    assert lift(CircleMap.identity()).is_identity()


def test_lift_homomorphism_up_to_center():
    rng = random.Random(11)
    for _ in range(20):
        m = random_t(rng, 5)
        prod = lift(m).then(lift(m.inverse()))
        shift = prod(Fraction(0))
        assert shift in (-1, 0, 1)
        assert prod.then(center_element(1, -int(shift))).is_identity()


# nu and centers --------------------------------------------------------------

def test_nu_fixes_integers():
    v = nu_embed(X0)
    assert all(v(Fraction(n)) == n for n in range(-4, 5))
    assert v(Fraction(5, 2)) == Fraction(9, 4)


def test_nu_needs_endpoints_fixed():
    with pytest.raises(PLMapError):
        nu_embed(PLSegmentMap.translation(0, 1, Fraction(1, 2)))


@given(seeds)
def test_nu_is_homomorphism(seed):
    rng = random.Random(seed)
    f, g = random_f(rng, 4), random_f(rng, 4)
    for c in (Fraction(1), SILVER):
        assert nu_embed(f.then(g), c) == nu_embed(f, c).then(nu_embed(g, c))


@given(seeds)
def test_nu_is_injective_on_samples(seed):
    rng = random.Random(seed)
    f, g = random_f(rng, 4), random_f(rng, 4)
    assert (nu_embed(f) == nu_embed(g)) == (f == g)


def test_center_elements():
    z = center_element(SILVER, 2)
    assert z(0) == 2 * SILVER
    v = nu_embed(X1, SILVER)
    assert z.then(v) == v.then(z)


# bumps and transport ---------------------------------------------------------

def test_bump_support_and_validity():
    b = bump(Fraction(3, 8), Fraction(5, 8), power=-2, base=1)
    assert validate_thompson(b)
    parts = support_in(b, (0, 1))
    assert parts[0].lo >= Fraction(3, 8) and parts[-1].hi <= Fraction(5, 8)


def test_dyadic_transport_endpoints():
    t = dyadic_transport(0, Fraction(1, 2), Fraction(1, 8), Fraction(3, 4))
    assert t(0) == Fraction(1, 8) and t(Fraction(1, 2)) == Fraction(3, 4)
    assert validate_thompson(t)


@given(st.lists(st.integers(1, 63), min_size=2, max_size=4, unique=True),
       st.lists(st.integers(1, 63), min_size=2, max_size=4, unique=True))
def test_f_transport_is_in_f_and_hits_targets(a, b):
    n = min(len(a), len(b))
    src = [Fraction(k, 64) for k in sorted(a)[:n]]
    dst = [Fraction(k, 64) for k in sorted(b)[:n]]
    g = f_transport(src, dst)
    assert validate_thompson(g)
    assert [g(s) for s in src] == dst
