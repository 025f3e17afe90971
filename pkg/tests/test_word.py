from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homeoforge.gline import glambda_registry
from homeoforge.plmap import PeriodizedMap
from homeoforge.scalar import SILVER
from homeoforge.thompson import bump, nu_embed
from homeoforge.word import (
    GeneratorRegistry,
    UnknownGenerator,
    Word,
    commutator,
    conjugate,
    evaluate_on_circle,
    evaluate_word,
    lipschitz_bound,
    materialize,
    parse_word_file,
    restrict_word,
    translation_id,
    word_identity_on,
)

REG = glambda_registry(SILVER)
LETTERS = ["x0", "x1", "rot", "x0lam", "x1lam", "rotlam", "c1", "clam"]


def random_word(rng: random.Random, length: int) -> Word:
    return Word((rng.choice(LETTERS), rng.choice((1, -1))) for _ in range(length))


def sample_points(rng: random.Random, lo, hi, count):
    pts = [lo, hi]
    for _ in range(count - 2):
        pts.append(lo + (hi - lo) * Fraction(rng.randint(0, 997), 997))
    return pts


seeds = st.integers(0, 10 ** 6)


# syntax -------------------------------------------------------------------

def test_free_reduction():
    assert Word.parse("x0 x0^-1") == Word()
    assert Word.parse("x0 x0 x1 x1^-1 x0^-2") == Word()
    assert Word.parse("x0^2 x0^3").letters == (("x0", 5),)


def test_parse_and_json_round_trip():
    w = Word.parse("x0 clam^-2 rot x1lam^3")
    assert Word.parse(str(w)) == w
    assert Word.from_json(w.to_json()) == w
    assert parse_word_file('[{"id": "x0", "exp": -1}]') == Word.gen("x0", -1)
    assert parse_word_file("x0 x1\n") == Word.parse("x0 x1")


def test_inverse_and_powers():
    w = Word.parse("x0 x1^-1 rot")
    assert (w * w.inverse()) == Word()
    assert w ** 0 == Word()
    assert w ** -2 == w.inverse() * w.inverse()


def test_commutator_and_conjugate_conventions():
    a, b = Word.parse("x0"), Word.parse("x1lam")
    assert commutator(a, a) == Word()
    assert conjugate(a, Word()) == a
    assert commutator(a, b) == Word.parse("x0 x1lam x0^-1 x1lam^-1")
    assert conjugate(a, b) == Word.parse("x1lam^-1 x0 x1lam")


def test_substitute_and_exponent_sum():
    w = Word.parse("a b^-1 a^2")
    out = w.substitute({"a": Word.parse("x0 x1"), "b": Word.parse("rot")})
    assert out == Word.parse("x0 x1 rot^-1 x0 x1 x0 x1")
    assert w.exponent_sum("a") == 3 and w.exponent_sum("b") == -1


# evaluation ---------------------------------------------------------------

def test_empty_word_is_identity():
    assert evaluate_word(Word(), SILVER, REG) == SILVER


def test_two_step_evaluation():
    w = Word.parse("x0 clam")
    x = Fraction(1, 2)
    assert evaluate_word(w, x, REG) == Fraction(1, 4) + SILVER
    assert evaluate_word(Word.parse("clam x0"), 0, REG) == nu_embed(REG.get("x0").fundamental)(SILVER)


def test_commutator_stepwise():
    rng = random.Random(2)
    for _ in range(20):
        a, b = random_word(rng, 3), random_word(rng, 3)
        x = Fraction(rng.randint(-50, 50), 13)
        y = x
        for part in (a, b, a.inverse(), b.inverse()):
            y = evaluate_word(part, y, REG)
        assert evaluate_word(commutator(a, b), x, REG) == y


def test_dynamic_generators():
    assert evaluate_word(Word.gen(translation_id(Fraction(3, 7))), 1, REG) == Fraction(10, 7)
    assert evaluate_word(Word.gen("rot:1/4"), 0, REG) == Fraction(1, 4)
    assert evaluate_word(Word.gen("rotlam:1/2"), 0, REG) == SILVER / 2
    with pytest.raises(UnknownGenerator):
        evaluate_word(Word.gen("nope"), 0, REG)
    with pytest.raises(UnknownGenerator):
        evaluate_word(Word.gen("rotlam:1/2"), 0, GeneratorRegistry())


def test_registry_rejects_conflicting_ids_and_freezes():
    reg = GeneratorRegistry()
    reg.register("a", PeriodizedMap.translation(1))
    reg.register("a", PeriodizedMap.translation(1))  # same map: fine
    with pytest.raises(ValueError):
        reg.register("a", PeriodizedMap.translation(2))
    reg.freeze()
    with pytest.raises(RuntimeError):
        reg.register("b", PeriodizedMap.translation(2))


def test_circle_evaluation_reduces():
    assert evaluate_on_circle(Word.parse("c1 c1 rot"), Fraction(1, 4), REG) == Fraction(3, 4)


@given(seeds)
def test_free_reduction_preserves_values(seed):
    rng = random.Random(seed)
    letters = [(rng.choice(LETTERS), rng.choice((1, -1))) for _ in range(8)]
    x = Fraction(rng.randint(-40, 40), 9)
    y = x
    for g, e in letters:  # unreduced evaluation, letter by letter
        y = evaluate_word(Word.gen(g, e), y, REG)
    assert evaluate_word(Word(letters), x, REG) == y


# restriction --------------------------------------------------------------

def test_restrict_empty_and_cancelling():
    assert restrict_word(Word(), (-2, 3), REG).is_identity()
    assert restrict_word(Word.parse("x0lam x0lam^-1"), (-2, 3), REG).is_identity()


@given(seeds)
def test_restrict_agrees_with_evaluation(seed):
    rng = random.Random(seed)
    w = random_word(rng, rng.randint(1, 6))
    lo = Fraction(rng.randint(-30, 0), 7)
    hi = lo + Fraction(rng.randint(1, 30), 7)
    seg = restrict_word(w, (lo, hi), REG)
    for x in sample_points(rng, lo, hi, 50):
        assert seg(x) == evaluate_word(w, x, REG)


@given(seeds)
def test_restricted_inverse_cancels(seed):
    rng = random.Random(seed)
    w = random_word(rng, rng.randint(1, 6))
    seg = restrict_word(w, (-1, 2), REG)
    back = restrict_word(w.inverse(), (seg.image_lo, seg.image_hi), REG)
    assert seg.then(back).is_identity()


def test_identity_on_window():
    reg = REG.child()
    reg.register("b1", nu_embed(bump(Fraction(1, 8), Fraction(1, 4))))
    reg.register("b2", nu_embed(bump(Fraction(1, 2), Fraction(3, 4), base=1)))
    assert word_identity_on(commutator(Word.gen("b1"), Word.gen("b2")), (-3, 3), reg)
    assert not word_identity_on(Word.gen("b1"), (0, 1), reg)


# lipschitz ----------------------------------------------------------------

def test_lipschitz_examples():
    assert lipschitz_bound(Word(), REG) == 1
    assert lipschitz_bound(Word.gen("x0"), REG) == 2


@given(seeds)
def test_lipschitz_bounds_difference_quotients(seed):
    rng = random.Random(seed)
    w = random_word(rng, rng.randint(1, 5))
    L = lipschitz_bound(w, REG)
    for _ in range(100):
        x = Fraction(rng.randint(-300, 300), 64)
        y = x + Fraction(rng.randint(1, 64), 64)
        assert evaluate_word(w, y, REG) - evaluate_word(w, x, REG) <= L * (y - x)


def test_materialize_single_period():
    m = materialize(Word.parse("x0 rot x1^-1"), REG)
    assert m(Fraction(1, 3)) == evaluate_word(Word.parse("x0 rot x1^-1"), Fraction(1, 3), REG)
    with pytest.raises(ValueError):
        materialize(Word(), REG)
