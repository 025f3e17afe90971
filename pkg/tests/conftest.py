from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import settings

from homeoforge.scalar import quad

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def rand_fraction(rng: random.Random, num=50, den=16) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_quad(rng: random.Random, num=50, den=16):
    return quad(rand_fraction(rng, num, den), rand_fraction(rng, num, den))


@pytest.fixture
def rng():
    return random.Random(20261016)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
