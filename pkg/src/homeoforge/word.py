"""Group words over a registry of generator maps.

Elements of the groups built here are never materialized globally (a product
of period-1 and period-lambda maps has no finite global description); they are
words, evaluated pointwise or restricted to compact intervals.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .plmap import CircleMap, Interval, PeriodizedMap, PLSegmentMap
from .scalar import Scalar, as_scalar, parse_scalar, period_index, to_text


class UnknownGenerator(KeyError):
    pass


class Word:
    """Freely reduced sequence of (generator id, nonzero exponent)."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[tuple[str, int]] = ()):
        out: list[tuple[str, int]] = []
        for gid, e in letters:
            if e == 0:
                continue
            if out and out[-1][0] == gid:
                e += out.pop()[1]
                if e == 0:
                    continue
            out.append((gid, e))
        self.letters = tuple(out)

    @classmethod
    def gen(cls, gid: str, e: int = 1) -> "Word":
        return cls([(gid, e)])

    @classmethod
    def parse(cls, text: str) -> "Word":
        letters = []
        for tok in text.split():
            gid, _, exp = tok.partition("^")
            letters.append((gid, int(exp) if exp else 1))
        return cls(letters)

    @classmethod
    def from_json(cls, data) -> "Word":
        if isinstance(data, str):
            return cls.parse(data)
        return cls([(d["id"], int(d["exp"])) for d in data])

    def to_json(self) -> list:
        return [{"id": g, "exp": e} for g, e in self.letters]

    def __str__(self):
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.letters))

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def steps(self) -> list[tuple[str, int]]:
        """Expansion into letters with exponent +-1."""
        return [(g, 1 if e > 0 else -1) for g, e in self.letters for _ in range(abs(e))]

    def substitute(self, table: dict[str, "Word"]) -> "Word":
        out: list[tuple[str, int]] = []
        for g, e in self.letters:
            w = table.get(g)
            if w is None:
                out.append((g, e))
            else:
                out.extend((w ** e).letters)
        return Word(out)

    def exponent_sum(self, gid: str) -> int:
        return sum(e for g, e in self.letters if g == gid)

    def ids(self) -> set[str]:
        return {g for g, _ in self.letters}


def commutator(a: Word, b: Word) -> Word:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


def conjugate(w: Word, g: Word) -> Word:
    """w^g = g^-1 w g."""
    return g.inverse() * w * g


# registry ----------------------------------------------------------------

_DYNAMIC = re.compile(r"^(?P<kind>tr|rot|rotlam):(?P<arg>.+)$")


class GeneratorRegistry:
    """id -> map table.  Periodized maps act on R, circle maps on R/cZ.

    Ids of the form ``tr:<scalar>`` (translation), ``rot:<dyadic>`` and
    ``rotlam:<dyadic>`` (lifted rotations at scale 1 / lambda) resolve on demand.
    """

    def __init__(self, lam: Scalar | None = None):
        self._maps: dict[str, PeriodizedMap | CircleMap] = {}
        self._inv: dict[str, PeriodizedMap | CircleMap] = {}
        self._frozen = False
        self.lam = lam

    def register(self, gid: str, m, *, replace: bool = False) -> str:
        if self._frozen:
            raise RuntimeError("registry is frozen")
        if not isinstance(m, (PeriodizedMap, CircleMap)):
            raise TypeError("generators must be periodized or circle maps")
        if gid in self._maps and not replace:
            if self._maps[gid] == m:
                return gid
            raise ValueError(f"generator id {gid!r} already registered")
        self._maps[gid] = m
        self._inv.pop(gid, None)
        return gid

    def freeze(self) -> "GeneratorRegistry":
        self._frozen = True
        return self

    def child(self) -> "GeneratorRegistry":
        """An unfrozen copy sharing the generator table contents."""
        r = GeneratorRegistry(self.lam)
        r._maps = dict(self._maps)
        r._inv = dict(self._inv)
        return r

    def __contains__(self, gid):
        return gid in self._maps or _DYNAMIC.match(gid) is not None

    def ids(self) -> list[str]:
        return list(self._maps)

    def _dynamic(self, gid: str):
        m = _DYNAMIC.match(gid)
        if m is None:
            raise UnknownGenerator(gid)
        kind, arg = m.group("kind"), parse_scalar(m.group("arg"))
        if kind == "tr":
            return PeriodizedMap.translation(arg)
        from .thompson import lift_rotation
        if kind == "rot":
            return lift_rotation(1, arg)
        if self.lam is None:
            raise UnknownGenerator(f"{gid} needs lambda")
        return lift_rotation(self.lam, arg)

    def get(self, gid: str, sign: int = 1):
        m = self._maps.get(gid)
        if m is None:
            m = self._dynamic(gid)
            if not self._frozen:
                self._maps[gid] = m
        if sign > 0:
            return m
        inv = self._inv.get(gid)
        if inv is None:
            inv = m.inverse()
            self._inv[gid] = inv
        return inv

    def period(self, gid: str) -> Scalar:
        m = self.get(gid)
        return m.circumference if isinstance(m, CircleMap) else m.period


def translation_id(t) -> str:
    return f"tr:{to_text(as_scalar(t))}"


# evaluation ---------------------------------------------------------------

def _lift_of(m):
    return m.lift if isinstance(m, CircleMap) else m


def evaluate_word(w: Word, x, registry: GeneratorRegistry) -> Scalar:
    """x . w, applying letters left to right.

    Circle generators act through their canonical lifts; reduce the result
    modulo the circumference for the circle point.
    """
    x = as_scalar(x)
    for g, e in w.letters:
        m = _lift_of(registry.get(g, 1 if e > 0 else -1))
        for _ in range(abs(e)):
            x = m(x)
    return x


def evaluate_on_circle(w: Word, x, registry: GeneratorRegistry, c=Fraction(1)) -> Scalar:
    y = evaluate_word(w, x, registry)
    return y - period_index(y, c) * c


def restrict_word(w: Word, I, registry: GeneratorRegistry) -> PLSegmentMap:
    """The exact PL map equal to w on the compact interval I."""
    if isinstance(I, Interval):
        lo, hi = I.lo, I.hi
    else:
        lo, hi = (as_scalar(t) for t in I)
    seg = PLSegmentMap.identity(lo, hi)
    for g, e in w.letters:
        m = _lift_of(registry.get(g, 1 if e > 0 else -1))
        for _ in range(abs(e)):
            seg = seg.then(m.restrict(seg.image_lo, seg.image_hi))
    return seg


def word_identity_on(w: Word, I, registry: GeneratorRegistry) -> bool:
    return restrict_word(w, I, registry).is_identity()


def materialize(w: Word, registry: GeneratorRegistry):
    """Global map of a word whose letters all share one period (or circle)."""
    result = None
    for g, e in w.letters:
        m = registry.get(g, 1 if e > 0 else -1)
        for _ in range(abs(e)):
            result = m if result is None else result.then(m)
    if result is None:
        raise ValueError("materialize needs a nonempty word or use an explicit identity")
    return result


def lipschitz_bound(w: Word, registry: GeneratorRegistry) -> Scalar:
    bound = Fraction(1)
    for g, e in w.letters:
        m = _lift_of(registry.get(g, 1 if e > 0 else -1))
        bound = bound * m.max_slope() ** abs(e)
    return bound


def parse_word_file(text: str) -> Word:
    text = text.strip()
    if text.startswith("["):
        return Word.from_json(json.loads(text))
    return Word.parse(text)
