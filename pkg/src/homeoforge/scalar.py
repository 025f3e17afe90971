"""Exact scalars: rationals and elements of a real quadratic field Q(sqrt d).

Rationals are plain :class:`fractions.Fraction` values.  Irrational field
elements are :class:`QuadScalar`.  Arithmetic between the two is closed and
any result whose irrational part cancels collapses back to a ``Fraction``, so
a value is a ``Fraction`` exactly when it is rational.  This keeps the
dyadic-only computations (Thompson's groups, ring groups) on the fast path.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

DEFAULT_D = 2


class DivisionByZero(ZeroDivisionError):
    pass


class PrecisionGuardExceeded(ArithmeticError):
    pass


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True, eq=False)
class QuadScalar:
    """a + b*sqrt(d) with b != 0 (construct via :func:`quad`)."""

    a: Fraction
    b: Fraction
    d: int

    # arithmetic -----------------------------------------------------------
    def _other(self, other):
        if isinstance(other, QuadScalar):
            if other.d != self.d:
                raise ValueError(f"field mismatch: sqrt{self.d} vs sqrt{other.d}")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return quad(self.a + o[0], self.b + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return quad(self.a - o[0], self.b - o[1], self.d)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return quad(o[0] - self.a, o[1] - self.b, self.d)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        a, b = o
        return quad(self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def inverse(self):
        # 1/(a + b r) = (a - b r) / (a^2 - d b^2); the norm is nonzero for b != 0
        norm = self.a * self.a - self.d * self.b * self.b
        return quad(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o[1] == 0:
            if o[0] == 0:
                raise DivisionByZero("division by zero")
            return quad(self.a / o[0], self.b / o[0], self.d)
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        out = Fraction(1)
        for _ in range(abs(n)):
            out = base * out
        return out

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def conjugate(self):
        return QuadScalar(self.a, -self.b, self.d)

    # ordering -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def _cmp(self, other):
        if not isinstance(other, (int, Fraction, QuadScalar)):
            return None
        return sign(self - other)

    def __lt__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s < 0

    def __le__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s <= 0

    def __gt__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s > 0

    def __ge__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s >= 0

    def __float__(self):
        # only for plotting; never used by the exact kernel
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __repr__(self):
        return f"QuadScalar({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


Scalar = Union[Fraction, QuadScalar]


def quad(a, b, d: int = DEFAULT_D) -> Scalar:
    """Canonical constructor: returns a Fraction when ``b == 0``."""
    a, b = Fraction(a), Fraction(b)
    if b == 0:
        return a
    if not _squarefree(d):
        raise ValueError(f"d must be a squarefree integer > 1, got {d}")
    return QuadScalar(a, b, d)


def as_scalar(x) -> Scalar:
    if isinstance(x, (Fraction, QuadScalar)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def parts(x: Scalar) -> tuple[Fraction, Fraction, int]:
    if isinstance(x, QuadScalar):
        return x.a, x.b, x.d
    return Fraction(x), Fraction(0), DEFAULT_D


def sign(x: Scalar) -> int:
    """Exact sign of a + b*sqrt(d) from rational sign tests only."""
    if not isinstance(x, QuadScalar):
        return (x > 0) - (x < 0)
    a, b, d = x.a, x.b, x.d
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sa >= 0 and sb >= 0:
        return 1 if (sa or sb) else 0
    if sa <= 0 and sb <= 0:
        return -1
    # opposite signs: the larger magnitude wins; a^2 = b^2 d is impossible for b != 0
    if a * a > b * b * d:
        return sa
    return sb


def compare(x, y) -> int:
    """-1, 0, 1 as x <, =, > y."""
    return sign(as_scalar(x) - as_scalar(y))


def is_rational(x: Scalar) -> bool:
    return not isinstance(x, QuadScalar)


def floor(x: Scalar) -> int:
    if not isinstance(x, QuadScalar):
        return x.numerator // x.denominator
    a, b, d = x.a, x.b, x.d
    t = b * b * d
    r = isqrt(t.numerator // t.denominator)  # within 1 of |b| sqrt d
    guess = a + (r if b > 0 else -r)
    n = guess.numerator // guess.denominator
    while n > x:
        n -= 1
    while n + 1 <= x:
        n += 1
    return n


def period_index(x: Scalar, c: Scalar) -> int:
    """The integer n with n*c <= x < (n+1)*c."""
    if sign(c) <= 0:
        raise ValueError("period must be positive")
    return floor(x / c)


def reduce_mod(x: Scalar, c: Scalar) -> Scalar:
    return x - period_index(x, c) * c


# continued fractions --------------------------------------------------------

@dataclass(frozen=True)
class CFExpansion:
    quotients: tuple[int, ...]
    # index where a detected period starts (None if no period seen within depth)
    period_start: int | None = None
    period_length: int | None = None

    def convergents(self) -> list[Fraction]:
        return convergents(self.quotients)


def convergents(quotients) -> list[Fraction]:
    out = []
    p0, q0, p1, q1 = 1, 0, quotients[0], 1
    out.append(Fraction(p1, q1))
    for a in quotients[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append(Fraction(p1, q1))
    return out


def continued_fraction(lam: Scalar, depth: int) -> CFExpansion:
    if is_rational(lam):
        raise ValueError("continued_fraction expects an irrational quadratic scalar")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    x = lam
    quotients: list[int] = []
    seen: dict[Scalar, int] = {}
    period_start = period_length = None
    for i in range(depth):
        if period_start is None and x in seen:
            period_start = seen[x]
            period_length = i - seen[x]
        seen.setdefault(x, i)
        a = period_index(x, Fraction(1))
        quotients.append(a)
        x = 1 / (x - a)
    return CFExpansion(tuple(quotients), period_start, period_length)


# text syntax ----------------------------------------------------------------

_QUAD_RE = re.compile(
    r"""^\s*
    (?P<a>[+-]?\d+(?:/\d+)?)?          # rational part
    \s*
    (?:(?P<bsign>[+-])?\s*(?P<b>\d+(?:/\d+)?)?\s*\*?\s*(?:√|sqrt)\s*\(?(?P<d>\d+)\)?)?
    \s*$""",
    re.VERBOSE,
)


def parse_scalar(text: str) -> Scalar:
    """Parse ``p/q`` or ``a+b√d`` (``sqrt`` accepted for ``√``)."""
    m = _QUAD_RE.match(text)
    if not m or (m.group("a") is None and m.group("d") is None):
        raise ValueError(f"cannot parse scalar {text!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    if m.group("d") is None:
        return a
    if m.group("a") and m.group("bsign") is None:
        raise ValueError(f"cannot parse scalar {text!r}")
    b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("bsign") == "-":
        b = -b
    return quad(a, b, int(m.group("d")))


def _frac_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_text(x: Scalar) -> str:
    if not isinstance(x, QuadScalar):
        return _frac_text(Fraction(x))
    b = _frac_text(abs(x.b))
    op = "-" if x.b < 0 else "+"
    return f"{_frac_text(x.a)}{op}{b}√{x.d}"


# integer-size guard ---------------------------------------------------------

def precision_guard() -> int | None:
    raw = os.environ.get("HOMEOFORGE_PRECISION_GUARD")
    return int(raw) if raw else None


def check_size(x: Scalar, limit: int | None) -> None:
    if limit is None:
        return
    for f in parts(x)[:2]:
        if max(f.numerator.bit_length(), f.denominator.bit_length()) > limit:
            raise PrecisionGuardExceeded(f"scalar exceeds {limit} bits: {to_text(x)}")


SQRT2 = QuadScalar(Fraction(0), Fraction(1), 2)
SILVER = QuadScalar(Fraction(1), Fraction(1), 2)  # 1 + sqrt 2, the default lambda
