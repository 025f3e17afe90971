"""Piecewise-linear homeomorphisms with exact breakpoints.

Three kinds of value are provided:

* :class:`PLSegmentMap` - an increasing PL map of a compact interval;
* :class:`PeriodizedMap` - a PL homeomorphism of the line with
  ``f(x + c) = f(x) + c``, stored as one fundamental period on ``[0, c]``;
* :class:`CircleMap` - a PL homeomorphism of ``R / cZ`` stored as its
  canonical lift (the one with ``lift(0)`` in ``[0, c)``).

All maps act on the right in the algebra of this package: ``f.then(g)`` is
"first f, then g", i.e. ``x -> g(f(x))``.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .scalar import Scalar, as_scalar, check_size, period_index, precision_guard

ZERO = Fraction(0)
ONE = Fraction(1)


class PLMapError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: Scalar
    hi: Scalar
    open_lo: bool = False
    open_hi: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", as_scalar(self.lo))
        object.__setattr__(self, "hi", as_scalar(self.hi))
        if self.lo > self.hi:
            raise PLMapError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, True, True)

    @property
    def length(self) -> Scalar:
        return self.hi - self.lo

    @property
    def mid(self) -> Scalar:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        lo_ok = x > self.lo if self.open_lo else x >= self.lo
        hi_ok = x < self.hi if self.open_hi else x <= self.hi
        return lo_ok and hi_ok

    def shift(self, t) -> "Interval":
        return Interval(self.lo + t, self.hi + t, self.open_lo, self.open_hi)

    def meets(self, other: "Interval") -> bool:
        """Whether the two intervals share a point."""
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            return True
        if lo > hi:
            return False
        return lo in self and lo in other

    def __str__(self):
        left = "(" if self.open_lo else "["
        right = ")" if self.open_hi else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


def _canonical(points: Sequence[tuple[Scalar, Scalar]]) -> tuple[tuple[Scalar, Scalar], ...]:
    """Drop repeated points and merge collinear interior breakpoints."""
    pts: list[tuple[Scalar, Scalar]] = []
    for p in points:
        if pts and pts[-1][0] == p[0]:
            if pts[-1][1] != p[1]:
                raise PLMapError(f"discontinuity at x={p[0]}")
            continue
        pts.append(p)
    if len(pts) < 2:
        raise PLMapError("a segment map needs two distinct breakpoints")
    out = [pts[0]]
    for i in range(1, len(pts) - 1):
        (x0, y0), (x1, y1), (x2, y2) = out[-1], pts[i], pts[i + 1]
        if (y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0):
            out.append(pts[i])
    out.append(pts[-1])
    return tuple(out)


class PLSegmentMap:
    """Increasing PL homeomorphism between compact intervals."""

    __slots__ = ("breaks", "_xs")

    def __init__(self, breaks: Iterable[tuple], *, canonical: bool = False):
        pts = [(as_scalar(x), as_scalar(y)) for x, y in breaks]
        if not canonical:
            for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
                if not (x1 > x0 and y1 > y0):
                    raise PLMapError("breakpoints must increase strictly in both coordinates")
            pts = _canonical(pts)
        limit = precision_guard()
        if limit is not None:
            for x, y in pts:
                check_size(x, limit)
                check_size(y, limit)
        self.breaks = tuple(pts)
        self._xs = [p[0] for p in self.breaks]

    # construction helpers ---------------------------------------------------
    @classmethod
    def identity(cls, lo, hi) -> "PLSegmentMap":
        return cls([(lo, lo), (hi, hi)])

    @classmethod
    def translation(cls, lo, hi, t) -> "PLSegmentMap":
        return cls([(lo, lo + t), (hi, hi + t)])

    # basic data -------------------------------------------------------------
    @property
    def lo(self) -> Scalar:
        return self.breaks[0][0]

    @property
    def hi(self) -> Scalar:
        return self.breaks[-1][0]

    @property
    def image_lo(self) -> Scalar:
        return self.breaks[0][1]

    @property
    def image_hi(self) -> Scalar:
        return self.breaks[-1][1]

    @property
    def domain(self) -> Interval:
        return Interval(self.lo, self.hi)

    def slopes(self) -> list[Scalar]:
        return [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(self.breaks, self.breaks[1:])]

    def max_slope(self) -> Scalar:
        return max(self.slopes())

    def __eq__(self, other):
        return isinstance(other, PLSegmentMap) and self.breaks == other.breaks

    def __hash__(self):
        return hash(self.breaks)

    def __repr__(self):
        inner = ", ".join(f"({x}, {y})" for x, y in self.breaks)
        return f"PLSegmentMap([{inner}])"

    def is_identity(self) -> bool:
        return all(x == y for x, y in self.breaks)

    # evaluation -------------------------------------------------------------
    def __call__(self, x) -> Scalar:
        x = as_scalar(x)
        if x < self.lo or x > self.hi:
            raise PLMapError(f"{x} outside domain [{self.lo}, {self.hi}]")
        k = bisect_right(self._xs, x)
        if k == len(self.breaks):
            return self.breaks[-1][1]
        (x0, y0), (x1, y1) = self.breaks[k - 1], self.breaks[k]
        if x == x0:
            return y0
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def preimage(self, y) -> Scalar:
        y = as_scalar(y)
        if y < self.image_lo or y > self.image_hi:
            raise PLMapError(f"{y} outside image [{self.image_lo}, {self.image_hi}]")
        ys = [p[1] for p in self.breaks]
        k = bisect_right(ys, y)
        if k == len(ys):
            return self.breaks[-1][0]
        (x0, y0), (x1, y1) = self.breaks[k - 1], self.breaks[k]
        if y == y0:
            return x0
        return x0 + (x1 - x0) * (y - y0) / (y1 - y0)

    # group operations -------------------------------------------------------
    def then(self, other: "PLSegmentMap") -> "PLSegmentMap":
        """x -> other(self(x)); ``other`` must be defined on the image of ``self``."""
        if other.lo > self.image_lo or other.hi < self.image_hi:
            raise PLMapError("second map not defined on the image of the first")
        xs = set(self._xs)
        for bx, _ in other.breaks:
            if self.image_lo < bx < self.image_hi:
                xs.add(self.preimage(bx))
        pts = [(x, other(self(x))) for x in sorted(xs)]
        return PLSegmentMap(pts, canonical=False)

    def inverse(self) -> "PLSegmentMap":
        return PLSegmentMap([(y, x) for x, y in self.breaks], canonical=True)

    def restrict(self, lo, hi) -> "PLSegmentMap":
        lo, hi = as_scalar(lo), as_scalar(hi)
        if lo < self.lo or hi > self.hi or not lo < hi:
            raise PLMapError(f"[{lo}, {hi}] not inside [{self.lo}, {self.hi}]")
        pts = [(lo, self(lo))]
        pts += [p for p in self.breaks if lo < p[0] < hi]
        pts.append((hi, self(hi)))
        return PLSegmentMap(pts, canonical=True)

    def shift(self, t) -> "PLSegmentMap":
        """Conjugate by translation: x -> f(x - t) + t on the shifted domain."""
        t = as_scalar(t)
        return PLSegmentMap([(x + t, y + t) for x, y in self.breaks], canonical=True)

    def rescale(self, a, b) -> "PLSegmentMap":
        """Affine conjugate of a self-map of [lo, hi] onto [a, b]."""
        a, b = as_scalar(a), as_scalar(b)
        k = (b - a) / (self.hi - self.lo)
        return PLSegmentMap(
            [(a + (x - self.lo) * k, a + (y - self.lo) * k) for x, y in self.breaks],
            canonical=True,
        )

    def glue(self, other: "PLSegmentMap") -> "PLSegmentMap":
        if self.hi != other.lo or self.image_hi != other.image_lo:
            raise PLMapError("segments do not join")
        return PLSegmentMap(self.breaks + other.breaks[1:])


# periodic maps ------------------------------------------------------------

def _tile(seg: PLSegmentMap, c: Scalar, lo: Scalar, hi: Scalar) -> PLSegmentMap:
    """Restriction to [lo, hi] of the c-periodic extension of a one-period segment."""

    def ev(x):
        j = period_index(x - seg.lo, c)
        return seg(x - j * c) + j * c

    pts = [(lo, ev(lo))]
    j0 = period_index(lo - seg.lo, c)
    j1 = period_index(hi - seg.lo, c)
    for j in range(j0, j1 + 1):
        for x, y in seg.breaks:
            xx = x + j * c
            if lo < xx < hi:
                pts.append((xx, y + j * c))
    pts.append((hi, ev(hi)))
    pts.sort(key=lambda p: p[0])
    uniq = [pts[0]]
    for p in pts[1:]:
        if p[0] != uniq[-1][0]:
            uniq.append(p)
    return PLSegmentMap(uniq)


class PeriodizedMap:
    """A PL homeomorphism f of R with f(x + c) = f(x) + c."""

    __slots__ = ("period", "fundamental")

    def __init__(self, period, fundamental: PLSegmentMap):
        period = as_scalar(period)
        if period <= 0:
            raise PLMapError("period must be positive")
        if fundamental.lo != 0 or fundamental.hi != period:
            raise PLMapError("fundamental domain must be [0, period]")
        if fundamental.image_hi != fundamental.image_lo + period:
            raise PLMapError("boundary identification f(c) = f(0) + c fails")
        self.period = period
        self.fundamental = fundamental

    @classmethod
    def from_segment(cls, period, seg: PLSegmentMap) -> "PeriodizedMap":
        """Periodic extension of a segment map defined on any interval of length ``period``."""
        period = as_scalar(period)
        if seg.hi - seg.lo != period or seg.image_hi - seg.image_lo != period:
            raise PLMapError("segment does not span exactly one period")
        return cls(period, _tile(seg, period, ZERO, period))

    @classmethod
    def identity(cls, period=ONE) -> "PeriodizedMap":
        return cls(period, PLSegmentMap.identity(0, period))

    @classmethod
    def translation(cls, t, period=ONE) -> "PeriodizedMap":
        return cls(period, PLSegmentMap.translation(0, period, t))

    def __call__(self, x) -> Scalar:
        x = as_scalar(x)
        j = period_index(x, self.period)
        return self.fundamental(x - j * self.period) + j * self.period

    def restrict(self, lo, hi) -> PLSegmentMap:
        return _tile(self.fundamental, self.period, as_scalar(lo), as_scalar(hi))

    def _same_period(self, other: "PeriodizedMap"):
        if self.period != other.period:
            raise PLMapError(f"period mismatch: {self.period} vs {other.period}")

    def then(self, other: "PeriodizedMap") -> "PeriodizedMap":
        self._same_period(other)
        f = self.fundamental
        g = other.restrict(f.image_lo, f.image_hi)
        return PeriodizedMap(self.period, f.then(g))

    def inverse(self) -> "PeriodizedMap":
        return PeriodizedMap.from_segment(self.period, self.fundamental.inverse())

    def shift_value(self, t) -> "PeriodizedMap":
        """Post-compose with translation by t (t must commute, e.g. t in cZ)."""
        t = as_scalar(t)
        return PeriodizedMap(self.period, PLSegmentMap([(x, y + t) for x, y in self.fundamental.breaks], canonical=True))

    def max_slope(self) -> Scalar:
        return self.fundamental.max_slope()

    def min_slope(self) -> Scalar:
        return min(self.fundamental.slopes())

    def is_identity(self) -> bool:
        return self.fundamental.is_identity()

    def __eq__(self, other):
        return isinstance(other, PeriodizedMap) and self.period == other.period and self.fundamental == other.fundamental

    def __hash__(self):
        return hash((self.period, self.fundamental))

    def __repr__(self):
        return f"PeriodizedMap(period={self.period}, {self.fundamental!r})"


class CircleMap:
    """A PL homeomorphism of the circle R / cZ, stored as its canonical lift."""

    __slots__ = ("circumference", "lift")

    def __init__(self, lift: PeriodizedMap):
        j = period_index(lift(ZERO), lift.period)
        if j:
            lift = lift.shift_value(-j * lift.period)
        self.circumference = lift.period
        self.lift = lift

    @classmethod
    def identity(cls, c=ONE) -> "CircleMap":
        return cls(PeriodizedMap.identity(c))

    @classmethod
    def rotation(cls, t, c=ONE) -> "CircleMap":
        return cls(PeriodizedMap.translation(t, c))

    def __call__(self, x) -> Scalar:
        c = self.circumference
        y = self.lift(as_scalar(x))
        return y - period_index(y, c) * c

    def restrict(self, lo, hi) -> PLSegmentMap:
        """Restriction of the canonical lift (values are lifted, not reduced)."""
        return self.lift.restrict(lo, hi)

    def then(self, other: "CircleMap") -> "CircleMap":
        return CircleMap(self.lift.then(other.lift))

    def inverse(self) -> "CircleMap":
        return CircleMap(self.lift.inverse())

    def is_identity(self) -> bool:
        return self.lift.is_identity()

    def max_slope(self) -> Scalar:
        return self.lift.max_slope()

    def min_slope(self) -> Scalar:
        return self.lift.min_slope()

    def __eq__(self, other):
        return isinstance(other, CircleMap) and self.lift == other.lift

    def __hash__(self):
        return hash(self.lift)

    def __repr__(self):
        return f"CircleMap(c={self.circumference}, {self.lift.fundamental!r})"


# functionals --------------------------------------------------------------

def as_segment(f, lo, hi) -> PLSegmentMap:
    """The restriction of any supported map-like value to [lo, hi]."""
    if isinstance(f, PLSegmentMap):
        if f.lo == lo and f.hi == hi:
            return f
        return f.restrict(lo, hi)
    return f.restrict(lo, hi)


def _domain(I) -> tuple[Scalar, Scalar]:
    if isinstance(I, Interval):
        return I.lo, I.hi
    lo, hi = I
    return as_scalar(lo), as_scalar(hi)


def evaluate(f, x) -> Scalar:
    return f(as_scalar(x))


def compose(f, g):
    """Right-action product: first ``f`` then ``g``."""
    return f.then(g)


def invert(f):
    return f.inverse()


def support_in(f, I) -> list[Interval]:
    """Maximal open subintervals of I on which f moves points."""
    lo, hi = _domain(I)
    seg = as_segment(f, lo, hi)
    pts = list(seg.breaks)
    # insert the fixed points lying strictly inside linear pieces
    refined: list[tuple[Scalar, Scalar]] = [pts[0]]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        d0, d1 = y0 - x0, y1 - x1
        if (d0 > 0 and d1 < 0) or (d0 < 0 and d1 > 0):
            z = x0 - d0 * (x1 - x0) / (d1 - d0)
            refined.append((z, z))
        refined.append((x1, y1))
    out: list[Interval] = []
    start = None
    for (x0, y0), (x1, y1) in zip(refined, refined[1:]):
        moving = ((x0 + x1) / 2 != seg((x0 + x1) / 2))
        if moving and start is None:
            start = x0
        if start is not None and (not moving or y1 == x1):
            end = x1 if moving else x0
            out.append(Interval.open(start, end))
            start = None
    if start is not None:
        out.append(Interval.open(start, refined[-1][0]))
    return out


def sup_distance(f, g, I) -> tuple[Scalar, Scalar]:
    """Exact sup of |f - g| over I, with a point where it is attained."""
    lo, hi = _domain(I)
    a, b = as_segment(f, lo, hi), as_segment(g, lo, hi)
    xs = sorted({x for x, _ in a.breaks} | {x for x, _ in b.breaks})
    best, witness = None, None
    for x in xs:
        d = abs(a(x) - b(x))
        if best is None or d > best:
            best, witness = d, x
    return best, witness


def translated_compare(g, I, J) -> Scalar:
    """d_g(I, J): sup over x in I of |g(x) - (g(x + s) - s)|, s = inf J - inf I."""
    ilo, ihi = _domain(I)
    jlo, jhi = _domain(J)
    if ihi - ilo != jhi - jlo:
        raise PLMapError("translated_compare needs intervals of equal length")
    s = jlo - ilo
    moved = as_segment(g, jlo, jhi).shift(-s)
    return sup_distance(as_segment(g, ilo, ihi), moved, (ilo, ihi))[0]


def is_eps_advancing(f, I, eps) -> tuple[bool, Scalar | None]:
    """Whether f(x) >= x - eps on I; on failure also return a violating point."""
    eps = as_scalar(eps)
    lo, hi = _domain(I)
    seg = as_segment(f, lo, hi)
    worst, witness = None, None
    for x, y in seg.breaks:
        d = y - x
        if worst is None or d < worst:
            worst, witness = d, x
    if worst >= -eps:
        return True, None
    return False, witness
