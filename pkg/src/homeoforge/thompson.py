"""Thompson's groups F and T as concrete PL maps, and their lifts to the line."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .plmap import CircleMap, PeriodizedMap, PLMapError, PLSegmentMap
from .scalar import Scalar, as_scalar, is_rational

ONE = Fraction(1)
HALF = Fraction(1, 2)

# standard generator tables; the F relations in the tests certify them
X0_BREAKS = ((0, 0), (HALF, Fraction(1, 4)), (Fraction(3, 4), HALF), (1, 1))
X1_BREAKS = ((0, 0), (HALF, HALF), (Fraction(3, 4), Fraction(5, 8)), (Fraction(7, 8), Fraction(3, 4)), (1, 1))


def f_generator(index: int) -> PLSegmentMap:
    if index == 0:
        return PLSegmentMap(X0_BREAKS)
    if index == 1:
        return PLSegmentMap(X1_BREAKS)
    raise ValueError("Thompson F generators are x0 and x1")


def is_dyadic(x) -> bool:
    if not is_rational(x):
        return False
    den = Fraction(x).denominator
    return den & (den - 1) == 0


def is_power_of_two(x) -> bool:
    if not is_rational(x) or x <= 0:
        return False
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    return (n == 1 and d & (d - 1) == 0) or (d == 1 and n & (n - 1) == 0)


def t_generator_rotation(c, r) -> CircleMap:
    r = as_scalar(r)
    if not is_dyadic(r) or not 0 <= r < 1:
        raise ValueError(f"rotation amount must be a dyadic rational in [0, 1), got {r}")
    return CircleMap.rotation(r * as_scalar(c), as_scalar(c))


@dataclass(frozen=True)
class ThompsonCheck:
    ok: bool
    kind: str | None = None  # "slope" or "breakpoint"
    where: tuple | None = None

    def __bool__(self):
        return self.ok


def validate_thompson(m, c=ONE) -> ThompsonCheck:
    """Power-of-two slopes, breakpoints (both coordinates) in c * Z[1/2]."""
    c = as_scalar(c)
    if isinstance(m, CircleMap):
        seg = m.lift.fundamental
    elif isinstance(m, PeriodizedMap):
        seg = m.fundamental
    else:
        seg = m
    for (x0, y0), (x1, y1) in zip(seg.breaks, seg.breaks[1:]):
        s = (y1 - y0) / (x1 - x0)
        if not is_power_of_two(s):
            return ThompsonCheck(False, "slope", (x0, x1, s))
    for x, y in seg.breaks:
        if not (is_dyadic(x / c) and is_dyadic(y / c)):
            return ThompsonCheck(False, "breakpoint", (x, y))
    return ThompsonCheck(True)


def rescale_to_period(seg: PLSegmentMap, c) -> PLSegmentMap:
    """Scale a self-map of [0, 1] to [0, c]; slopes unchanged."""
    return seg.rescale(0, as_scalar(c))


def lift(m: CircleMap) -> PeriodizedMap:
    """The canonical lift (value at 0 in [0, c))."""
    return m.lift


def nu_embed(f: PLSegmentMap, c=ONE) -> PeriodizedMap:
    """The c-periodic map agreeing with f on [0, 1] rescaled to [0, c]; fixes cZ."""
    if f.lo != 0 or f.hi != 1 or f.image_lo != 0 or f.image_hi != 1:
        raise PLMapError("nu_embed needs a map of [0, 1] fixing 0 and 1")
    c = as_scalar(c)
    return PeriodizedMap(c, rescale_to_period(f, c) if c != 1 else f)


def center_element(c, n: int) -> PeriodizedMap:
    c = as_scalar(c)
    return PeriodizedMap.translation(n * c, c)


def lift_rotation(c, r) -> PeriodizedMap:
    return lift(t_generator_rotation(c, r))


def bump(a, b, power: int = 1, base: int = 0) -> PLSegmentMap:
    """x_base^power rescaled affinely onto [a, b] and extended by the identity to [0, 1].

    For dyadic a, b this is an element of F supported exactly on (a, b).
    """
    a, b = as_scalar(a), as_scalar(b)
    g = f_generator(base)
    core = PLSegmentMap.identity(0, 1)
    step = g if power > 0 else g.inverse()
    for _ in range(abs(power)):
        core = core.then(step)
    core = core.rescale(a, b)
    pts = []
    if a > 0:
        pts.append((Fraction(0), Fraction(0)))
    pts += list(core.breaks)
    if b < 1:
        pts.append((ONE, ONE))
    return PLSegmentMap(pts)


# F transitivity on dyadic tuples -----------------------------------------

def _standard_pieces(a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Greedy decomposition of [a, b] into maximal standard dyadic intervals."""
    out = []
    x = a
    while x < b:
        # largest 2^-k with x a multiple of it and x + 2^-k <= b
        k = 0
        while True:
            w = Fraction(1, 2 ** k)
            if (x / w).denominator == 1 and x + w <= b:
                break
            k += 1
        out.append((x, x + w))
        x += w
    return out


def _split_to(pieces: list, count: int) -> list:
    pieces = list(pieces)
    while len(pieces) < count:
        # split the widest piece (leftmost among ties) in half
        i = max(range(len(pieces)), key=lambda k: (pieces[k][1] - pieces[k][0], -k))
        lo, hi = pieces[i]
        m = (lo + hi) / 2
        pieces[i:i + 1] = [(lo, m), (m, hi)]
    return pieces


def dyadic_transport(a, b, c, d) -> PLSegmentMap:
    """An F-type PL map [a, b] -> [c, d] (dyadic endpoints) using the coarsest grids."""
    a, b, c, d = (Fraction(as_scalar(t)) for t in (a, b, c, d))
    for t in (a, b, c, d):
        if not is_dyadic(t):
            raise ValueError(f"{t} is not dyadic")
    src, dst = _standard_pieces(a, b), _standard_pieces(c, d)
    n = max(len(src), len(dst))
    src, dst = _split_to(src, n), _split_to(dst, n)
    pts = [(s[0], t[0]) for s, t in zip(src, dst)] + [(b, d)]
    return PLSegmentMap(pts)


def f_transport(src, dst) -> PLSegmentMap:
    """Element of F on [0, 1] sending the increasing dyadic tuple ``src`` onto ``dst``."""
    src = [Fraction(0)] + [Fraction(as_scalar(t)) for t in src] + [ONE]
    dst = [Fraction(0)] + [Fraction(as_scalar(t)) for t in dst] + [ONE]
    if len(src) != len(dst):
        raise ValueError("tuples differ in length")
    seg = None
    for (a, b), (c, d) in zip(zip(src, src[1:]), zip(dst, dst[1:])):
        piece = dyadic_transport(a, b, c, d)
        seg = piece if seg is None else seg.glue(piece)
    return seg
