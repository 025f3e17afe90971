"""Open arcs of the circle R / cZ and supports of circle maps."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..plmap import CircleMap, support_in
from ..scalar import Scalar, as_scalar, period_index, to_text

ONE = Fraction(1)


def mod(x: Scalar, c: Scalar) -> Scalar:
    return x - period_index(x, c) * c


@dataclass(frozen=True)
class Arc:
    """The open arc from ``start`` going forward for ``length`` (0 <= length <= c).

    ``length == c`` denotes the whole circle.
    """

    start: Scalar
    length: Scalar
    c: Scalar = ONE

    def __post_init__(self):
        c = as_scalar(self.c)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "start", mod(as_scalar(self.start), c))
        object.__setattr__(self, "length", as_scalar(self.length))
        if not 0 <= self.length <= c:
            raise ValueError(f"arc length {self.length} outside [0, {c}]")

    @classmethod
    def between(cls, a, b, c=ONE) -> "Arc":
        """Forward arc from a to b (a == b is rejected)."""
        a, b, c = as_scalar(a), as_scalar(b), as_scalar(c)
        ln = mod(b - a, c)
        if ln == 0:
            raise ValueError("arc endpoints coincide")
        return cls(a, ln, c)

    @property
    def end(self) -> Scalar:
        """Lifted end point (start + length)."""
        return self.start + self.length

    @property
    def end_point(self) -> Scalar:
        return mod(self.end, self.c)

    @property
    def mid(self) -> Scalar:
        return mod(self.start + self.length / 2, self.c)

    @property
    def full(self) -> bool:
        return self.length == self.c

    @property
    def empty(self) -> bool:
        return self.length == 0

    def offset(self, x) -> Scalar:
        return mod(as_scalar(x) - self.start, self.c)

    def __contains__(self, x) -> bool:
        if self.full:
            return True
        return 0 < self.offset(x) < self.length

    def in_closure(self, x) -> bool:
        if self.full:
            return True
        o = self.offset(x)
        return o <= self.length or o == 0

    def contains_arc(self, other: "Arc", strict: bool = False) -> bool:
        """other is a subset of self (strict: closure of other inside self)."""
        if other.empty:
            return True
        if self.full:
            return True
        if other.full:
            return False
        o = self.offset(other.start)
        if strict:
            return o > 0 and o + other.length < self.length
        if o + other.length <= self.length:
            return True
        # other.start may coincide with self.start when offset wraps to 0
        return False

    def meets(self, other: "Arc") -> bool:
        if self.empty or other.empty:
            return False
        if self.full or other.full:
            return True
        return bool(self.intersection(other))

    def intersection(self, other: "Arc") -> list["Arc"]:
        if self.empty or other.empty:
            return []
        if self.full:
            return [other]
        if other.full:
            return [self]
        c = self.c
        lo, hi = self.start, self.end
        out = []
        for k in (-1, 0, 1, 2):
            a, b = other.start + k * c, other.end + k * c
            s, e = max(lo, a), min(hi, b)
            if s < e:
                out.append(Arc(s, e - s, c))
        return out

    def overlap_length(self, other: "Arc") -> Scalar:
        return sum((a.length for a in self.intersection(other)), Fraction(0))

    def complement(self) -> "Arc":
        """The interior of the complement."""
        return Arc(self.end_point, self.c - self.length, self.c)

    def image(self, g) -> "Arc":
        """Image of the arc under a circle map or a lifted (periodized) map."""
        lift = g.lift if isinstance(g, CircleMap) else g
        a, b = lift(self.start), lift(self.end)
        return Arc(a, b - a, self.c)

    def around(x, radius, c=ONE) -> "Arc":
        return Arc(as_scalar(x) - radius, 2 * as_scalar(radius), c)

    def to_json(self) -> list:
        return [to_text(self.start), to_text(self.end)]

    @classmethod
    def from_json(cls, data, c=ONE) -> "Arc":
        a, b = as_scalar(data[0]), as_scalar(data[1])
        return cls(a, b - a, c)

    def __str__(self):
        return f"({self.start}, {self.end})"


def circle_support(g: CircleMap) -> list[Arc]:
    """Support of a circle map as a list of disjoint open arcs."""
    c = g.circumference
    seg = g.lift.fundamental
    disp = [y - x for x, y in seg.breaks]
    lo, hi = min(disp), max(disp)
    # displacements of a circle-homeomorphism lift span less than c: at most one multiple of c
    n = -period_index(-lo, c)
    if n * c > hi:
        return [Arc(0, c, c)]
    shifted = g.lift.shift_value(-n * c).fundamental
    parts = support_in(shifted, (0, c))
    arcs = [Arc(p.lo, p.hi - p.lo, c) for p in parts]
    if len(arcs) >= 2 and parts[0].lo == 0 and parts[-1].hi == c and shifted(0) != 0:
        first, last = arcs[0], arcs[-1]
        arcs = [Arc(last.start, last.length + first.length, c)] + arcs[1:-1]
    elif len(arcs) == 1 and parts[0].lo == 0 and parts[0].hi == c and shifted(0) != 0:
        arcs = [Arc(0, c, c)]
    return arcs


def hull(arcs: list[Arc], c=ONE) -> Arc | None:
    """Smallest arc containing all given arcs (None if there are none).

    The hull is the complement of the largest gap between consecutive arcs.
    """
    arcs = [a for a in arcs if not a.empty]
    if not arcs:
        return None
    if any(a.full for a in arcs):
        return Arc(0, c, c)
    arcs = sorted(arcs, key=lambda a: a.start)
    if len(arcs) == 1:
        return arcs[0]
    best_gap, best_idx = None, None
    for k, a in enumerate(arcs):
        nxt = arcs[(k + 1) % len(arcs)]
        gap = mod(nxt.start - a.end, c)
        if best_gap is None or gap > best_gap:
            best_gap, best_idx = gap, k
    first = arcs[(best_idx + 1) % len(arcs)]
    return Arc(first.start, c - best_gap, c)


def circle_restrictions_agree(f: CircleMap, g: CircleMap, J: Arc) -> bool:
    """Whether f and g coincide as circle maps on the arc J."""
    if J.empty:
        return True
    a, b = (J.start, J.end) if not J.full else (Fraction(0), J.c)
    sf, sg = f.lift.restrict(a, b), g.lift.restrict(a, b)
    xs = sorted({x for x, _ in sf.breaks} | {x for x, _ in sg.breaks})
    d0 = sf(xs[0]) - sg(xs[0])
    if mod(d0, J.c) != 0:
        return False
    return all(sf(x) - sg(x) == d0 for x in xs)
