"""n-ring configurations: synthesis, the (*) verifier, and the rank-2 free probe."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from ..plmap import CircleMap, PeriodizedMap, PLSegmentMap
from ..scalar import Scalar, as_scalar, to_text
from ..thompson import f_generator
from ..word import GeneratorRegistry, Word
from .arcs import Arc, circle_support, mod

ONE = Fraction(1)


class RingError(ValueError):
    pass


def gid(i: int) -> str:
    return f"f{i}"


def arc_bump(arc: Arc, power: int) -> CircleMap:
    """Circle map supported exactly on ``arc``: a rescaled x0^-power, identity elsewhere.

    ``power > 0`` pushes points forward (counterclockwise) inside the arc.
    """
    c = arc.c
    a, b = arc.start, arc.end
    step = f_generator(0).inverse() if power > 0 else f_generator(0)
    core = PLSegmentMap.identity(0, 1)
    for _ in range(abs(power)):
        core = core.then(step)
    seg = core.rescale(a, b)
    if arc.length < c:
        seg = seg.glue(PLSegmentMap.identity(b, a + c))
    return CircleMap(PeriodizedMap.from_segment(c, seg))


@dataclass(frozen=True)
class RingConfig:
    n: int
    intervals: tuple[Arc, ...]
    generators: tuple[CircleMap, ...]
    c: Scalar = ONE

    def __post_init__(self):
        if self.n < 2:
            raise RingError("an n-ring needs n >= 2")
        if len(self.intervals) != self.n or len(self.generators) != self.n:
            raise RingError("need exactly n intervals and n generators")

    def J(self, i: int) -> Arc:
        return self.intervals[(i - 1) % self.n]

    def f(self, i: int) -> CircleMap:
        return self.generators[(i - 1) % self.n]

    def idx(self, i: int) -> int:
        return (i - 1) % self.n + 1

    def marked_point(self, i: int) -> Scalar:
        """x_i: the endpoint of J_{i+1} lying in J_i."""
        return self.J(i + 1).start

    @property
    def marked_points(self) -> list[Scalar]:
        return [self.marked_point(i) for i in range(1, self.n + 1)]

    def endpoints(self) -> set:
        out = set()
        for a in self.intervals:
            out.add(a.start)
            out.add(a.end_point)
        return out

    def registry(self) -> GeneratorRegistry:
        reg = GeneratorRegistry()
        for i in range(1, self.n + 1):
            reg.register(gid(i), self.f(i))
        return reg

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "circumference": to_text(self.c),
            "intervals": [a.to_json() for a in self.intervals],
            "generators": [circle_map_json(g) for g in self.generators],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RingConfig":
        c = as_scalar(data.get("circumference", "1"))
        arcs = tuple(Arc.from_json(a, c) for a in data["intervals"])
        gens = tuple(circle_map_from_json(g) for g in data["generators"])
        return cls(int(data["n"]), arcs, gens, c)


def circle_map_json(g: CircleMap) -> dict:
    return {
        "circumference": to_text(g.circumference),
        "breaks": [[to_text(x), to_text(y)] for x, y in g.lift.fundamental.breaks],
    }


def circle_map_from_json(data: dict) -> CircleMap:
    c = as_scalar(data.get("circumference", "1"))
    seg = PLSegmentMap([(as_scalar(x), as_scalar(y)) for x, y in data["breaks"]])
    return CircleMap(PeriodizedMap(c, seg))


# verification ----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    clause: str  # cover | adjacency | support | star
    i: int | None = None
    l: int | None = None
    detail: str = ""

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {"status": "violation", "clause": self.clause, "i": self.i, "l": self.l,
                "detail": self.detail}


@dataclass(frozen=True)
class StarCertificate:
    n: int
    # orbits[i-1] = [(point, interval index containing it or None), ...] for l = -1..n
    orbits: tuple[tuple[tuple[Scalar, int | None], ...], ...] = field(default=())

    def __bool__(self):
        return True

    def to_json(self) -> dict:
        return {
            "status": "certificate",
            "n": self.n,
            "orbits": [
                [{"point": to_text(p), "in": k} for p, k in orb] for orb in self.orbits
            ],
        }


def _cover_gap(arcs: list[Arc], c: Scalar) -> Scalar | None:
    """A circle point missed by the union of the open arcs, or None."""
    if any(a.full for a in arcs):
        return None
    # every uncovered set contains an arc endpoint or is the whole circle
    for a in arcs:
        for p in (a.start, a.end_point):
            if not any(p in b for b in arcs):
                return p
    if not arcs:
        return Fraction(0)
    return None


def _adjacency_problem(cfg: RingConfig) -> Violation | None:
    n = cfg.n
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            A, B = cfg.J(i), cfg.J(j)
            neighbours = (j - i) % n in (1, n - 1)
            parts = A.intersection(B)
            if not neighbours:
                if parts:
                    return Violation("adjacency", i, j, f"J{i} and J{j} intersect")
                continue
            if not parts:
                return Violation("adjacency", i, j, f"J{i} and J{j} are disjoint")
            if A.contains_arc(B) or B.contains_arc(A):
                return Violation("adjacency", i, j, "intersection is not proper")
            # for n = 2 the two arcs meet in two components around the circle
            if n > 2 and len(parts) != 1:
                return Violation("adjacency", i, j, "intersection is disconnected")
    return None


def verify_star(cfg: RingConfig) -> StarCertificate | Violation:
    """Check cover, adjacency, Supp(f_i) = J_i and condition (*), in that order."""
    n = cfg.n
    gap = _cover_gap(list(cfg.intervals), cfg.c)
    if gap is not None:
        return Violation("cover", detail=f"point {to_text(gap)} is not covered")
    adj = _adjacency_problem(cfg)
    if adj is not None:
        return adj
    for i in range(1, n + 1):
        sup = circle_support(cfg.f(i))
        J = cfg.J(i)
        if len(sup) != 1 or sup[0].start != J.start or sup[0].length != J.length:
            got = ", ".join(str(a) for a in sup) or "empty"
            return Violation("support", i, detail=f"Supp(f{i}) = {got}, expected {J}")
    orbits = []
    for i in range(1, n + 1):
        p = cfg.marked_point(i)
        orb = [(p, _where(cfg, p))]
        for l in range(0, n + 1):
            p = cfg.f(i + l)(p)
            target = cfg.idx(i + l + 1)
            if l >= 1 and p not in cfg.J(target):
                return Violation("star", i, l,
                                 f"x{i}.f{i}..f{cfg.idx(i + l)} = {to_text(p)} not in J{target}")
            orb.append((p, target if l >= 1 else _where(cfg, p)))
        orbits.append(tuple(orb))
    return StarCertificate(n, tuple(orbits))


def _where(cfg: RingConfig, p) -> int | None:
    for k in range(1, cfg.n + 1):
        if p in cfg.J(k):
            return k
    return None


# synthesis -------------------------------------------------------------------

GRID = 8  # dyadic level for the interval starts


def ring_arcs(n: int, margin: Fraction, c=ONE) -> tuple[Arc, ...]:
    scale = 2 ** GRID
    starts = [Fraction((i * scale) // n, scale) for i in range(n)] + [ONE]
    spacing = min(starts[i + 1] - starts[i] for i in range(n))
    if not 0 < 2 * margin < spacing:
        raise RingError(f"margin {margin} infeasible: need 0 < 2*margin < {spacing}")
    c = as_scalar(c)
    return tuple(
        Arc((starts[i] - margin) * c, (starts[i + 1] - starts[i] + 2 * margin) * c, c)
        for i in range(n)
    )


def default_margin(n: int) -> Fraction:
    scale = 2 ** GRID
    spacing = min(Fraction(((i + 1) * scale) // n - (i * scale) // n, scale) for i in range(n))
    m = Fraction(1, 2)
    while 2 * m >= spacing:
        m /= 2
    return m


def synthesize_ring(n: int, margin=None, *, max_power: int = 16, c=ONE) -> RingConfig:
    """Equally spaced overlapping dyadic arcs with bump generators satisfying (*)."""
    if n < 2:
        raise RingError("an n-ring needs n >= 2")
    margin = default_margin(n) if margin is None else Fraction(margin)
    arcs = ring_arcs(n, margin, c)
    last = None
    for power in range(1, max_power + 1):
        cfg = RingConfig(n, arcs, tuple(arc_bump(a, power) for a in arcs), as_scalar(c))
        res = verify_star(cfg)
        if res:
            return cfg
        last = res
    raise RingError(f"no bump power <= {max_power} satisfies (*): {last.detail}")


def shrink_generator(cfg: RingConfig, i: int, amount=None) -> RingConfig:
    """Mutation: replace f_i by a bump on a strictly smaller arc."""
    J = cfg.J(i)
    amount = J.length / 8 if amount is None else as_scalar(amount)
    small = Arc(J.start + amount, J.length - 2 * amount, cfg.c)
    gens = list(cfg.generators)
    gens[(i - 1) % cfg.n] = arc_bump(small, 4)
    return RingConfig(cfg.n, cfg.intervals, tuple(gens), cfg.c)


def identity_config(cfg: RingConfig) -> RingConfig:
    return RingConfig(cfg.n, cfg.intervals,
                      tuple(CircleMap.identity(cfg.c) for _ in range(cfg.n)), cfg.c)


# free group probe --------------------------------------------------------------

@dataclass
class FreeProbeReport:
    words_checked: int
    counterexamples: list[Word]
    test_points: list[Scalar]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def probe_points(cfg: RingConfig) -> list[Scalar]:
    pts = list(cfg.marked_points)
    A, B = cfg.J(1), cfg.J(2)
    for part in A.intersection(B):
        pts.append(part.mid)
    for X, Y in ((A, B), (B, A)):
        for part in X.intersection(Y.complement()):
            pts.append(part.mid)
    return list(dict.fromkeys(pts))


def free_group_probe(cfg: RingConfig, max_len: int = 8, points=None) -> FreeProbeReport:
    """Every reduced word of length 1..max_len must move some test point."""
    if cfg.n != 2:
        raise RingError("the free probe is for 2-rings")
    pts = list(points) if points is not None else probe_points(cfg)
    letters = [(1, 1), (1, -1), (2, 1), (2, -1)]
    maps = {(i, e): (cfg.f(i) if e > 0 else cfg.f(i).inverse()) for i, e in letters}
    bad: list[Word] = []
    count = 0

    def dfs(word, images, depth):
        nonlocal count
        for i, e in letters:
            if word and word[-1] == (i, -e):
                continue
            imgs = tuple(maps[(i, e)](p) for p in images)
            w = word + [(i, e)]
            count += 1
            if imgs == tuple(pts):
                bad.append(Word((gid(a), b) for a, b in w))
            if depth + 1 < max_len:
                dfs(w, imgs, depth + 1)

    dfs([], tuple(pts), 0)
    return FreeProbeReport(count, bad, pts)


def reduced_words(n: int, length: int):
    """All freely reduced letter sequences of exactly ``length`` over f1..fn^{+-1}."""
    letters = [(i, e) for i in range(1, n + 1) for e in (1, -1)]
    for seq in product(letters, repeat=length):
        if all(seq[k + 1] != (seq[k][0], -seq[k][1]) for k in range(length - 1)):
            yield Word((gid(i), e) for i, e in seq)
