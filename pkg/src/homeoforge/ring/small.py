"""Proximality routing, the I-small calculus, the nu/X generating set and special elements."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..plmap import CircleMap
from ..scalar import Scalar, to_text
from ..word import GeneratorRegistry, Word, commutator, conjugate, evaluate_word, materialize
from .arcs import Arc, circle_restrictions_agree, circle_support, hull, mod
from .config import RingConfig, RingError, gid

POWERS = (1, 2, 4, 8, 16)


class RoutingError(RingError):
    """A bounded search ran out; carries what was tried."""

    def __init__(self, message: str, **info):
        super().__init__(message)
        self.info = info


# routing -----------------------------------------------------------------------

class Router:
    """Caches generator powers of a ring config for arc and point routing."""

    def __init__(self, cfg: RingConfig):
        self.cfg = cfg
        self.registry = cfg.registry()
        self._pow: dict[tuple[int, int], CircleMap] = {}

    def power(self, i: int, e: int) -> CircleMap:
        key = (i, e)
        m = self._pow.get(key)
        if m is None:
            if abs(e) == 1:
                m = self.cfg.f(i) if e > 0 else self.cfg.f(i).inverse()
            else:
                unit = 1 if e > 0 else -1
                m = self.power(i, e - unit).then(self.power(i, unit))
            self._pow[key] = m
        return m

    def moves(self):
        for i in range(1, self.cfg.n + 1):
            for p in POWERS:
                for e in (p, -p):
                    yield (i, e), self.power(i, e)

    def image(self, arc: Arc, w: Word) -> Arc:
        a = evaluate_word(w, arc.start, self.registry)
        b = evaluate_word(w, arc.start + arc.length, self.registry)
        return Arc(a, b - a, arc.c)

    def point(self, x, w: Word) -> Scalar:
        return mod(evaluate_word(w, x, self.registry), self.cfg.c)

    def beam(self, start: Arc, goal, score, depth: int, width: int = 64):
        """Beam search over generator powers; returns (letters, arc) or None."""
        if goal(start):
            return (), start
        frontier = [(start, ())]
        seen = {(start.start, start.length)}
        for _ in range(depth):
            cand = []
            for arc, w in frontier:
                for (i, e), m in self.moves():
                    nxt = arc.image(m)
                    key = (nxt.start, nxt.length)
                    if key in seen:
                        continue
                    seen.add(key)
                    w2 = w + ((i, e),)
                    if goal(nxt):
                        return w2, nxt
                    cand.append((score(nxt), len(w2), w2, nxt))
            if not cand:
                break
            cand.sort(key=lambda t: (t[0], t[1]))
            frontier = [(a, w) for _, _, w, a in cand[:width]]
        return None


def _letters(seq) -> Word:
    return Word((gid(i), e) for i, e in seq)


def _arc_score(target: Arc):
    def score(a: Arc):
        outside = a.length - a.overlap_length(target)
        o = target.offset(a.start)
        margin = min(o, target.length - o - a.length)
        return (outside, -margin)
    return score


def _point_distance(target: Arc, x) -> Scalar:
    if x in target:
        return Fraction(0)
    return min(mod(target.start - x, target.c), mod(x - target.end, target.c))


def point_orbit_hits(router: Router, x, target: Arc, depth: int = 4, want: int = 1,
                     max_nodes: int = 200_000, separation=0) -> list[tuple[Scalar, Word]]:
    """Breadth-first search over generator powers for points x.g inside ``target``.

    Returns up to ``want`` hits (shortest words first), pairwise at least
    ``separation`` apart.
    """
    hits: list[tuple[Scalar, Word]] = []

    def accept(q, w):
        if q in target and all(_circ_dist(q, h, target.c) >= separation and q != h
                               for h, _ in hits):
            hits.append((q, _letters(w)))
        return len(hits) >= want

    x = mod(x, router.cfg.c)
    if accept(x, ()):
        return hits
    seen = {x}
    frontier = [(x, ())]
    for _ in range(depth):
        nxt = []
        for q, w in frontier:
            for (i, e), m in router.moves():
                r = m(q)
                if r in seen:
                    continue
                seen.add(r)
                w2 = w + ((i, e),)
                if accept(r, w2):
                    return hits
                nxt.append((r, w2))
                if len(seen) > max_nodes:
                    return hits
        frontier = nxt
    return hits


def _circ_dist(a, b, c) -> Scalar:
    d = mod(a - b, c)
    return min(d, c - d)


def route_point(router: Router, x, target: Arc, depth: int = 4) -> Word:
    """A word g with x.g in the open arc ``target`` (bounded breadth-first search)."""
    hits = point_orbit_hits(router, x, target, depth)
    if not hits:
        raise RoutingError("point routing exhausted", point=to_text(x), target=str(target),
                           depth=depth)
    return hits[0][1]


def find_contracting_word(cfg: RingConfig, I: Arc, J: Arc, depth: int = 4,
                          router: Router | None = None, max_contraction: int = 4096,
                          route: Word | None = None) -> Word:
    """A word g with I.g contained in J, built in three steps.

    Steer I strictly inside J_1, route inf(J_1) into J, then contract with a
    power of f_1^-1 toward inf(J_1) until the image fits the pulled-back target.
    ``route`` may supply the second step (a word sending inf(J_1) into J).
    """
    if J.empty:
        raise RingError("target arc has empty interior")
    if I.full:
        raise RingError("source arc must have a complement with nonempty interior")
    if J.contains_arc(I):
        return Word()
    router = router or Router(cfg)
    J1 = cfg.J(1)
    found = router.beam(I, lambda a: J1.contains_arc(a, strict=True), _arc_score(J1), 2 * depth)
    if found is None:
        raise RoutingError("could not steer the arc into J1", arc=str(I), depth=depth)
    g_a = _letters(found[0])
    inside = found[1]
    p = J1.start
    g_b = route if route is not None else route_point(router, p, J, depth)
    if router.point(p, g_b) not in J:
        raise RoutingError("route does not send inf(J1) into the target", route=str(g_b))
    pulled = router.image(J, g_b.inverse())
    step = router.power(1, -1)
    arc, m = inside, 0
    while not pulled.contains_arc(arc):
        arc = arc.image(step)
        m += 1
        if m > max_contraction:
            raise RoutingError("contraction toward inf(J1) did not converge", steps=m)
    w = g_a * Word.gen(gid(1), -m) * g_b
    if not J.contains_arc(router.image(I, w)):
        raise RoutingError("final containment failed", word=str(w))
    return w


# the small family ------------------------------------------------------------------

@dataclass
class SmallFamily:
    cfg: RingConfig
    L: dict[tuple[int, int], Arc]
    eps0: Scalar
    level: int
    # words sending inf(J_1) to the centre of each L_{i,j}
    routes: dict[tuple[int, int], Word] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "eps0": to_text(self.eps0),
            "level": self.level,
            "L": {f"{i},{j}": a.to_json() for (i, j), a in sorted(self.L.items())},
            "routes": {f"{i},{j}": str(w) for (i, j), w in sorted(self.routes.items())},
        }


def interstitial(cfg: RingConfig, k: int) -> Arc:
    """U_k: the part of J_k outside its two neighbours (as a closed-arc's interior)."""
    prev, nxt = cfg.J(k - 1), cfg.J(k + 1)
    ln = mod(nxt.start - prev.end_point, cfg.c)
    U = Arc(prev.end_point, ln, cfg.c)
    if ln == 0 or not cfg.J(k).contains_arc(U):
        raise RingError(f"U_{k} is empty; neighbours of J_{k} overlap")
    return U


def orbit_points(router: Router, x, depth: int = 3, max_nodes: int = 100_000):
    """Points x.g for words g of at most ``depth`` generator powers, shortest first."""
    x = mod(x, router.cfg.c)
    out = [(x, ())]
    seen = {x}
    frontier = [(x, ())]
    for _ in range(depth):
        nxt = []
        for q, w in frontier:
            for (i, e), m in router.moves():
                r = m(q)
                if r in seen:
                    continue
                seen.add(r)
                nxt.append((r, w + ((i, e),)))
        out.extend(nxt)
        frontier = nxt
        if len(seen) > max_nodes:
            break
    return out


def build_small_family(cfg: RingConfig, depth: int = 3, router: Router | None = None) -> SmallFamily:
    """n^2 disjoint dyadic arcs L_{i,j}, centred on orbit points of inf(J_1).

    Synthesized actions need not be minimal, so each L_{i,j} is centred where
    the orbit of inf(J_1) actually goes, inside the interior of the complement
    of J_j and away from every interval endpoint.  The routing words are kept
    for build_nu.
    """
    n, c = cfg.n, cfg.c
    router = router or Router(cfg)
    pts = orbit_points(router, cfg.J(1).start, depth)
    ends = sorted(cfg.endpoints())
    keys = [(i, j) for j in range(1, n + 1) for i in range(1, n + 1)]
    sep = c / (8 * n * n)
    chosen: dict[tuple[int, int], tuple[Scalar, tuple]] = {}
    while sep > c / 2 ** 20:
        chosen = {}
        for key in keys:
            region = cfg.J(key[1]).complement()
            for q, w in pts:
                if q not in region:
                    continue
                if any(_circ_dist(q, e, c) < sep for e in ends):
                    continue
                if any(_circ_dist(q, h, c) < sep for h, _ in chosen.values()):
                    continue
                chosen[key] = (q, w)
                break
            else:
                break
        if len(chosen) == len(keys):
            break
        sep /= 2
    if len(chosen) < len(keys):
        raise RingError("orbit of inf(J_1) is too sparse for the small family; raise depth")
    level = 1
    while Fraction(1, 2 ** level) * c > sep / 4:
        level += 1
    r = Fraction(1, 2 ** level) * c
    L = {key: Arc(q - r, 2 * r, c) for key, (q, _) in chosen.items()}
    routes = {key: _letters(w) for key, (_, w) in chosen.items()}
    fam = SmallFamily(cfg, L, Fraction(0), level, routes)
    fam.eps0 = _eps0(cfg, L)
    check_family(fam)
    return fam


def _arc_gap(A: Arc, B: Arc) -> Scalar:
    """Length of the shorter complementary gap between two disjoint arcs."""
    if A.meets(B):
        return Fraction(0)
    c = A.c
    return min(mod(B.start - A.end, c), mod(A.start - B.end, c))


def _eps0(cfg: RingConfig, L) -> Scalar:
    overlaps = [cfg.J(k).overlap_length(cfg.J(k + 1)) for k in range(1, cfg.n + 1)]
    if cfg.n == 2:
        overlaps = [p.length for p in cfg.J(1).intersection(cfg.J(2))]
    gaps = [_arc_gap(a, cfg.J(j)) for (i, j), a in L.items()]
    return min(overlaps + gaps)


def check_family(fam: SmallFamily) -> None:
    cfg = fam.cfg
    items = sorted(fam.L.items())
    for (key, a) in items:
        i, j = key
        if a.meets(cfg.J(j)) or not cfg.J(j).complement().contains_arc(a, strict=True):
            raise RingError(f"L_{i},{j} is not inside the interior of the complement of J_{j}")
        if not any(cfg.J(k).contains_arc(a) for k in range(1, cfg.n + 1)):
            raise RingError(f"L_{i},{j} is not inside any J_k")
    for x in range(len(items)):
        for y in range(x + 1, len(items)):
            if items[x][1].meets(items[y][1]):
                raise RingError(f"L{items[x][0]} and L{items[y][0]} meet")


def is_small(arc: Arc, cfg: RingConfig) -> bool:
    return arc.empty or any(cfg.J(k).contains_arc(arc) for k in range(1, cfg.n + 1))


def is_I_small(arc: Arc | None, fam: SmallFamily) -> bool:
    """Small, and for every (i, j) it does not meet both L_{i,j} and J_j."""
    if arc is None or arc.empty:
        return True
    cfg = fam.cfg
    if not is_small(arc, cfg):
        return False
    for (i, j), L in fam.L.items():
        if arc.meets(L) and arc.meets(cfg.J(j)):
            return False
    return True


# nu and X --------------------------------------------------------------------------

def xid(i: int, j: int) -> str:
    return f"X[{i},{j}]"


@dataclass
class NuFamily:
    cfg: RingConfig
    family: SmallFamily
    lam: dict[tuple[int, int], Word]
    nu: dict[tuple[int, int], Word]
    maps: dict[tuple[int, int], CircleMap]
    supports: dict[tuple[int, int], list[Arc]]
    xregistry: GeneratorRegistry = field(repr=False, default=None)

    def X(self, i: int, j: int) -> Word:
        """X_{i,j} = nu_{i,j}^-1 f_i as a word over the f generators."""
        return self.nu[(i, j)].inverse() * Word.gen(gid(i))

    def X_words(self) -> dict[tuple[int, int], Word]:
        return {key: self.X(*key) for key in sorted(self.nu)}

    def nu_inv(self, i: int, j: int) -> CircleMap:
        return self.maps[(i, j)].inverse()

    def xmap(self, w: Word) -> CircleMap:
        if not w:
            return CircleMap.identity(self.cfg.c)
        return materialize(w, self.xregistry)


def build_nu(cfg: RingConfig, family: SmallFamily, depth: int = 4) -> NuFamily:
    router = Router(cfg)
    reg = cfg.registry()
    lam, nu, maps, sups = {}, {}, {}, {}
    for (i, j), L in sorted(family.L.items()):
        w = find_contracting_word(cfg, cfg.J(i), L, depth, router,
                                  route=family.routes.get((i, j)))
        lam[(i, j)] = w
        nu[(i, j)] = conjugate(Word.gen(gid(i)), w)
        m = materialize(nu[(i, j)], reg)
        maps[(i, j)] = m
        sups[(i, j)] = circle_support(m)
        if not all(L.contains_arc(a) for a in sups[(i, j)]):
            raise RingError(f"Supp(nu_{i},{j}) is not inside L_{i},{j}")
    keys = sorted(maps)
    for x, a in enumerate(keys):
        for b in keys[x + 1:]:
            if any(p.meets(q) for p in sups[a] for q in sups[b]):
                raise RingError(f"supports of nu{a} and nu{b} meet")
    xreg = GeneratorRegistry()
    for (i, j), m in maps.items():
        xreg.register(xid(i, j), m.inverse().then(cfg.f(i)))
    return NuFamily(cfg, family, lam, nu, maps, sups, xreg)


def nu_commutators_trivial(nf: NuFamily) -> bool:
    keys = sorted(nf.maps)
    for x, a in enumerate(keys):
        for b in keys[x + 1:]:
            ma, mb = nf.maps[a], nf.maps[b]
            comm = ma.then(mb).then(ma.inverse()).then(mb.inverse())
            if not comm.is_identity():
                return False
    return True


@dataclass
class XIdentityReport:
    checked: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def generating_set_X(nf: NuFamily) -> dict[tuple[int, int], Word]:
    return nf.X_words()


def verify_X_identities(nf: NuFamily) -> XIdentityReport:
    """Check the displayed factorizations as exact circle-map equalities."""
    n, fails, count = nf.cfg.n, [], 0
    X = lambda i, j: Word.gen(xid(i, j))  # noqa: E731
    for i in range(1, n + 1):
        fi = nf.cfg.f(i)
        for j1 in range(1, n + 1):
            for j2 in range(1, n + 1):
                if j1 == j2:
                    continue
                lhs = nf.maps[(i, j1)].then(nf.nu_inv(i, j2))
                count += 1
                if nf.xmap(X(i, j2) * X(i, j1).inverse()) != lhs:
                    fails.append(f"nu_{i},{j1} nu_{i},{j2}^-1")
        for j in range(1, n + 1):
            lhs = fi.then(nf.nu_inv(i, j))
            count += 1
            if nf.xmap(X(i, i) * X(i, j) * X(i, i).inverse()) != lhs:
                fails.append(f"f_{i} nu_{i},{j}^-1")
    for key, w in nf.X_words().items():
        count += 1
        if any(w.exponent_sum(gid(k)) for k in range(1, n + 1)):
            fails.append(f"exponent sum of X{key}")
    return XIdentityReport(count, fails)


# special elements ---------------------------------------------------------------

@dataclass
class SpecialElement:
    """f nu_{i,j}^-1 with the X-word realizing it; ``f`` is kept as an exact circle map."""

    f: CircleMap
    i: int
    j: int
    xword: Word

    def support(self) -> Arc | None:
        return hull(circle_support(self.f), self.f.circumference)


class SpecialError(RingError):
    def __init__(self, message: str, step: int | None = None, **info):
        super().__init__(message)
        self.step = step
        self.info = info


def check_special(s: SpecialElement, nf: NuFamily, verify_word: bool = True) -> None:
    sup = circle_support(s.f)
    if any(p.meets(q) for p in sup for q in nf.supports[(s.i, s.j)]):
        raise SpecialError(f"Supp(f) meets Supp(nu_{s.i},{s.j})")
    if not is_I_small(hull(sup, nf.cfg.c), nf.family):
        raise SpecialError("Supp(f) is not I-small")
    if verify_word:
        target = s.f.then(nf.nu_inv(s.i, s.j))
        if nf.xmap(s.xword) != target:
            raise SpecialError("X-word does not realize f nu^-1")


def special_step(s: SpecialElement, letter: tuple[int, int], nf: NuFamily,
                 verify_word: bool = True) -> SpecialElement:
    """Replace f by f^g for a generator letter g = f_l^{+-1}."""
    l, e = letter
    if e == 0:
        return s
    cfg = nf.cfg
    g = cfg.f(l) if e > 0 else cfg.f(l).inverse()
    fg = g.inverse().then(s.f).then(g)
    if not is_I_small(hull(circle_support(fg), cfg.c), nf.family):
        raise SpecialError("precondition failed: Supp(f^g) is not I-small", letter=letter)
    sup = circle_support(s.f)
    if not any(p.meets(cfg.J(l)) for p in sup):
        out = SpecialElement(fg, s.i, s.j, s.xword)
    else:
        X = lambda a, b: Word.gen(xid(a, b))  # noqa: E731
        w = s.xword * X(s.i, l) * X(s.i, s.j).inverse()
        out = SpecialElement(fg, s.i, l, conjugate(w, X(l, l) ** e))
    check_special(out, nf, verify_word)
    return out


def seed_special(nf: NuFamily, i: int, j: int, k: int) -> SpecialElement:
    """nu_{i,j} nu_{i,k}^-1 = X_{i,k} X_{i,j}^-1."""
    X = lambda a, b: Word.gen(xid(a, b))  # noqa: E731
    return SpecialElement(nf.maps[(i, j)], i, k, X(i, k) * X(i, j).inverse())


# realization on an arc -----------------------------------------------------------------

@dataclass
class Realization:
    gamma: Word  # over X ids
    i: int
    s: int
    J: Arc
    route: Word
    l: int
    neighbourhood: Arc
    step_small: list[bool]
    verified: bool

    def to_json(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "i": self.i,
            "s": self.s,
            "J": self.J.to_json(),
            "route": str(self.route),
            "l": self.l,
            "neighbourhood": self.neighbourhood.to_json(),
            "step_small": self.step_small,
            "verified": self.verified,
        }


def realize_generator_on(nf: NuFamily, J: Arc, i: int, s: int, *, j: int | None = None,
                         depth: int = 4, l_cap: int = 256, radius_level: int = 40) -> Realization:
    """gamma in <X> with gamma = f_i^s on J, built by pushing a nu-seed along a route."""
    cfg = nf.cfg
    if J.full or J.empty:
        raise RingError("J must be a proper open arc")
    if s not in (1, -1):
        raise RingError("s must be +1 or -1")
    j = i if j is None else j
    L = nf.family.L[(i, j)]
    ks = [k for k in range(1, cfg.n + 1) if cfg.J(k).contains_arc(L)]
    if not ks:
        raise RingError(f"L_{i},{j} is not inside a single J_k")
    k = ks[0]
    router = Router(cfg)
    p = cfg.J(k).start
    route = route_point(router, p, J.complement(), depth)
    steps = route.steps()
    letters = [(int(g[1:]), e) for g, e in steps]

    # a neighbourhood of p whose images along the route stay I-small and land outside J
    target = J.complement()
    I = None
    for t in range(4, radius_level + 1):
        cand = Arc(p - Fraction(1, 2 ** t) * cfg.c, Fraction(2, 2 ** t) * cfg.c, cfg.c)
        ok = is_I_small(cand, nf.family)
        arc = cand
        for g, e in steps:
            if not ok:
                break
            arc = router.image(arc, Word.gen(g, e))
            ok = is_I_small(arc, nf.family)
        if ok and target.contains_arc(arc):
            I = cand
            break
    if I is None:
        raise SpecialError("no I-small neighbourhood follows the route", step=None)

    # conjugate the seed by powers of h = X_kk toward inf(J_k) until Supp lies in I
    seed = seed_special(nf, i, j, k)
    fk_inv = cfg.f(k).inverse()
    fk = cfg.f(k)
    gam = seed.f
    l = 0
    while not all(I.contains_arc(a) for a in circle_support(gam)):
        gam = fk.then(gam).then(fk_inv)
        l -= 1
        if -l > l_cap:
            raise SpecialError("seed never entered the neighbourhood", step=0, l_cap=l_cap)
    X = lambda a, b: Word.gen(xid(a, b))  # noqa: E731
    cur = SpecialElement(gam, i, k, conjugate(seed.xword, X(k, k) ** l))
    check_special(cur, nf, verify_word=False)

    small_flags = []
    for n_step, letter in enumerate(letters, start=1):
        try:
            cur = special_step(cur, letter, nf, verify_word=False)
        except SpecialError as exc:
            raise SpecialError(str(exc), step=n_step) from exc
        small_flags.append(is_I_small(cur.support(), nf.family))

    km = cur.j
    if s == -1:
        gamma = cur.xword * (X(i, i) * X(i, km) * X(i, i).inverse()).inverse()
    else:
        gamma = cur.xword.inverse() * X(i, km)
    realized = nf.xmap(gamma)
    want = cfg.f(i) if s > 0 else cfg.f(i).inverse()
    ok = circle_restrictions_agree(realized, want, J)
    return Realization(gamma, i, s, J, route, l, I, small_flags, ok)
