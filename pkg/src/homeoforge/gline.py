"""Constructions in G_lambda = <T-bar, T-bar_lambda> acting on the line.

Existence statements proved by continuity (perturbation, repetitiveness) are
turned into probe-and-verify routines; every returned object carries exact
verification of the clauses it claims.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .plmap import (
    Interval,
    PLSegmentMap,
    is_eps_advancing,
    sup_distance,
    support_in,
    translated_compare,
)
from .scalar import SILVER, Scalar, as_scalar, continued_fraction, floor, to_text
from .thompson import (
    bump,
    center_element,
    f_generator,
    f_transport,
    is_dyadic,
    lift_rotation,
    nu_embed,
    validate_thompson,
)
from .word import (
    GeneratorRegistry,
    Word,
    commutator,
    conjugate,
    evaluate_word,
    restrict_word,
    translation_id,
)

ONE = Fraction(1)


class InfeasibleError(RuntimeError):
    """A bounded search or geometric construction could not be completed."""

    def __init__(self, message, **info):
        super().__init__(message)
        self.info = info


# context ------------------------------------------------------------------

def glambda_registry(lam: Scalar = SILVER) -> GeneratorRegistry:
    """Lifts of x0, x1, rotation 1/2 and the center generator at scales 1 and lambda."""
    lam = as_scalar(lam)
    if lam <= 1 or not hasattr(lam, "b"):
        raise ValueError("lambda must be an irrational quadratic scalar > 1")
    reg = GeneratorRegistry(lam)
    x0, x1 = f_generator(0), f_generator(1)
    for suffix, c in (("", ONE), ("lam", lam)):
        reg.register(f"x0{suffix}", nu_embed(x0, c))
        reg.register(f"x1{suffix}", nu_embed(x1, c))
        reg.register(f"rot{suffix}", lift_rotation(c, Fraction(1, 2)))
    reg.register("c1", center_element(ONE, 1))
    reg.register("clam", center_element(lam, 1))
    for name in ("x0", "x1", "rot"):
        reg.register(f"{name}bar", reg.get(name))
    return reg


@dataclass
class GLambdaContext:
    lam: Scalar = SILVER
    registry: GeneratorRegistry = None

    def __post_init__(self):
        self.lam = as_scalar(self.lam)
        if self.registry is None:
            self.registry = glambda_registry(self.lam)

    def is_lambda_letter(self, gid: str) -> bool:
        return self.registry.period(gid) == self.lam

    def register_nu(self, f: PLSegmentMap, c=ONE) -> str:
        """Register nu(f) under a content-derived id and return the id."""
        digest = hashlib.sha1(repr(f.breaks).encode()).hexdigest()[:10]
        gid = f"nu{'lam' if c != 1 else ''}#{digest}"
        self.registry.register(gid, nu_embed(f, c))
        return gid

    def nu_word(self, f: PLSegmentMap) -> Word:
        return Word.gen(self.register_nu(f))

    def restrict(self, w: Word, lo, hi) -> PLSegmentMap:
        return restrict_word(w, (lo, hi), self.registry)

    def __call__(self, w: Word, x) -> Scalar:
        return evaluate_word(w, x, self.registry)


class WordMap:
    """Adapter giving a word the ``restrict`` interface of a map."""

    def __init__(self, w: Word, ctx: GLambdaContext):
        self.word, self.ctx = w, ctx

    def restrict(self, lo, hi):
        return self.ctx.restrict(self.word, lo, hi)

    def __call__(self, x):
        return self.ctx(self.word, x)


# perturbation continuity ------------------------------------------------

def perturb_word(w: Word, delta, ctx: GLambdaContext) -> Word:
    """Replace every T-bar_lambda letter v by f_d^-1 v f_d with x . f_d = x + d."""
    delta = as_scalar(delta)
    if delta == 0:
        return w
    t = translation_id(delta)
    out = []
    for g, e in w.letters:
        if ctx.is_lambda_letter(g):
            out += [(t, -1), (g, e), (t, 1)]
        else:
            out.append((g, e))
    return Word(out)


@dataclass
class DeltaReport:
    delta1: Scalar
    rows: list  # (delta, distance, passed)


def continuity_delta(w: Word, eps, probes, ctx: GLambdaContext) -> DeltaReport:
    eps = as_scalar(eps)
    base = ctx.restrict(w, 0, 1)
    rows = []
    for d in sorted((as_scalar(p) for p in probes), key=abs):
        dist = sup_distance(base, ctx.restrict(perturb_word(w, d, ctx), 0, 1), (0, 1))[0]
        rows.append((d, dist, dist < eps))
    delta1 = None
    for d, _, ok in rows:
        if not ok:
            break
        delta1 = abs(d)
    if delta1 is None:
        raise InfeasibleError("no probe satisfied epsilon", rows=rows)
    return DeltaReport(delta1, rows)


# synchronized periods -----------------------------------------------------

def synchronization_length(lam, eps) -> int:
    """A length N such that any interval longer than N holds [m, m+1] with 0 < |m - k lam| < eps, k != 0.

    With p/q the first convergent with |q lam - p| < eps and q' the next
    denominator, the points k lam mod 1 over any q + q' consecutive k have
    gaps at most |q lam - p| (two-distance case of the three-distance
    theorem), so every such block of k hits (-eps, eps).
    """
    lam, eps = as_scalar(lam), as_scalar(eps)
    depth = 4
    while True:
        cf = continued_fraction(lam, depth)
        conv = cf.convergents()
        for j in range(len(conv) - 1):
            p, q = conv[j].numerator, conv[j].denominator
            if abs(q * lam - p) < eps:
                kblock = q + conv[j + 1].denominator
                return floor(lam * (2 * kblock + 1)) + 4
        depth *= 2


def find_synchronized_interval(lam, eps, I) -> tuple[int, int]:
    """Least m with [m, m+1] inside I and |m - k lam| < eps for some k != 0."""
    lam, eps = as_scalar(lam), as_scalar(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    lo, hi = (I.lo, I.hi) if isinstance(I, Interval) else (as_scalar(I[0]), as_scalar(I[1]))
    m = -floor(-lo)
    while m + 1 <= hi:
        k = floor(m / lam + Fraction(1, 2))
        if k != 0 and abs(m - k * lam) < eps:
            return m, k
        m += 1
    need = synchronization_length(lam, eps)
    raise InfeasibleError(
        f"no synchronized unit interval in [{lo}, {hi}]; intervals longer than {need} always contain one",
        required_length=need,
    )


def _sync_defect(m: int, lam) -> Scalar:
    k = floor(m / lam + Fraction(1, 2))
    return abs(m - k * lam)


# repetitiveness -------------------------------------------------------------

@dataclass
class RepetWitness:
    m: int
    distance: Scalar
    checked: int


def repetitiveness_witness(w: Word, eps, window, ctx: GLambdaContext, max_candidates: int = 200) -> RepetWitness:
    """An integer m with [m, m+1] in the window and d_w([0,1], [m,m+1]) < eps.

    Candidates are ordered by how well m synchronizes with lambda Z, then
    verified exactly.
    """
    eps = as_scalar(eps)
    lo, hi = (window.lo, window.hi) if isinstance(window, Interval) else (as_scalar(window[0]), as_scalar(window[1]))
    ms = [m for m in range(-floor(-lo), floor(hi)) if m != 0]
    ms.sort(key=lambda m: (_sync_defect(m, ctx.lam), abs(m)))
    best = None
    g = WordMap(w, ctx)
    for count, m in enumerate(ms[:max_candidates], 1):
        d = translated_compare(g, (0, 1), (m, m + 1))
        if d < eps:
            return RepetWitness(m, d, count)
        if best is None or d < best[1]:
            best = (m, d)
    raise InfeasibleError("no witness in window", best=best)


# support localization -----------------------------------------------------

def _integer_range(lo, hi) -> range:
    return range(floor(lo) - 1, floor(hi) + 2)


def translates_disjoint(w: Word, I: Interval, window, ctx: GLambdaContext) -> list:
    """Overlaps (n, m) with (n+I) . w meeting m+I, for n+I inside the window."""
    lo, hi = window
    bad = []
    for n in _integer_range(lo, hi):
        if n + I.lo < lo or n + I.hi > hi:
            continue
        a, b = ctx(w, n + I.lo), ctx(w, n + I.hi)
        for m in _integer_range(a, b):
            if a < m + I.hi and m + I.lo < b:
                bad.append((n, m))
    return bad


def supported_in_translates(seg: PLSegmentMap, J: Interval) -> list:
    """Support intervals of seg not inside any n + J."""
    bad = []
    for S in support_in(seg, (seg.lo, seg.hi)):
        n = floor(S.lo - J.lo)
        if not (S.lo >= n + J.lo and S.hi <= n + J.hi):
            bad.append(S)
    return bad


@dataclass
class LocalizeResult:
    h: Word
    ok: bool
    overlaps: list
    stray_support: list
    nontrivial: bool


def localize_support(g: Word, J: Interval, I: Interval, f1: PLSegmentMap, f2: PLSegmentMap,
                     window, ctx: GLambdaContext) -> LocalizeResult:
    """h = [nu(f1), [nu(f2), g^-1]] with support verified inside the translates of J."""
    if not (J.lo <= I.lo and I.hi <= J.hi and 0 < J.lo and J.hi < 1):
        raise ValueError("need I inside J inside (0, 1)")
    for f in (f1, f2):
        for S in support_in(f, (0, 1)):
            if S.lo < I.lo or S.hi > I.hi:
                raise ValueError("bumps must be supported in I")
    lo, hi = (as_scalar(t) for t in window)
    overlaps = translates_disjoint(g, I, (lo, hi), ctx)
    h = commutator(ctx.nu_word(f1), commutator(ctx.nu_word(f2), g.inverse()))
    if overlaps:
        return LocalizeResult(h, False, overlaps, [], False)
    seg = ctx.restrict(h, lo, hi)
    stray = supported_in_translates(seg, J)
    return LocalizeResult(h, not stray, [], stray, not seg.is_identity())


def gadget_identity(g: Word, h1: Word, h2: Word, window, registry: GeneratorRegistry) -> bool:
    """[h1, [h2, g^-1]] == [h1, h2] as restrictions to the window."""
    lhs = restrict_word(commutator(h1, commutator(h2, g.inverse())), window, registry)
    rhs = restrict_word(commutator(h1, h2), window, registry)
    return lhs == rhs


# stability certificates ---------------------------------------------------

@dataclass
class StabilityCertificate:
    element: Word
    interval: Interval
    N: int
    model: PLSegmentMap
    window: tuple
    witnesses: list

    def to_json(self) -> dict:
        return {
            "element": str(self.element),
            "interval": [to_text(self.interval.lo), to_text(self.interval.hi)],
            "N": self.N,
            "model": {"breaks": [[to_text(x), to_text(y)] for x, y in self.model.breaks]},
            "window": [to_text(as_scalar(t)) for t in self.window],
            "witnesses": self.witnesses,
        }


def aligned_gap(ms: list[int], lo: int, hi: int) -> int:
    """Least N such that every [a, a+N] (integer a) inside [lo, hi] contains some [m, m+1]."""
    ms = sorted(ms)
    gaps = [ms[0] - lo + 1, hi - ms[-1]]
    gaps += [b - a for a, b in zip(ms, ms[1:])]
    return max(1, *gaps)


def certify_stability(h: Word, I: Interval, window, ctx: GLambdaContext) -> StabilityCertificate:
    lo, hi = (int(as_scalar(t)) for t in window)
    seg = ctx.restrict(h, lo, hi)
    stray = supported_in_translates(seg, I)
    if stray:
        raise InfeasibleError("element not supported in the translates of I", stray=stray)
    units: dict[PLSegmentMap, list[int]] = {}
    for m in range(lo, hi):
        units.setdefault(seg.restrict(m, m + 1).shift(-m), []).append(m)
    best = None
    for model, ms in units.items():
        if model.is_identity() and len(units) > 1:
            continue
        if not validate_thompson(model):
            continue
        N = aligned_gap(ms, lo, hi)
        if N > hi - lo:
            continue
        key = (N, -len(ms))
        if best is None or key < best[0]:
            best = (key, model, ms, N)
    if best is None:
        raise InfeasibleError("no N <= window length works")
    _, model, ms, N = best
    return StabilityCertificate(h, I, N, model, (lo, hi), ms)


def regular_element(f: Word, g1: PLSegmentMap, g2: PLSegmentMap, ctx: GLambdaContext) -> Word:
    """h = [nu(g1), [nu(g2), f^-1]]."""
    return commutator(ctx.nu_word(g1), commutator(ctx.nu_word(g2), f.inverse()))


# surgery chains -------------------------------------------------------------

def _dyadic_above(x, level: int) -> Fraction:
    w = Fraction(1, 2 ** level)
    return (floor(x / w) + 1) * w


def _dyadic_below(x, level: int) -> Fraction:
    w = Fraction(1, 2 ** level)
    return (-floor(-x / w) - 1) * w


def _power(seg: PLSegmentMap, n: int) -> PLSegmentMap:
    out = PLSegmentMap.identity(seg.lo, seg.hi)
    step = seg if n >= 0 else seg.inverse()
    for _ in range(abs(n)):
        out = out.then(step)
    return out


def conjugate_map(a: PLSegmentMap, g: PLSegmentMap) -> PLSegmentMap:
    """a^g = g^-1 a g under the right action."""
    return g.inverse().then(a).then(g)


@dataclass
class SurgeryChain:
    conjugators: list[PLSegmentMap]
    exponents: list[int]
    intervals: list[Interval]
    eps: Scalar
    x: Scalar
    y: Scalar
    support: Interval
    grid_level: int
    h: PLSegmentMap = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return len(self.conjugators)

    def product(self, beta: PLSegmentMap, exponents=None) -> PLSegmentMap:
        exps = self.exponents if exponents is None else exponents
        out = PLSegmentMap.identity(0, 1)
        for g, l in zip(self.conjugators, exps):
            if l:
                out = out.then(_power(conjugate_map(beta, g), l))
        return out

    def chain_clauses(self) -> dict[str, bool]:
        J = self.intervals
        overlap = all(J[i].lo < J[i + 1].lo < J[i].hi < J[i + 1].hi for i in range(len(J) - 1))
        gap = all(J[i].hi < J[i + 2].lo for i in range(len(J) - 2))
        return {
            "consecutive_overlap": overlap,
            "distance_two_gap": gap,
            "short_intervals": all(j.length < self.eps for j in J),
            "x_in_first": self.x in J[0],
            "y_in_last": self.y in J[-1],
            "x_moved_past_y": self.h(self.x) > self.y,
        }

    def to_json(self) -> dict:
        return {
            "eps": to_text(self.eps),
            "x": to_text(self.x),
            "y": to_text(self.y),
            "grid_level": self.grid_level,
            "exponents": self.exponents,
            "intervals": [[to_text(j.lo), to_text(j.hi)] for j in self.intervals],
            "conjugators": [{"breaks": [[to_text(a), to_text(b)] for a, b in g.breaks]} for g in self.conjugators],
        }


def build_surgery_chain(I: Interval, eps, x, y, alpha: PLSegmentMap, max_level: int = 24) -> SurgeryChain:
    eps, x, y = as_scalar(eps), as_scalar(x), as_scalar(y)
    if not (0 < I.lo and I.hi < 1):
        raise ValueError("I must have closure inside (0, 1)")
    if not (0 < x < y < 1) or eps <= 0:
        raise ValueError("need 0 < x < y < 1 and eps > 0")
    comps = support_in(alpha, (0, 1))
    if not comps:
        raise InfeasibleError("alpha is the identity; no exponents can move x")
    for S in comps:
        if S.lo < I.lo or S.hi > I.hi:
            raise ValueError("alpha must be supported in I")
    K = comps[0]
    mid = K.mid
    direction = 1 if alpha(mid) > mid else -1
    beta = alpha if direction > 0 else alpha.inverse()

    # dyadic anchor points a < inf I, p < p' < r' < q, sup I < b
    t = 1
    while True:
        pp, rr = _dyadic_above(K.lo, t), _dyadic_below(K.hi, t)
        a, b = _dyadic_below(I.lo, t), _dyadic_above(I.hi, t)
        if pp < rr and a > 0 and b < 1:
            break
        t += 1
        if t > 60:
            raise InfeasibleError("no dyadic anchors inside the support", level=t)

    l0, u = 0, pp
    while u <= rr:
        u = beta(u)
        l0 += 1
        if l0 > 100000:
            raise InfeasibleError("alpha pushes too slowly", iterations=l0)

    k = 2
    while Fraction(4, 2 ** k) >= eps:
        k += 1
    while k <= max_level:
        w = Fraction(1, 2 ** k)
        t1 = (floor(x / w) - 1) * w
        if t1 > 0:
            starts = [t1]
            while starts[-1] + 3 * w < y:
                starts.append(starts[-1] + 2 * w)
            if starts[-1] + 4 * w < 1:
                break
        k += 1
    else:
        raise InfeasibleError("eps too small for the dyadic grid", finest_level=max_level)

    conjugators, intervals = [], []
    for s in starts:
        g = f_transport([a, pp, rr, b], [s, s + w, s + 3 * w, s + 4 * w])
        conjugators.append(g)
        intervals.append(Interval.open(g(I.lo), g(I.hi)))
    chain = SurgeryChain(conjugators, [direction * l0] * len(starts), intervals, eps, x, y, I, k)
    chain.h = chain.product(alpha)
    if not chain.h(x) > y:
        raise InfeasibleError("constructed chain does not move x past y", level=k)
    return chain


def random_bump_in(I: Interval, rng: random.Random) -> PLSegmentMap:
    """A random element of F supported in a dyadic subinterval of I."""
    level = 3
    while True:
        lo, hi = _dyadic_above(I.lo, level), _dyadic_below(I.hi, level)
        if lo < hi:
            break
        level += 1
    w = Fraction(1, 2 ** (level + 2))
    cells = int((hi - lo) / w)
    i = rng.randrange(cells)
    j = rng.randrange(i + 1, cells + 1)
    power = rng.choice([-3, -2, -1, 1, 2, 3])
    return bump(lo + i * w, lo + j * w, power, rng.choice([0, 1]))


def check_substitutions(chain: SurgeryChain, betas, exponent_tuples) -> list:
    """Every (beta, exponents) whose substituted product fails eps-advancing."""
    failures = []
    for bi, beta in enumerate(betas):
        for exps in exponent_tuples:
            ok, wit = is_eps_advancing(chain.product(beta, exps), (0, 1), chain.eps)
            if not ok:
                failures.append((bi, tuple(exps), wit))
    return failures


# the fixing advancer ------------------------------------------------------

@dataclass
class ZetaResult:
    zeta1: Word
    zeta2: Word
    chain: SurgeryChain | None
    window: tuple
    fixes_integers: bool
    advancing: bool
    failures: list
    notes: list

    @property
    def ok(self) -> bool:
        return self.fixes_integers and self.advancing


def build_fixing_advancer(h: Word, cert: StabilityCertificate, ctx: GLambdaContext, window=None) -> ZetaResult:
    """zeta_2 fixing Z pointwise with (1/4 + n) . zeta_2 > 1/2 + n on the window."""
    notes = ["integer-translation conjugators use t -> t + k"]
    N = cert.N
    if window is None:
        window = (-(N + 4), N + 4)
    lo, hi = (int(as_scalar(t)) for t in window)
    m0 = min(cert.witnesses, key=abs)
    shifted = h
    if m0:
        t = translation_id(m0)
        shifted = Word([(t, 1)]) * h * Word([(t, -1)])
    chain = None
    zeta1 = Word()
    if not cert.model.is_identity():
        chain = build_surgery_chain(cert.interval, Fraction(1, 8 * N), Fraction(1, 8), Fraction(3, 4), cert.model)
        for g, l in zip(chain.conjugators, chain.exponents):
            zeta1 = zeta1 * conjugate(shifted, ctx.nu_word(g)) ** l
    zeta2 = Word()
    for k in range(N + 1):
        zeta2 = zeta2 * conjugate(zeta1, Word.gen(translation_id(k))) if k else zeta2 * zeta1
    failures = []
    fixes = True
    for n in range(lo, hi + 1):
        v = ctx(zeta2, n)
        if v != n:
            fixes = False
            failures.append(("fix", n, v))
    adv = True
    for n in range(lo, hi):
        v = ctx(zeta2, Fraction(1, 4) + n)
        if not v > Fraction(1, 2) + n:
            adv = False
            failures.append(("advance", n, v))
    return ZetaResult(zeta1, zeta2, chain, (lo, hi), fixes, adv, failures, notes)


def is_dyadic_interval(I: Interval) -> bool:
    return is_dyadic(I.lo) and is_dyadic(I.hi)
