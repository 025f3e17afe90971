"""Lifted dynamics: winding of ring words, the torus action, translation-number probes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..plmap import PeriodizedMap
from ..scalar import Scalar, as_scalar, to_text
from ..word import GeneratorRegistry, Word, evaluate_word
from .arcs import mod
from .config import RingConfig, gid


def fixed_lift(cfg: RingConfig, i: int) -> PeriodizedMap:
    """The lift h_i of f_i that fixes the preimage of the complement of J_i."""
    lift = cfg.f(i).lift
    q = cfg.J(i).end_point
    d = lift(q) - q
    return lift.shift_value(-d) if d else lift


def lift_registry(cfg: RingConfig) -> GeneratorRegistry:
    reg = GeneratorRegistry()
    for i in range(1, cfg.n + 1):
        reg.register(gid(i), fixed_lift(cfg, i))
    return reg


def _trunc(q: Fraction) -> int:
    return int(q)  # Fraction.__int__ truncates toward zero


@dataclass
class WindingResult:
    base: Scalar
    displacement: Scalar
    winding: int
    reduced: Word
    orbit: list[Scalar]
    trace: list[str] = field(default_factory=list)
    final_avoids_endpoints: bool = True
    endpoint_hits: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "base": to_text(self.base),
            "displacement": to_text(self.displacement),
            "winding": self.winding,
            "reduced": str(self.reduced),
            "orbit": [to_text(p) for p in self.orbit],
            "trace": self.trace,
            "final_avoids_endpoints": self.final_avoids_endpoints,
            "endpoint_hits": self.endpoint_hits,
        }


def _orbit(cfg: RingConfig, x, steps) -> list[Scalar]:
    pts = [x]
    for i, e in steps:
        f = cfg.f(i) if e > 0 else cfg.f(i).inverse()
        pts.append(f(pts[-1]))
    return pts


def reduce_orbit_word(cfg: RingConfig, x, steps: list[tuple[int, int]]):
    """Delete fixed steps and backtracking pairs until none remain.

    Returns the surviving steps, their circle orbit, and a textual trace.
    """
    steps = list(steps)
    trace = []
    while True:
        pts = _orbit(cfg, x, steps)
        for t in range(1, len(pts)):
            if pts[t] == pts[t - 1]:
                trace.append(f"drop fixed step {t}: f{steps[t - 1][0]}^{steps[t - 1][1]}")
                del steps[t - 1]
                break
        else:
            for t in range(1, len(pts) - 1):
                if pts[t + 1] == pts[t - 1]:
                    trace.append(f"drop backtrack at {t},{t + 1}")
                    del steps[t - 1:t + 1]
                    break
            else:
                return steps, pts, trace


def lift_winding_check(cfg: RingConfig, w: Word, base=None) -> WindingResult:
    """Net number of circumferences the lifted orbit of inf(J_1) travels under w."""
    x = cfg.J(1).start if base is None else as_scalar(base)
    reg = lift_registry(cfg)
    y = evaluate_word(w, x, reg)
    disp = y - x
    winding = _trunc(disp / cfg.c)
    steps = [(int(g[1:]), e) for g, e in w.steps()]
    red, pts, trace = reduce_orbit_word(cfg, x, steps)
    ends = cfg.endpoints()
    hits = [t for t, p in enumerate(pts) if t > 0 and p in ends]
    avoids = not red or pts[-1] not in ends
    return WindingResult(x, disp, winding, Word((gid(i), e) for i, e in red), pts, trace,
                         avoids, hits)


# torus -----------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusPoint:
    x: Scalar
    y: Scalar

    def leaf(self, lam) -> Scalar:
        return self.y - lam * self.x

    def shift(self, a=0, b=0) -> "TorusPoint":
        return TorusPoint(self.x + a, self.y + b)

    def to_json(self) -> dict:
        return {"x": to_text(self.x), "y": to_text(self.y)}


class LeafInvariantBroken(AssertionError):
    pass


def torus_action(w: Word, which: int, p: TorusPoint, registry: GeneratorRegistry,
                 lam) -> TorusPoint:
    """(x, y).eta_1(g) = (x + (y.g - y)/lam, y.g);  (x, y).eta_2(g) = (x.g, y + lam (x.g - x))."""
    lam = as_scalar(lam)
    if which == 1:
        yg = evaluate_word(w, p.y, registry)
        out = TorusPoint(p.x + (yg - p.y) / lam, yg)
    elif which == 2:
        xg = evaluate_word(w, p.x, registry)
        out = TorusPoint(xg, p.y + lam * (xg - p.x))
    else:
        raise ValueError("which must be 1 or 2")
    if out.leaf(lam) != p.leaf(lam):
        raise LeafInvariantBroken(f"leaf y - lam x changed under eta_{which}")
    return out


def torus_commutes(w: Word, which: int, p: TorusPoint, registry, lam) -> bool:
    """eta_i(g) commutes with the unit translations of both coordinates at p."""
    base = torus_action(w, which, p, registry, lam)
    for a, b in ((1, 0), (0, 1), (-1, 0), (0, -1)):
        moved = torus_action(w, which, p.shift(a, b), registry, lam)
        if moved != base.shift(a, b):
            return False
    return True


# translation numbers -------------------------------------------------------------

@dataclass(frozen=True)
class TranslationEstimate:
    k: int
    estimate: Scalar
    lo: Scalar
    hi: Scalar

    @property
    def width(self) -> Scalar:
        return self.hi - self.lo

    def to_json(self) -> dict:
        return {"k": self.k, "estimate": to_text(self.estimate), "lo": to_text(self.lo),
                "hi": to_text(self.hi)}


def translation_number_estimate(w: Word, k: int, registry: GeneratorRegistry,
                                c=Fraction(1)) -> TranslationEstimate:
    """(0.w^k)/k with the enclosure +-c/k of the translation number of a lifted word."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = as_scalar(c)
    x = Fraction(0)
    for _ in range(k):
        x = evaluate_word(w, x, registry)
    est = x / k
    return TranslationEstimate(k, est, est - c / k, est + c / k)


def circle_point(x, c=Fraction(1)) -> Scalar:
    return mod(as_scalar(x), as_scalar(c))
