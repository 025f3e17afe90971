"""Hand-written SVG figures.

Floats appear only here, at the final rendering step; nothing computed from
them flows back into the exact kernel.
"""
from __future__ import annotations

import math
from typing import Iterable

from .plmap import PLSegmentMap

W, H, PAD = 480, 480, 40
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _doc(body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">')
    return "\n".join([head, f"<title>{title}</title>",
                      f'<rect width="{W}" height="{H}" fill="white"/>', *body, "</svg>", ""])


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def map_svg(seg: PLSegmentMap, title: str = "map") -> str:
    """Graph of a PL segment map with the diagonal for reference."""
    xs = [float(x) for x, _ in seg.breaks]
    ys = [float(y) for _, y in seg.breaks]
    lo, hi = min(xs + ys), max(xs + ys)
    span = hi - lo or 1.0

    def px(v):
        return PAD + (v - lo) / span * (W - 2 * PAD)

    def py(v):
        return H - PAD - (v - lo) / span * (H - 2 * PAD)

    pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
    body = [
        f'<line x1="{_fmt(px(lo))}" y1="{_fmt(py(lo))}" x2="{_fmt(px(hi))}" y2="{_fmt(py(hi))}" '
        'stroke="#bbb" stroke-dasharray="4 3"/>',
        f'<polyline points="{pts}" fill="none" stroke="{COLORS[0]}" stroke-width="2"/>',
    ]
    body += [f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="2.5" fill="{COLORS[1]}"/>'
             for x, y in zip(xs, ys)]
    return _doc(body, title)


def _polar(t: float, r: float) -> tuple[float, float]:
    a = 2 * math.pi * t - math.pi / 2
    return W / 2 + r * math.cos(a), H / 2 + r * math.sin(a)


def ring_svg(arcs: Iterable[tuple[float, float]], points: Iterable[tuple[float, str]] = (),
             title: str = "ring") -> str:
    """Circle arcs (start, length) as fractions of the circumference, on nested radii."""
    body = []
    r0 = W / 2 - PAD
    body.append(f'<circle cx="{W / 2}" cy="{H / 2}" r="{_fmt(r0)}" fill="none" stroke="#ccc"/>')
    for k, (start, length) in enumerate(arcs):
        r = r0 - 14 * (k + 1)
        x1, y1 = _polar(start, r)
        x2, y2 = _polar(start + length, r)
        large = 1 if length > 0.5 else 0
        body.append(
            f'<path d="M {_fmt(x1)} {_fmt(y1)} A {_fmt(r)} {_fmt(r)} 0 {large} 1 {_fmt(x2)} {_fmt(y2)}" '
            f'fill="none" stroke="{COLORS[k % len(COLORS)]}" stroke-width="6" stroke-opacity="0.7"/>')
        lx, ly = _polar(start + length / 2, r - 14)
        body.append(f'<text x="{_fmt(lx)}" y="{_fmt(ly)}" font-size="11">J{k + 1}</text>')
    for t, label in points:
        x, y = _polar(t, r0)
        body.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3.5" fill="black"/>')
        if label:
            lx, ly = _polar(t, r0 + 14)
            body.append(f'<text x="{_fmt(lx)}" y="{_fmt(ly)}" font-size="10">{label}</text>')
    return _doc(body, title)


def orbit_svg(arcs, orbit: list[float], title: str = "orbit") -> str:
    """Ring diagram with an orbit drawn as chords between consecutive points."""
    base = ring_svg(arcs, [(t, str(k)) for k, t in enumerate(orbit)], title)
    r0 = W / 2 - PAD
    chords = []
    for a, b in zip(orbit, orbit[1:]):
        x1, y1 = _polar(a, r0)
        x2, y2 = _polar(b, r0)
        chords.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                      'stroke="black" stroke-width="1" marker-end="none"/>')
    return base.replace("</svg>", "\n".join(chords) + "\n</svg>")
