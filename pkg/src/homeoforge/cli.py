"""Command-line interface: ``homeoforge <group> <command> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 infeasible or
search exhausted.  Certificates are JSON on stdout (or ``--out``) with every
scalar in exact text form.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .gline import (
    GLambdaContext,
    InfeasibleError,
    build_fixing_advancer,
    build_surgery_chain,
    certify_stability,
    continuity_delta,
    find_synchronized_interval,
    repetitiveness_witness,
)
from .plmap import Interval, PLSegmentMap
from .ring import arcs as ring_arcs
from .ring.config import RingConfig, RingError, free_group_probe, synthesize_ring, verify_star
from .ring.dynamics import (
    TorusPoint,
    lift_registry,
    lift_winding_check,
    torus_action,
    torus_commutes,
    translation_number_estimate,
)
from .ring.small import (
    RoutingError,
    SpecialError,
    build_nu,
    build_small_family,
    nu_commutators_trivial,
    realize_generator_on,
    verify_X_identities,
)
from .scalar import PrecisionGuardExceeded, as_scalar, parse_scalar, to_text
from .thompson import bump
from .word import Word, evaluate_word, parse_word_file, restrict_word
from . import plot

OK, FAIL, USAGE, INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    inputs: list[str] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    exit_status: int | None = None
    seconds: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


# helpers --------------------------------------------------------------------------

def _scalar(text: str):
    try:
        return parse_scalar(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


class Output:
    def __init__(self, args, manifest: RunManifest):
        self.path = getattr(args, "out", None)
        self.manifest = manifest

    def write(self, text: str):
        if self.path:
            Path(self.path).write_text(text)
            self.manifest.outputs.append(self.path)
        else:
            sys.stdout.write(text)


def _read_input(path: str | None, manifest: RunManifest) -> str:
    if path and path != "-":
        manifest.inputs.append(path)
        return Path(path).read_text()
    manifest.inputs.append("<stdin>")
    return sys.stdin.read()


def _load_config(path, manifest) -> RingConfig:
    text = _read_input(path, manifest)
    try:
        return RingConfig.from_json(json.loads(text))
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad ring config: {exc}") from exc


def _word(args, manifest) -> Word:
    if getattr(args, "word", None):
        return Word.parse(args.word)
    if getattr(args, "word_file", None):
        manifest.inputs.append(args.word_file)
        return parse_word_file(Path(args.word_file).read_text())
    raise UsageError("a word is required (--word or --word-file)")


def _ctx(args) -> GLambdaContext:
    return GLambdaContext(args.lam)


def _window(args, default=("-5", "5")):
    w = args.window or [parse_scalar(t) for t in default]
    if not w[0] < w[1]:
        raise UsageError("window must satisfy lo < hi")
    return w[0], w[1]


# ring -----------------------------------------------------------------------------

def cmd_ring_synth(args, out, manifest):
    cfg = synthesize_ring(args.n, args.margin)
    out.write(_dump(cfg.to_json()))
    return OK


def cmd_ring_verify(args, out, manifest):
    cfg = _load_config(args.config, manifest)
    res = verify_star(cfg)
    doc = res.to_json()
    if cfg.n == 2 and res and args.depth:
        probe = free_group_probe(cfg, args.depth)
        doc["free_probe"] = {"words": probe.words_checked,
                             "counterexamples": [str(w) for w in probe.counterexamples]}
        if not probe.ok:
            out.write(_dump(doc))
            return FAIL
    out.write(_dump(doc))
    return OK if res else FAIL


def _nu_family(cfg, args):
    fam = build_small_family(cfg)
    return fam, build_nu(cfg, fam, depth=args.depth or 4)


def cmd_ring_nu(args, out, manifest):
    cfg = _load_config(args.config, manifest)
    if not verify_star(cfg):
        out.write(_dump(verify_star(cfg).to_json()))
        return FAIL
    fam, nf = _nu_family(cfg, args)
    comm = nu_commutators_trivial(nf)
    doc = {
        "family": fam.to_json(),
        "lambda": {f"{i},{j}": str(w) for (i, j), w in sorted(nf.lam.items())},
        "nu": {f"{i},{j}": str(w) for (i, j), w in sorted(nf.nu.items())},
        "supports": {f"{i},{j}": [a.to_json() for a in s] for (i, j), s in sorted(nf.supports.items())},
        "commutators_trivial": comm,
    }
    out.write(_dump(doc))
    return OK if comm else FAIL


def cmd_ring_X(args, out, manifest):
    cfg = _load_config(args.config, manifest)
    fam, nf = _nu_family(cfg, args)
    rep = verify_X_identities(nf)
    doc = {
        "X": {f"{i},{j}": str(w) for (i, j), w in sorted(nf.X_words().items())},
        "identities_checked": rep.checked,
        "failures": rep.failures,
    }
    out.write(_dump(doc))
    return OK if rep.ok else FAIL


def cmd_ring_realize(args, out, manifest):
    cfg = _load_config(args.config, manifest)
    fam, nf = _nu_family(cfg, args)
    a, b = args.interval
    J = ring_arcs.Arc(a, b - a, cfg.c)
    res = realize_generator_on(nf, J, args.index, args.sign, depth=args.depth or 4,
                               l_cap=args.l_cap)
    out.write(_dump(res.to_json()))
    return OK if res.verified else FAIL


def _random_reduced(rng, n, length):
    seq = []
    while len(seq) < length:
        letter = (rng.randint(1, n), rng.choice((1, -1)))
        if seq and seq[-1] == (letter[0], -letter[1]):
            continue
        seq.append(letter)
    return Word((f"f{i}", e) for i, e in seq)


def cmd_ring_winding(args, out, manifest):
    cfg = _load_config(args.config, manifest)
    if args.word:
        words = [Word.parse(args.word)]
    else:
        rng = random.Random(args.seed)
        words = [_random_reduced(rng, cfg.n, rng.randint(1, 8)) for _ in range(args.count)]
    reg = lift_registry(cfg)
    rows, ok = [], True
    for w in words:
        r = lift_winding_check(cfg, w)
        t = translation_number_estimate(w, args.k, reg, cfg.c) if w else None
        ok &= r.final_avoids_endpoints
        rows.append((w, r, t))
    if args.csv:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["word", "displacement", "winding", "reduced", "avoids_endpoints",
                     "k", "tn_estimate", "tn_lo", "tn_hi"])
        for w, r, t in rows:
            wr.writerow([str(w), to_text(r.displacement), r.winding, str(r.reduced),
                         r.final_avoids_endpoints, args.k,
                         to_text(t.estimate) if t else "0", to_text(t.lo) if t else "0",
                         to_text(t.hi) if t else "0"])
        out.write(buf.getvalue())
    else:
        out.write(_dump([dict(r.to_json(), word=str(w),
                              translation=t.to_json() if t else None) for w, r, t in rows]))
    return OK if ok else FAIL


# gline ------------------------------------------------------------------------------

def cmd_gline_delta(args, out, manifest):
    ctx = _ctx(args)
    w = _word(args, manifest)
    probes = args.probes or [Fraction(1, 2 ** k) for k in range(12, 0, -1)]
    rep = continuity_delta(w, args.epsilon, probes, ctx)
    out.write(_dump({"delta1": to_text(rep.delta1),
                     "rows": [{"delta": to_text(d), "distance": to_text(x), "passed": p}
                              for d, x, p in rep.rows]}))
    return OK


def cmd_gline_rept(args, out, manifest):
    lo, hi = _window(args, ("0", "100"))
    m, k = find_synchronized_interval(args.lam, args.epsilon, (lo, hi))
    out.write(_dump({"m": m, "k": k, "defect": to_text(abs(m - k * args.lam))}))
    return OK


def cmd_gline_repet(args, out, manifest):
    ctx = _ctx(args)
    w = _word(args, manifest)
    lo, hi = _window(args, ("-60", "60"))
    r = repetitiveness_witness(w, args.epsilon, (lo, hi), ctx)
    out.write(_dump({"m": r.m, "distance": to_text(r.distance), "candidates_checked": r.checked}))
    return OK


def cmd_gline_surgery(args, out, manifest):
    a, b = args.interval or (Fraction(1, 4), Fraction(1, 2))
    I = Interval.open(a, b)
    alpha = bump(*(args.bump or ((3 * a + b) / 4, (a + 3 * b) / 4)), 1)
    ch = build_surgery_chain(I, args.epsilon or Fraction(1, 16), args.x, args.y, alpha)
    clauses = ch.chain_clauses()
    doc = ch.to_json()
    doc["clauses"] = clauses
    out.write(_dump(doc))
    return OK if all(clauses.values()) else FAIL


def cmd_gline_zeta(args, out, manifest):
    ctx = _ctx(args)
    a, b = args.bump or (Fraction(1, 4), Fraction(1, 2))
    h = _word(args, manifest) if (args.word or args.word_file) else ctx.nu_word(bump(a, b, 1))
    lo, hi = args.interval or (Fraction(1, 8), Fraction(5, 8))
    window = _window(args, ("-5", "5"))
    cert = certify_stability(h, Interval.open(lo, hi), window, ctx)
    z = build_fixing_advancer(h, cert, ctx)
    out.write(_dump({
        "certificate": cert.to_json(),
        "zeta2_length": len(z.zeta2),
        "window": list(z.window),
        "fixes_integers": z.fixes_integers,
        "advancing": z.advancing,
        "failures": [[k, n, to_text(v)] for k, n, v in z.failures],
    }))
    return OK if z.ok else FAIL


# word -------------------------------------------------------------------------------

def cmd_word_eval(args, out, manifest):
    ctx = _ctx(args)
    w = _word(args, manifest)
    out.write(_dump({"x": to_text(args.x), "value": to_text(evaluate_word(w, args.x, ctx.registry))}))
    return OK


def cmd_word_restrict(args, out, manifest):
    ctx = _ctx(args)
    w = _word(args, manifest)
    lo, hi = _window(args, ("0", "1"))
    seg = restrict_word(w, (lo, hi), ctx.registry)
    out.write(_dump({"breaks": [[to_text(x), to_text(y)] for x, y in seg.breaks]}))
    return OK


def cmd_word_idcheck(args, out, manifest):
    ctx = _ctx(args)
    w = _word(args, manifest)
    lo, hi = _window(args, ("-2", "2"))
    seg = restrict_word(w, (lo, hi), ctx.registry)
    ident = seg.is_identity()
    doc = {"identity": ident, "window": [to_text(lo), to_text(hi)]}
    if not ident:
        x = next(x for x, y in seg.breaks if x != y)
        doc["witness"] = {"x": to_text(x), "value": to_text(seg(x))}
    out.write(_dump(doc))
    return OK if ident else FAIL


# torus -------------------------------------------------------------------------------

def cmd_torus_act(args, out, manifest):
    ctx = _ctx(args)
    w = _word(args, manifest)
    p = TorusPoint(args.px, args.py)
    q = torus_action(w, args.which, p, ctx.registry, args.lam)
    out.write(_dump({"in": p.to_json(), "out": q.to_json(), "leaf": to_text(q.leaf(args.lam))}))
    return OK


def cmd_torus_check(args, out, manifest):
    ctx = _ctx(args)
    rng = random.Random(args.seed)
    gens = ["x0", "x1", "rot", "c1"]
    bad = []
    for t in range(args.count):
        w = Word((rng.choice(gens), rng.choice((1, -1))) for _ in range(rng.randint(1, 6)))
        p = TorusPoint(Fraction(rng.randint(-64, 64), 16), Fraction(rng.randint(-64, 64), 16))
        for which in (1, 2):
            if not torus_commutes(w, which, p, ctx.registry, args.lam):
                bad.append({"trial": t, "word": str(w), "which": which, "point": p.to_json()})
    out.write(_dump({"trials": args.count, "failures": bad}))
    return OK if not bad else FAIL


# plots ---------------------------------------------------------------------------------

def _arcs_float(cfg):
    c = float(cfg.c)
    return [(float(a.start) / c, float(a.length) / c) for a in cfg.intervals]


def cmd_plot_map(args, out, manifest):
    ctx = _ctx(args)
    w = _word(args, manifest)
    lo, hi = _window(args, ("0", "1"))
    seg = restrict_word(w, (lo, hi), ctx.registry)
    out.write(plot.map_svg(seg, str(w) or "identity"))
    return OK


def cmd_plot_ring(args, out, manifest):
    cfg = _load_config(args.config, manifest)
    c = float(cfg.c)
    pts = [(float(x) / c, f"x{i}") for i, x in enumerate(cfg.marked_points, 1)]
    out.write(plot.ring_svg(_arcs_float(cfg), pts, f"{cfg.n}-ring"))
    return OK


def cmd_plot_orbit(args, out, manifest):
    cfg = _load_config(args.config, manifest)
    w = Word.parse(args.word) if args.word else Word((f"f{i}", 1) for i in range(1, cfg.n + 1))
    r = lift_winding_check(cfg, w)
    c = float(cfg.c)
    out.write(plot.orbit_svg(_arcs_float(cfg), [float(p) / c for p in r.orbit], str(w)))
    return OK


# parser ---------------------------------------------------------------------------------

def _common(p):
    p.add_argument("--lambda", dest="lam", type=_scalar, default=parse_scalar("1+sqrt2"),
                   help="lambda as a+b√d text (default 1+sqrt2)")
    p.add_argument("--epsilon", type=_scalar)
    p.add_argument("--window", type=_scalar, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--depth", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the artifact here instead of stdout")
    p.add_argument("--manifest", help="write a run manifest JSON here")


def _wordargs(p):
    p.add_argument("--word", help="word text, e.g. 'x0bar^2 rotlam^-1'")
    p.add_argument("--word-file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homeoforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True)

    ring = groups.add_parser("ring").add_subparsers(dest="cmd", required=True)
    p = ring.add_parser("synth")
    _common(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--margin", type=_scalar)
    p.set_defaults(func=cmd_ring_synth)
    for name, func in (("verify", cmd_ring_verify), ("nu", cmd_ring_nu), ("X", cmd_ring_X),
                       ("realize", cmd_ring_realize), ("winding", cmd_ring_winding)):
        p = ring.add_parser(name)
        _common(p)
        p.add_argument("config", nargs="?", default="-", help="RingConfig JSON (default stdin)")
        p.set_defaults(func=func)
        if name == "realize":
            p.add_argument("--interval", type=_scalar, nargs=2, required=True, metavar=("A", "B"))
            p.add_argument("--index", type=int, default=1)
            p.add_argument("--sign", type=int, choices=(1, -1), default=-1)
            p.add_argument("--l-cap", type=int, default=256)
        if name == "winding":
            p.add_argument("--word")
            p.add_argument("--count", type=int, default=20)
            p.add_argument("-k", type=int, default=16, help="iterations for the translation estimate")
            p.add_argument("--csv", action="store_true")

    gl = groups.add_parser("gline").add_subparsers(dest="cmd", required=True)
    for name, func in (("delta", cmd_gline_delta), ("rept", cmd_gline_rept),
                       ("repet", cmd_gline_repet), ("surgery", cmd_gline_surgery),
                       ("zeta", cmd_gline_zeta)):
        p = gl.add_parser(name)
        _common(p)
        _wordargs(p)
        p.set_defaults(func=func)
        if name == "delta":
            p.add_argument("--probes", type=_scalar, nargs="+")
        if name in ("surgery", "zeta"):
            p.add_argument("--interval", type=_scalar, nargs=2, metavar=("A", "B"))
            p.add_argument("--bump", type=_scalar, nargs=2, metavar=("A", "B"))
        if name == "surgery":
            p.add_argument("--x", type=_scalar, default=Fraction(1, 8))
            p.add_argument("--y", type=_scalar, default=Fraction(3, 4))

    wd = groups.add_parser("word").add_subparsers(dest="cmd", required=True)
    for name, func in (("eval", cmd_word_eval), ("restrict", cmd_word_restrict),
                       ("idcheck", cmd_word_idcheck)):
        p = wd.add_parser(name)
        _common(p)
        _wordargs(p)
        p.set_defaults(func=func)
        if name == "eval":
            p.add_argument("--x", type=_scalar, required=True)

    tor = groups.add_parser("torus").add_subparsers(dest="cmd", required=True)
    p = tor.add_parser("act")
    _common(p)
    _wordargs(p)
    p.add_argument("--which", type=int, choices=(1, 2), default=1)
    p.add_argument("--px", type=_scalar, default=Fraction(0))
    p.add_argument("--py", type=_scalar, default=Fraction(0))
    p.set_defaults(func=cmd_torus_act)
    p = tor.add_parser("check")
    _common(p)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_torus_check)

    pl = groups.add_parser("plot").add_subparsers(dest="cmd", required=True)
    p = pl.add_parser("map")
    _common(p)
    _wordargs(p)
    p.set_defaults(func=cmd_plot_map)
    for name, func in (("ring", cmd_plot_ring), ("orbit", cmd_plot_orbit)):
        p = pl.add_parser(name)
        _common(p)
        p.add_argument("config", nargs="?", default="-")
        if name == "orbit":
            p.add_argument("--word")
        p.set_defaults(func=func)
    return parser


def _params(args) -> dict:
    skip = {"func", "group", "cmd", "out", "manifest", "config", "word_file"}
    out = {}
    for k, v in vars(args).items():
        if k in skip or v is None:
            continue
        if isinstance(v, (list, tuple)):
            v = [to_text(x) if not isinstance(x, (int, str, bool)) else x for x in v]
        elif not isinstance(v, (int, str, bool)):
            v = to_text(as_scalar(v))
        out[k] = v
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    manifest = RunManifest(f"{args.group} {args.cmd}", parameters=_params(args))
    out = Output(args, manifest)
    t0 = time.perf_counter()
    try:
        code = args.func(args, out, manifest)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        code = USAGE
    except (InfeasibleError, RoutingError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        code = INFEASIBLE
    except SpecialError as exc:
        print(f"verification failed at step {exc.step}: {exc}", file=sys.stderr)
        code = FAIL
    except (RingError, PrecisionGuardExceeded, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = USAGE
    manifest.exit_status = code
    manifest.seconds = round(time.perf_counter() - t0, 3)
    if getattr(args, "manifest", None):
        Path(args.manifest).write_text(_dump(manifest.to_json()))
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
