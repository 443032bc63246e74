"""Command-line front end: ``startile constants|locate|verify|render|net``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .config import TilingConfig, build_tiling
from .constants import compute_K_bound
from .errors import ConfigError, HypothesisViolated, Infeasible
from .planar import TemplateConstants, Variant, make_template

EXIT_OK, EXIT_CHECKS, EXIT_INFEASIBLE, EXIT_DIMENSION, EXIT_WRITE = 0, 1, 2, 3, 4


def _pair(text: str, sep: str = ":") -> tuple[str, str]:
    left, _, right = text.partition(sep)
    if not right:
        raise argparse.ArgumentTypeError(f"expected two values separated by {sep!r}: {text!r}")
    return left, right


def _plane(text: str) -> tuple[int, int]:
    i, j = (int(v) for v in _pair(text))
    if i == j or min(i, j) < 1:
        raise argparse.ArgumentTypeError("plane needs two distinct 1-based axes")
    return i - 1, j - 1


def _bbox(text: str) -> tuple[float, float]:
    lo, hi = (float(v) for v in _pair(text))
    if not lo < hi:
        raise argparse.ArgumentTypeError("bbox needs lo < hi")
    return lo, hi


def _number(text: str) -> Fraction:
    """Exact value of ``1.3``, ``2/15`` or ``0.4/3``."""
    try:
        num, _, den = text.partition("/")
        return Fraction(num) / Fraction(den) if den else Fraction(num)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _load(path: str, err) -> TilingConfig:
    try:
        return TilingConfig.load(path)
    except ConfigError as exc:
        err(f"error: {exc}")
        raise SystemExit(EXIT_INFEASIBLE)


def cmd_constants(args, out, err) -> int:
    try:
        if args.r is not None or args.delta is not None:
            if args.r is None or args.delta is None:
                err("error: --r and --delta go together")
                return EXIT_INFEASIBLE
            c = TemplateConstants(Variant(args.variant), args.a, args.b, args.r, args.delta)
            bad = c.violations()
            if bad:
                err("error: " + "; ".join(bad))
                return EXIT_INFEASIBLE
        else:
            c = make_template(args.variant, args.a, args.b)
    except (HypothesisViolated, Infeasible) as exc:
        err(f"error: {exc}")
        return EXIT_INFEASIBLE
    d = compute_K_bound(c, None if args.epsilon is None else c.delta - args.epsilon)
    rows = [("variant", c.variant.value), ("a", c.a), ("b", c.b), ("r", c.r), ("delta", c.delta),
            ("delta_eff", d.delta_eff), ("R", d.R), ("R'", d.Rprime), ("K bound", d.Kbound)]
    for name, v in rows:
        shown = v if isinstance(v, str) else f"{float(v):.12g}  ({v})"
        out(f"{name:>9}  {shown}")
    return EXIT_OK


def cmd_locate(args, out, err) -> int:
    cfg = _load(args.config, err)
    point = np.array([float(v) for v in args.point.replace(",", " ").split()])
    if len(point) != cfg.space.dim:
        err(f"error: point has {len(point)} coordinates, space has {cfg.space.dim}")
        return EXIT_DIMENSION
    tiling = build_tiling(cfg, not args.no_cache)
    if cfg.mode == "projection":
        from .projection import ProjectionConfig, ProjectionTiling

        pt = ProjectionTiling(tiling, ProjectionConfig.build(tiling, cfg.N, cfg.sample_seed))
        tid = pt.locate(point)
        center = pt.center(tid)
    else:
        tid = tiling.locate_full(point)
        center = tiling.full_center(tid)
    dist = cfg.space.norm(point - center)
    out(json.dumps({"tile": tid.to_dict(), "center": center.tolist(), "distance": dist,
                    "ratio": dist / tiling.r}, sort_keys=True))
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    from .verify import run_suite, write_report

    cfg = _load(args.config, err)
    if args.samples is not None:
        cfg.samples = args.samples
    if args.seed is not None:
        cfg.sample_seed = args.seed
    log: list = []
    report = run_suite(cfg, use_cache=not args.no_cache, log=log)
    try:
        write_report(report, args.out, log)
    except OSError as exc:
        err(f"error: cannot write report: {exc}")
        return EXIT_WRITE
    for c in report.checks:
        out(f"{'pass' if c.passed else 'FAIL'}  {c.name}  ({c.failures}/{c.samples})")
    return EXIT_OK if report.passed else EXIT_CHECKS


def cmd_render(args, out, err) -> int:
    from .render import render_svg

    cfg = _load(args.config, err)
    i, j = args.plane
    if max(i, j) >= cfg.space.dim:
        err(f"error: plane axes must lie in 1..{cfg.space.dim}")
        return EXIT_DIMENSION
    tiling = build_tiling(cfg, not args.no_cache)
    locate = tiling.locate_full_many
    if cfg.mode == "projection":
        from .projection import ProjectionConfig, ProjectionTiling

        locate = ProjectionTiling(tiling, ProjectionConfig.build(tiling, cfg.N, cfg.sample_seed)).locate_many
    svg = render_svg(locate, cfg.space.dim, (i, j), *args.bbox, pixels=args.pixels,
                     title=f"{cfg.space.label} slice e{i + 1}:e{j + 1}")
    try:
        Path(args.out).write_text(svg)
    except OSError as exc:
        err(f"error: cannot write image: {exc}")
        return EXIT_WRITE
    out(f"wrote {args.out}")
    return EXIT_OK


def cmd_net(args, out, err) -> int:
    cfg = _load(args.config, err)
    tiling = build_tiling(cfg, not args.no_cache)
    summary = {"space": cfg.space.to_dict(), "levels": {}}
    for k in range(cfg.space.dim):
        row = {"sites_per_period": len(tiling.net(k).base), "cover": tiling.net(k).cover}
        if k in tiling.systems:
            s = tiling.systems[k]
            row.update(m=len(s), empirical_bound=s.empirical_bound, certified_bound=s.certified_bound)
        summary["levels"][str(k)] = row
    out(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="startile", description="Starlike normal tilings of finite-dimensional normed spaces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="template constants and the normality bound")
    p.add_argument("--variant", choices=["A", "B"], default="A")
    p.add_argument("--a", required=True, type=_number, help="template parameter a (decimal or fraction)")
    p.add_argument("--b", required=True, type=_number, help="template parameter b")
    p.add_argument("--r", type=_number, help="override r (requires --delta)")
    p.add_argument("--delta", type=_number, help="override delta (requires --r)")
    p.add_argument("--epsilon", type=_number, help="net epsilon; radii then use delta - epsilon")
    p.set_defaults(func=cmd_constants)

    def with_config(p):
        p.add_argument("--config", required=True, help="tiling config (JSON)")
        p.add_argument("--no-cache", action="store_true", help="rebuild systems instead of reading the cache")
        return p

    p = with_config(sub.add_parser("locate", help="tile containing a point"))
    p.add_argument("--point", required=True, help="coordinates, comma or space separated")
    p.set_defaults(func=cmd_locate)

    p = with_config(sub.add_parser("verify", help="run the certification suite"))
    p.add_argument("--samples", type=int, help="override the sample count")
    p.add_argument("--seed", type=int, help="override the sampling seed")
    p.add_argument("--out", default="report.json", help="report path; the sample log goes next to it")
    p.set_defaults(func=cmd_verify)

    p = with_config(sub.add_parser("render", help="SVG slice through the origin"))
    p.add_argument("--plane", type=_plane, default=(0, 1), help="two 1-based axes, e.g. 1:2")
    p.add_argument("--bbox", type=_bbox, default=(-6.0, 6.0), help="lo:hi for both axes")
    p.add_argument("--pixels", type=int, default=200)
    p.add_argument("--out", default="slice.svg")
    p.set_defaults(func=cmd_render)

    p = with_config(sub.add_parser("net", help="build and cache the systems; print net summaries"))
    p.set_defaults(func=cmd_net)
    return ap


def _glue_negative(argv: list[str]) -> list[str]:
    """Let ``--bbox -6:6`` through argparse, which would read ``-6:6`` as a flag."""
    out = []
    for tok in argv:
        if out and out[-1] in ("--bbox", "--point") and tok.startswith("-"):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative(argv))

    def out(s):
        print(s)

    def err(s):
        print(s, file=sys.stderr)

    return args.func(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
