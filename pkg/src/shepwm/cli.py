"""Command-line entry point: ``she build | param | solve | sweep | verify``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .algebra import as_rational
from .model import build_elementary_system, build_power_sum_system

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("shepwm")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def cache_dir() -> Path:
    env = os.environ.get("SHE_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "shepwm"


def default_cache_path(n: int) -> Path:
    return cache_dir() / f"rur_n{n}.json"


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text.strip())
    except (ValueError, ZeroDivisionError, TypeError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _number_list(text: str, conv):
    try:
        return [conv(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"malformed list: {text!r}") from None


def _n(value: int) -> int:
    if value < 2:
        raise UsageError("--n must be at least 2")
    return value


def _load_or_build(n: int, cache: str | None):
    from .parametric import build_parametric_rur, load_cache, save_cache

    path = Path(cache) if cache else default_cache_path(n)
    if path.exists():
        return load_cache(path, n)
    if cache:
        raise UsageError(f"cache file {path} does not exist")
    log.info("no cache for n=%d at %s; building", n, path)
    p = build_parametric_rur(n)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_cache(p, path)
    except OSError as exc:
        log.warning("could not write cache %s: %s", path, exc)
    return p


# ---------------------------------------------------------------------------
# commands


def cmd_build(args) -> int:
    n = _n(args.n)
    ps = build_power_sum_system(n)
    es = build_elementary_system(n)
    if args.json:
        def terms(f):
            return [{"exp": list(e), "coeff": f"{c.numerator}/{c.denominator}"} for e, c in f.items()]
        out = {
            "n": n,
            "orders": list(ps.plan.orders),
            "power_sum": {"variables": list(ps.variables), "polys": [terms(f) for f in ps.polys]},
            "elementary": {"variables": list(es.polys[0].variables),
                           "polys": [terms(f) for f in es.polys]},
            "reduced": {"variables": list(es.reduced[0].variables),
                        "polys": [terms(f) for f in es.reduced]},
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    print(f"# harmonic orders eliminated: {', '.join(map(str, ps.plan.orders))}")
    print("# power-sum system in x_i = (-1)^(i+1) cos(alpha_i)")
    for f in ps.polys:
        print(f"{f} = 0")
    print("# elementary symmetric system")
    for f in es.polys:
        print(f"{f} = 0")
    return EXIT_OK


def cmd_param(args) -> int:
    from .parametric import build_parametric_rur, save_cache

    n = _n(args.n)
    if args.samples is not None and args.samples < 2:
        raise UsageError("--samples must be at least 2")
    if args.validate < 1:
        raise UsageError("--validate must be positive")
    t0 = time.perf_counter()
    p = build_parametric_rur(n, initial_nodes=args.samples, validate=args.validate, jobs=args.jobs)
    out = Path(args.out) if args.out else default_cache_path(n)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_cache(p, out)
    dens = p.denominators()
    print(f"n={n} separating element t = {p.t}, deg chi = {p.degree}")
    print(f"{len(p.nodes)} interpolation nodes, {len(dens)} distinct denominators, "
          f"{len(p.bad_m)} excluded m intervals/points")
    print(f"wrote {out} in {time.perf_counter() - t0:.2f}s")
    return EXIT_OK


def cmd_solve(args) -> int:
    from .solve import solve

    n = _n(args.n)
    m0 = _rational(args.m)
    if not 0 < m0 < 1:
        raise UsageError("--m must lie strictly between 0 and 1")
    p = _load_or_build(n, args.cache)
    t0 = time.perf_counter()
    rep = solve(p, m0)
    dt = time.perf_counter() - t0
    if args.json:
        out = {
            "n": n,
            "m": f"{m0.numerator}/{m0.denominator}",
            "groups": [{"angles_deg": [round(a, 5) for a in g.angles_deg],
                        "s": list(g.s), "residual": g.residual} for g in rep.groups],
            "chi_real_roots": rep.chi_real_root_count,
            "discarded": rep.discarded,
            "seconds": dt,
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    if args.degrees:
        for g in rep.groups:
            print(" ".join(f"{a:.5f}" for a in g.angles_deg))
        return EXIT_OK
    print(f"n={n} m={m0}: {len(rep.groups)} group(s) in {dt * 1000:.1f} ms"
          f" ({rep.chi_real_root_count} real roots of chi)")
    for i, g in enumerate(rep.groups, 1):
        angles = ", ".join(f"{a:.5f}" for a in g.angles_deg)
        print(f"  G{i}: [{angles}] deg   residual {g.residual:.1e}")
    shown = ", ".join(f"{k}={v}" for k, v in rep.discarded.items() if v)
    if shown:
        print(f"  discarded: {shown}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .harmonics import max_trajectory_jump, sweep

    n = _n(args.n)
    a, b, h = _rational(args.m_from), _rational(args.m_to), _rational(args.step)
    if not 0 < a < b < 1 or h <= 0:
        raise UsageError("need 0 < --from < --to < 1 and a positive --step")
    p = _load_or_build(n, args.cache)
    t0 = time.perf_counter()
    result = sweep(p, a, b, h, jobs=args.jobs)
    elapsed = time.perf_counter() - t0
    result.write_csv(args.csv)
    if args.svg:
        result.write_svg(args.svg)
    solved = len(result.counts)
    print(f"{solved} grid points, {len(result.rows)} groups, "
          f"{elapsed / max(solved, 1) * 1000:.1f} ms per point")
    for lo, hi, c in result.count_summary():
        print(f"  {float(lo):.3f} .. {float(hi):.3f}: {c} group(s)")
    if result.skipped:
        print(f"  skipped {len(result.skipped)} bad m value(s)")
    print(f"  largest per-step angle change within constant-count runs: "
          f"{max_trajectory_jump(result):.3f} deg")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .harmonics import verify

    angles = _number_list(args.angles, float)
    orders = _number_list(args.orders, int)
    m = _rational(args.m) if args.m else None
    try:
        rep = verify(angles, orders, m, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="she", description="Selective harmonic elimination via parametric RURs.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="print the polynomial systems for N angles")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_build)

    pa = sub.add_parser("param", help="compute and cache the parametric RUR")
    pa.add_argument("--n", type=int, required=True)
    pa.add_argument("--out")
    pa.add_argument("--samples", type=int, help="initial interpolation nodes")
    pa.add_argument("--validate", type=int, default=3, help="held-out validation nodes")
    pa.add_argument("--jobs", type=int, default=1)
    pa.set_defaults(func=cmd_param)

    so = sub.add_parser("solve", help="all switching-angle groups at one modulation index")
    so.add_argument("--n", type=int, required=True)
    so.add_argument("--m", required=True, help="rational modulation index, e.g. 3/4")
    so.add_argument("--cache")
    so.add_argument("--degrees", action="store_true", help="print only the angle table")
    so.add_argument("--json", action="store_true")
    so.set_defaults(func=cmd_solve)

    sw = sub.add_parser("sweep", help="solve on a grid of modulation indices")
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--from", dest="m_from", required=True)
    sw.add_argument("--to", dest="m_to", required=True)
    sw.add_argument("--step", required=True)
    sw.add_argument("--csv", required=True)
    sw.add_argument("--svg")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--cache")
    sw.set_defaults(func=cmd_sweep)

    ve = sub.add_parser("verify", help="check harmonic suppression of an angle group")
    ve.add_argument("--angles", required=True, help="comma-separated degrees")
    ve.add_argument("--orders", required=True, help="comma-separated odd harmonic orders")
    ve.add_argument("--m")
    ve.add_argument("--tol", type=float, default=1e-3)
    ve.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    from .parametric import BadParameterError, CacheError, InterpolationError
    from .rur import DimensionError, NoSolutionsError

    try:
        return args.func(args)
    except UsageError as exc:
        print(f"she: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BadParameterError, CacheError, InterpolationError, DimensionError,
            NoSolutionsError, ArithmeticError) as exc:
        print(f"she: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
