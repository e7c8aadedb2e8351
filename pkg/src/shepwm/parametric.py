"""Parametric RUR: RUR coefficients as rational functions of the modulation index.

Each coefficient is recovered by sampling the fixed-``m`` RUR at rational nodes
and running Cauchy (rational) interpolation through the extended Euclidean
algorithm; degrees are chosen adaptively and every result is checked on fresh
points before it is accepted.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .algebra import (Interval, PoleError, RationalFunction, UniPoly, as_rational,
                      eval_ratfunc, is_squarefree, isolate_real_roots, poly_gcd)
from .model import build_elementary_system
from .rur import NotSeparatingError, RURFixed, SeparatingElement, rur_fixed

log = logging.getLogger(__name__)

CACHE_VERSION = 1


class InterpolationError(ValueError):
    """No rational function of acceptable degree fits the samples; more are needed."""


class BadParameterError(ValueError):
    """The parametric RUR does not specialize at this value of m."""


class CacheError(ValueError):
    """A cache file is malformed, from another format version, or for another n."""


# ---------------------------------------------------------------------------
# interpolation


def farey_points() -> Iterator[Fraction]:
    """1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ... (reduced fractions in (0, 1) by denominator)."""
    q = 2
    while True:
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)
        q += 1


def sample_points(count: int, exclude: Iterable = (), start: int = 0) -> list[Fraction]:
    """``count`` distinct small-height rationals in (0, 1), skipping ``exclude``.

    ``start`` skips that many admissible points first, so successive calls can
    extend a node set without repeats.
    """
    if count < 1:
        raise ValueError("count must be positive")
    excluded = {as_rational(x) for x in exclude}
    out: list[Fraction] = []
    skipped = 0
    for p in farey_points():
        if p in excluded:
            continue
        if skipped < start:
            skipped += 1
            continue
        out.append(p)
        if len(out) == count:
            return out
    raise AssertionError("unreachable")


def _newton_interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction], var: str) -> UniPoly:
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    # trailing zero divided differences mean a low-degree interpolant
    while len(coef) > 1 and coef[-1] == 0:
        coef.pop()
    p = UniPoly((coef[-1],), var)
    for i in range(len(coef) - 2, -1, -1):
        p = p * UniPoly((-xs[i], 1), var) + coef[i]
    return p


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _primes(start: int = 2**61) -> Iterator[int]:
    p = start - 1
    while True:
        if _is_probable_prime(p):
            yield p
        p -= 2


def _poly_divmod_p(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = a[:]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - db, 1)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    r = a[:db]
    while r and r[-1] == 0:
        r.pop()
    while len(q) > 1 and q[-1] == 0:
        q.pop()
    return q, r


def _poly_mul_p(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def _poly_sub_p(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _denominator_mod_p(xs: Sequence[int], ys: Sequence[int], p: int) -> tuple[int, list[int]]:
    """Maximal-quotient rational reconstruction mod ``p``: (quotient degree, monic
    denominator coefficients)."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * pow(xs[i] - xs[i - j], -1, p) % p
    interp = [coef[-1]]
    for i in range(n - 2, -1, -1):
        interp = _poly_mul_p(interp, [(-xs[i]) % p, 1], p) if interp else []
        interp = interp + [0] * (1 - len(interp)) if not interp else interp
        interp[0] = (interp[0] + coef[i]) % p
    while interp and interp[-1] == 0:
        interp.pop()
    nodes = [1]
    for x in xs:
        nodes = _poly_mul_p(nodes, [(-x) % p, 1], p)
    r0, r1, t0, t1 = nodes, interp, [], [1]
    best = (-1, [1])
    while r1:
        q, r2 = _poly_divmod_p(r0, r1, p)
        if len(q) - 1 > best[0]:
            best = (len(q) - 1, t1)
        r0, r1 = r1, r2
        t0, t1 = t1, _poly_sub_p(t0, _poly_mul_p(q, t1, p), p)
    qdeg, den = best
    inv = pow(den[-1], -1, p)
    return qdeg, [c * inv % p for c in den]


def _rational_reconstruct(u: int, mod: int) -> Fraction | None:
    bound = math.isqrt(mod // 2)
    r0, r1, t0, t1 = mod, u % mod, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or math.gcd(r1, abs(t1)) != 1:
        return None
    return Fraction(r1, t1)


def _fit_polynomial(xs, ys, surplus: int, var: str) -> UniPoly | None:
    poly = _newton_interpolate(xs, ys, var)
    if poly.degree + 1 + surplus <= len(xs):
        return poly
    return None


def interpolate_coefficient(samples: Sequence[tuple], max_deg: int | None = None,
                            surplus: int = 3, var: str = "m") -> RationalFunction:
    """Rational function through ``(m, value)`` samples with minimal total degree.

    The denominator (and with it the degree split) is found by maximal-quotient
    rational reconstruction modulo word-size primes, lifted by CRT and rational
    reconstruction; the result is accepted only once an exact polynomial fit of
    ``value * denominator`` leaves at least ``surplus`` samples over-determining it.
    """
    xs = [as_rational(m) for m, _ in samples]
    ys = [as_rational(v) for _, v in samples]
    if len(set(xs)) != len(xs):
        raise ValueError("sample nodes must be distinct")
    k = len(xs)
    if k == 0:
        raise InterpolationError("no samples")

    def accept(den: UniPoly) -> RationalFunction | None:
        if any(den(x) == 0 for x in xs):
            return None
        num = _fit_polynomial(xs, [y * den(x) for x, y in zip(xs, ys)], surplus + den.degree, var)
        if num is None:
            return None
        f = RationalFunction(num, den)
        if max_deg is not None and f.num.degree + f.den.degree > max_deg:
            raise InterpolationError(f"total degree exceeds {max_deg}")
        return f

    one = UniPoly((1,), var)
    f = accept(one)
    if f is not None:
        return f

    modulus, lifted, previous = 1, None, None
    for p in _primes():
        if any(x.denominator % p == 0 or y.denominator % p == 0 for x, y in zip(xs, ys)):
            continue
        xp = [x.numerator * pow(x.denominator, -1, p) % p for x in xs]
        yp = [y.numerator * pow(y.denominator, -1, p) % p for y in ys]
        qdeg, den_p = _denominator_mod_p(xp, yp, p)
        if qdeg - 1 < surplus:
            raise InterpolationError(
                f"{k} samples do not over-determine a rational function (best surplus {qdeg - 1})")
        if lifted is None or len(lifted) != len(den_p):
            lifted, modulus = den_p, p
        else:
            lifted = [_crt(a, modulus, b, p) for a, b in zip(lifted, den_p)]
            modulus *= p
        cands = [_rational_reconstruct(c, modulus) for c in lifted]
        if all(c is not None for c in cands):
            den = UniPoly(tuple(cands), var)
            if den == previous:
                f = accept(den)
                if f is not None:
                    return f
            previous = den
        if modulus.bit_length() > 200_000:
            raise InterpolationError("denominator reconstruction did not converge")


def _crt(a: int, m: int, b: int, p: int) -> int:
    t = (b - a) * pow(m, -1, p) % p
    return a + m * t


# ---------------------------------------------------------------------------
# the parametric RUR


def _ratfunc_poly(coeffs: Sequence[RationalFunction], m0: Fraction) -> UniPoly:
    return UniPoly(tuple(eval_ratfunc(c, m0) for c in coeffs))


@dataclass(frozen=True)
class ParametricRUR:
    """RUR whose ``T``-coefficients are rational functions of ``m``.

    ``chi`` lists the coefficients of ``T^0..T^(d-1)``; the leading one is 1.
    ``bad_m`` holds isolating intervals for the real zeros in (0, 1) of every
    coefficient denominator, plus any rational node that failed to specialize.
    """

    n: int
    t: SeparatingElement
    chi: tuple[RationalFunction, ...]
    g_one: tuple[RationalFunction, ...]
    g_coord: dict[str, tuple[RationalFunction, ...]]
    bad_m: tuple[Interval, ...] = ()
    nodes: tuple[Fraction, ...] = field(default=(), compare=False)

    @property
    def degree(self) -> int:
        return len(self.chi)

    @property
    def coords(self) -> tuple[str, ...]:
        return self.t.variables

    def all_coefficients(self) -> Iterator[RationalFunction]:
        yield from self.chi
        yield from self.g_one
        for v in self.coords:
            yield from self.g_coord[v]

    def denominators(self) -> list[UniPoly]:
        seen: list[UniPoly] = []
        for c in self.all_coefficients():
            if c.den.degree > 0 and c.den not in seen:
                seen.append(c.den)
        return seen

    def common_denominator(self) -> UniPoly:
        lcm = UniPoly((1,), "m")
        for d in self.denominators():
            lcm = (lcm * d).exact_div(poly_gcd(lcm, d))
        return lcm.monic()

    def specialize(self, m0) -> RURFixed:
        return specialize(self, m0)


def specialize(p: ParametricRUR, m0) -> RURFixed:
    """Substitute ``m = m0``; refuses poles and non-square-free specializations."""
    m0 = as_rational(m0)
    if not 0 < m0 < 1:
        raise BadParameterError(f"m = {m0} is outside (0, 1)")
    for iv in p.bad_m:
        if iv.lo == iv.hi == m0:
            raise BadParameterError(f"m = {m0} is a recorded bad parameter value")
    try:
        chi = UniPoly(tuple(eval_ratfunc(c, m0) for c in p.chi) + (Fraction(1),))
        g_one = _ratfunc_poly(p.g_one, m0)
        g_coord = tuple(_ratfunc_poly(p.g_coord[v], m0) for v in p.coords)
    except PoleError as exc:
        raise BadParameterError(f"coefficients are not defined at m = {m0}: {exc}") from None
    if not is_squarefree(chi):
        raise BadParameterError(f"chi is not square-free at m = {m0}")
    return RURFixed(p.t, chi, g_one, g_coord, m0)


def _sample(args) -> tuple[Fraction, RURFixed | None, str]:
    n, m0, t = args
    es = build_elementary_system(n)
    try:
        r = rur_fixed(es.reduced, m0, coords=es.coords, t=t)
    except NotSeparatingError as exc:
        return m0, None, str(exc)
    except ValueError as exc:
        return m0, None, f"{type(exc).__name__}: {exc}"
    return m0, r, ""


def _collect(n: int, nodes: Sequence[Fraction], t, jobs: int) -> list[tuple[Fraction, RURFixed | None, str]]:
    tasks = [(n, m0, t) for m0 in nodes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sample, tasks))
    return [_sample(a) for a in tasks]


def _coefficient_table(rurs: Sequence[RURFixed], coords: Sequence[str]):
    d = rurs[0].chi_bar.degree
    table: dict[tuple[str, int], list[Fraction]] = {}
    for r in rurs:
        chib = r.chi_bar
        for j in range(d):
            table.setdefault(("chi", j), []).append(chib.coeff(j))
            table.setdefault(("g_one", j), []).append(r.g_one.coeff(j))
            for v, g in zip(coords, r.g_coord):
                table.setdefault((v, j), []).append(g.coeff(j))
    return table


def build_parametric_rur(n: int, *, initial_nodes: int | None = None, validate: int = 3,
                         max_nodes: int = 2048, jobs: int = 1,
                         t: Sequence[int] | None = None) -> ParametricRUR:
    """Sample, interpolate and validate the parametric RUR of the n-angle system.

    The separating form is chosen at the first node (``s2`` when it works) and then
    imposed at every other node; nodes where it fails, or whose quotient has a
    non-generic shape, are dropped and recorded.
    """
    es = build_elementary_system(n)
    coords = es.coords
    count = initial_nodes or max(8, 4 * n)
    rejected: list[Fraction] = []
    good: dict[Fraction, RURFixed] = {}
    sep: SeparatingElement | None = None
    if t is not None:
        sep = SeparatingElement(tuple(t), coords)
    used = 0
    while True:
        need = count - len(good)
        fresh = sample_points(need, exclude=rejected, start=used) if need > 0 else []
        used += len(fresh)
        if sep is None and fresh:
            m0, r, why = _sample((n, fresh[0], None))
            if r is None:
                raise RuntimeError(f"first node {m0} failed: {why}")
            sep = r.t
            good[m0] = r
            fresh = fresh[1:]
        for m0, r, why in _collect(n, fresh, sep, jobs):
            if r is None:
                log.info("node m=%s rejected: %s", m0, why)
                rejected.append(m0)
            else:
                good[m0] = r
        # keep only nodes with the majority quotient shape
        shapes: dict[tuple[int, int], int] = {}
        for r in good.values():
            key = (r.chi.degree, r.chi_bar.degree)
            shapes[key] = shapes.get(key, 0) + 1
        generic = max(shapes, key=shapes.get)
        for m0 in [m for m, r in good.items() if (r.chi.degree, r.chi_bar.degree) != generic]:
            log.info("node m=%s has non-generic shape; dropped", m0)
            rejected.append(m0)
            del good[m0]
        nodes = sorted(good)
        try:
            result = _interpolate_all(n, sep, [good[m] for m in nodes], nodes)
        except InterpolationError as exc:
            log.info("%d nodes insufficient (%s)", len(nodes), exc)
            if count >= max_nodes:
                raise InterpolationError(f"no stable interpolation with {count} nodes") from exc
            count = min(2 * count, max_nodes)
            continue
        # held-out validation on fresh points
        check = sample_points(validate, exclude=rejected, start=used)
        failures = 0
        for m0, r, why in _collect(n, check, sep, jobs):
            if r is None or (r.chi.degree, r.chi_bar.degree) != generic:
                rejected.append(m0)
                used += 1
                continue
            try:
                got = specialize(result, m0)
            except BadParameterError:
                got = None
            if got is None or not same_rur(got, r):
                failures += 1
            good[m0] = r
            used += 1
        if failures == 0:
            bad = _bad_intervals(result) + tuple(Interval(m, m) for m in sorted(set(rejected)))
            return ParametricRUR(n, sep, result.chi, result.g_one, result.g_coord,
                                 bad, tuple(sorted(good)))
        log.info("validation failed at %d points; adding nodes", failures)
        count = min(2 * count, max_nodes)


def _interpolate_all(n: int, sep: SeparatingElement, rurs: Sequence[RURFixed],
                     nodes: Sequence[Fraction]) -> ParametricRUR:
    coords = sep.variables
    table = _coefficient_table(rurs, coords)
    d = rurs[0].chi_bar.degree
    cache: dict[tuple, RationalFunction] = {}

    def fit(key):
        values = table[key]
        sig = tuple(values)
        if sig not in cache:
            cache[sig] = _fit_with_denominator(nodes, values, known_dens)
        return cache[sig]

    known_dens: list[UniPoly] = []
    chi = tuple(fit(("chi", j)) for j in range(d))
    g_one = tuple(fit(("g_one", j)) for j in range(d))
    g_coord = {v: tuple(fit((v, j)) for j in range(d)) for v in coords}
    return ParametricRUR(n, sep, chi, g_one, g_coord)


def _fit_with_denominator(nodes, values, known_dens: list[UniPoly]) -> RationalFunction:
    """Try the denominators found so far (a polynomial fit of ``value * den`` needs far
    fewer nodes), then fall back to full rational interpolation."""
    for den in known_dens:
        num = _fit_polynomial(nodes, [y * den(x) for x, y in zip(nodes, values)], 3, "m")
        if num is not None:
            return RationalFunction(num, den)
    f = interpolate_coefficient(list(zip(nodes, values)))
    if f.den.degree > 0 and f.den not in known_dens:
        known_dens.append(f.den)
        known_dens.sort(key=lambda p: -p.degree)
    return f


def _bad_intervals(p: ParametricRUR) -> tuple[Interval, ...]:
    out = []
    for den in p.denominators():
        for iv in isolate_real_roots(den):
            if iv.hi > 0 and iv.lo < 1:
                out.append(iv)
    out.sort(key=lambda iv: iv.lo)
    return tuple(out)


def same_rur(a: RURFixed, b: RURFixed) -> bool:
    """Coefficient-for-coefficient equality of the square-free RUR data."""
    return (a.t == b.t and a.chi_bar == b.chi_bar and a.g_one == b.g_one
            and a.g_coord == b.g_coord)


# ---------------------------------------------------------------------------
# cache


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _rf_to_json(f: RationalFunction) -> dict:
    return {"num": [_q(c) for c in f.num.coeffs], "den": [_q(c) for c in f.den.coeffs]}


def _rf_from_json(obj) -> RationalFunction:
    num = [Fraction(s) for s in obj["num"]]
    den = [Fraction(s) for s in obj["den"]]
    return RationalFunction(UniPoly(tuple(num), "m"), UniPoly(tuple(den), "m"))


def to_json(p: ParametricRUR) -> dict:
    body = {
        "version": CACHE_VERSION,
        "n": p.n,
        "t": list(p.t.coefficients),
        "coords": list(p.coords),
        "chi": [_rf_to_json(f) for f in p.chi],
        "g_one": [_rf_to_json(f) for f in p.g_one],
        "g_coord": {v: [_rf_to_json(f) for f in p.g_coord[v]] for v in p.coords},
        "bad_m": [[_q(iv.lo), _q(iv.hi)] for iv in p.bad_m],
        "nodes": [_q(x) for x in p.nodes],
    }
    body["checksum"] = _checksum(body)
    return body


def _checksum(body: dict) -> str:
    payload = {k: v for k, v in body.items() if k != "checksum"}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def from_json(obj: dict, n: int | None = None) -> ParametricRUR:
    try:
        if obj.get("version") != CACHE_VERSION:
            raise CacheError(f"unsupported cache version {obj.get('version')!r}")
        if obj.get("checksum") != _checksum(obj):
            raise CacheError("checksum mismatch")
        if n is not None and obj["n"] != n:
            raise CacheError(f"cache is for n={obj['n']}, not n={n}")
        coords = tuple(obj["coords"])
        t = SeparatingElement(tuple(int(c) for c in obj["t"]), coords)
        return ParametricRUR(
            n=int(obj["n"]),
            t=t,
            chi=tuple(_rf_from_json(f) for f in obj["chi"]),
            g_one=tuple(_rf_from_json(f) for f in obj["g_one"]),
            g_coord={v: tuple(_rf_from_json(f) for f in obj["g_coord"][v]) for v in coords},
            bad_m=tuple(Interval(Fraction(a), Fraction(b)) for a, b in obj["bad_m"]),
            nodes=tuple(Fraction(x) for x in obj.get("nodes", [])),
        )
    except CacheError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise CacheError(f"malformed cache: {exc}") from None


def save_cache(p: ParametricRUR, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(to_json(p), indent=1))
    tmp.replace(path)


def load_cache(path, n: int | None = None) -> ParametricRUR:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CacheError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise CacheError(f"{path}: top level is not an object")
    return from_json(obj, n)
