"""Exact arithmetic over the rationals.

Univariate and sparse multivariate polynomials with :class:`fractions.Fraction`
coefficients, reduced rational functions in one variable, and certified real
root isolation (Descartes' rule of signs with bisection) for univariate
polynomials.

All objects are immutable once constructed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction
Scalar = Union[int, Fraction]


class PoleError(ZeroDivisionError):
    """A rational function was evaluated at a zero of its denominator."""


class RootIsolationError(ValueError):
    """An interval given for refinement does not isolate a root."""


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to :class:`Fraction`.

    Floats are rejected so that inexact values never leak into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# univariate polynomials


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial; ``coeffs[i]`` is the coefficient of ``var**i``."""

    coeffs: tuple[Fraction, ...]
    var: str = "T"

    def __post_init__(self):
        cs = [as_rational(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, var: str = "T") -> "UniPoly":
        return cls(tuple(coeffs), var)

    @classmethod
    def constant(cls, c, var: str = "T") -> "UniPoly":
        return cls((c,), var)

    @classmethod
    def x(cls, var: str = "T") -> "UniPoly":
        return cls((0, 1), var)

    @classmethod
    def from_roots(cls, roots: Iterable, var: str = "T") -> "UniPoly":
        p = cls((1,), var)
        for r in roots:
            p = p * cls((-as_rational(r), 1), var)
        return p

    # -- basic properties

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def monic(self) -> "UniPoly":
        if self.is_zero() or self.lc == 1:
            return self
        inv = 1 / self.lc
        return UniPoly(tuple(c * inv for c in self.coeffs), self.var)

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i), self.var)

    # -- arithmetic

    def _coerce(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            if other.var != self.var and other.degree > 0 and self.degree > 0:
                raise ValueError(f"variable mismatch: {self.var} vs {other.var}")
            return other
        return UniPoly((as_rational(other),), self.var)

    def __add__(self, other) -> "UniPoly":
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly(tuple(self.coeff(i) + o.coeff(i) for i in range(n)), self.var)

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other) -> "UniPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            c = as_rational(other)
            return UniPoly(tuple(a * c for a in self.coeffs), self.var)
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return UniPoly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return UniPoly(tuple(out), self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        result = UniPoly((1,), self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other) -> tuple["UniPoly", "UniPoly"]:
        d = self._coerce(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dd = d.degree
        inv = 1 / d.lc
        q = [Fraction(0)] * max(len(r) - dd, 0)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i]
            if c:
                c *= inv
                q[i - dd] = c
                for j in range(dd + 1):
                    r[i - dd + j] -= c * d.coeffs[j]
        return UniPoly(tuple(q), self.var), UniPoly(tuple(r[:dd]), self.var)

    def __floordiv__(self, other) -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "UniPoly":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "UniPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    # -- evaluation

    def __call__(self, x):
        """Horner evaluation; exact for rationals, float for floats."""
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + (float(c) if isinstance(x, float) else c)
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.float_coeffs()):
            acc = acc * x + c
        return acc

    def float_coeffs(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)

    def compose(self, other: "UniPoly") -> "UniPoly":
        acc = UniPoly((), other.var)
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def with_var(self, var: str) -> "UniPoly":
        return UniPoly(self.coeffs, var)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = _fmt_coeff(a)
            else:
                mono = self.var if i == 1 else f"{self.var}^{i}"
                body = mono if a == 1 else f"{_fmt_coeff(a)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd; ``gcd(0, 0) == 0``."""
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a.monic()


_GCD_PRIME = 2**61 - 1


def _coprime_to_derivative_mod_p(p: UniPoly, prime: int = _GCD_PRIME) -> bool:
    """Sufficient test for square-freeness: ``gcd(p, p') = 1`` modulo a prime that
    keeps the degree of ``p`` implies the same over the rationals."""
    cs = _primitive_int_coeffs(p)
    a = [c % prime for c in cs]
    if a[-1] == 0:
        return False
    b = [(i * c) % prime for i, c in enumerate(a)][1:]
    while b and b[-1] == 0:
        b.pop()
    while b:
        inv = pow(b[-1], -1, prime)
        db = len(b) - 1
        for i in range(len(a) - 1, db - 1, -1):
            c = a[i] * inv % prime
            if c:
                for j in range(db + 1):
                    a[i - db + j] = (a[i - db + j] - c * b[j]) % prime
        a = a[:db]
        while a and a[-1] == 0:
            a.pop()
        a, b = b, a
    return len(a) == 1


def squarefree_part(p: UniPoly) -> UniPoly:
    """Monic product of the distinct irreducible factors of ``p``."""
    if p.is_zero():
        raise ValueError("square-free part of the zero polynomial is undefined")
    if p.degree == 0:
        return UniPoly((1,), p.var)
    if _coprime_to_derivative_mod_p(p):
        return p.monic()
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def is_squarefree(p: UniPoly) -> bool:
    if p.degree <= 0 or _coprime_to_derivative_mod_p(p):
        return True
    return poly_gcd(p, p.derivative()).degree == 0


def resultant(a: UniPoly, b: UniPoly) -> Fraction:
    """Resultant over the rationals via the Euclidean algorithm."""
    if a.is_zero() or b.is_zero():
        return Fraction(0)
    res = Fraction(1)
    while b.degree > 0:
        r = a % b
        if r.is_zero():
            return Fraction(0)
        if a.degree % 2 == 1 and b.degree % 2 == 1:
            res = -res
        res *= b.lc ** (a.degree - r.degree)
        a, b = b, r
    return res * b.lc ** a.degree


# ---------------------------------------------------------------------------
# real roots


@dataclass(frozen=True)
class Interval:
    """Closed interval with rational endpoints; ``lo == hi`` marks an exact root."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __float__(self) -> float:
        return float(self.mid)


def _primitive_int_coeffs(p: UniPoly) -> list[int]:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints] if g > 1 else ints


def _sign_variations(cs: Sequence[int]) -> int:
    count, last = 0, 0
    for c in cs:
        if c:
            if last and (c > 0) != (last > 0):
                count += 1
            last = c
    return count


def _taylor_shift1(cs: Sequence[int]) -> list[int]:
    """Coefficients of ``p(x + 1)``."""
    a = list(cs)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += a[j + 1]
    return a


def _descartes_01(cs: Sequence[int]) -> int:
    """Upper bound (exact for 0 and 1) on the roots of ``cs`` in (0, 1)."""
    return _sign_variations(_taylor_shift1(cs[::-1]))


def _positive_root_intervals(cs: list[int]) -> list[Interval]:
    """Isolating intervals for the positive roots of a square-free integer polynomial
    with nonzero constant term."""
    d = len(cs) - 1
    if d < 1 or _sign_variations(cs) == 0:
        return []
    lead = abs(cs[-1])
    bound = 1 + max(abs(c) for c in cs[:-1]) / lead
    k = max(0, math.ceil(math.log2(bound)))
    while 2**k < bound:
        k += 1
    scale = 2**k
    # q(x) = p(scale * x), roots in (0, 1)
    q = [c * scale**i for i, c in enumerate(cs)]
    out: list[Interval] = []
    stack = [(q, 0, 0)]  # polynomial on (a/2^lvl, (a+1)/2^lvl)
    while stack:
        q, a, lvl = stack.pop()
        v = _descartes_01(q)
        if v == 0:
            continue
        if v == 1:
            out.append(Interval(Fraction(a * scale, 2**lvl), Fraction((a + 1) * scale, 2**lvl)))
            continue
        n = len(q) - 1
        left = [c * 2 ** (n - i) for i, c in enumerate(q)]  # 2^n q(x/2)
        right = _taylor_shift1(left)
        if right[0] == 0:
            out.append(Interval(Fraction((2 * a + 1) * scale, 2 ** (lvl + 1)),
                                Fraction((2 * a + 1) * scale, 2 ** (lvl + 1))))
            right = right[1:]
        stack.append((left, 2 * a, lvl + 1))
        stack.append((right, 2 * a + 1, lvl + 1))
    return sorted(out, key=lambda iv: iv.lo)


def isolate_real_roots(p: UniPoly, *, squarefree: bool = False) -> list[Interval]:
    """Disjoint isolating intervals, sorted ascending, one per distinct real root."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    q = p if squarefree else squarefree_part(p)
    if q.degree < 1:
        return []
    cs = _primitive_int_coeffs(q)
    zero_root = cs[0] == 0
    if zero_root:
        cs = cs[1:]
    pos = _positive_root_intervals(cs)
    reflected = [c if i % 2 == 0 else -c for i, c in enumerate(cs)]
    neg = [Interval(-iv.hi, -iv.lo) for iv in _positive_root_intervals(reflected)]
    out = sorted(neg, key=lambda iv: iv.lo)
    if zero_root:
        out.append(Interval(0, 0))
    out += pos
    # a bisection midpoint that is itself a root may sit on a neighbour's boundary
    out = sorted((_shrink_off_roots(q, iv) for iv in out), key=lambda iv: iv.lo)
    sign_at = _SignEvaluator(q)
    for i in range(1, len(out)):
        # neighbours may share a (non-root) endpoint; bisect the right one off it
        lo, hi = out[i].lo, out[i].hi
        shared = out[i - 1].hi
        slo = sign_at(lo)
        while lo <= shared < hi:
            mid = (lo + hi) / 2
            sm = sign_at(mid)
            if sm == 0:
                lo = hi = mid
            elif sm == slo:
                lo = mid
            else:
                hi = mid
        out[i] = Interval(lo, hi)
    return out


class _SignEvaluator:
    """Exact sign of a polynomial at rationals using integer arithmetic only."""

    def __init__(self, p: UniPoly):
        # positive rescaling of the coefficients, so signs are unchanged
        self.cs = _primitive_int_coeffs(p) if not p.is_zero() else [0]

    def __call__(self, x) -> int:
        x = Fraction(x)
        a, b = x.numerator, x.denominator
        # b^d p(a/b) by homogeneous Horner; b > 0 so the sign is preserved
        acc, bp = 0, 1
        for c in reversed(self.cs):
            acc = acc * a + c * bp
            bp *= b
        return _sign(acc)


def _shrink_off_roots(q: UniPoly, iv: Interval) -> Interval:
    if iv.lo == iv.hi:
        return iv
    lo, hi = iv.lo, iv.hi
    sq = _SignEvaluator(q)
    if sq(lo) == 0 or sq(hi) == 0:
        dq = _SignEvaluator(q.derivative())
    if sq(lo) == 0:
        # just right of a simple root q has the sign of q'
        want, step = dq(lo), (hi - lo) / 2
        while sq(lo + step) != want:
            step /= 2
        lo = lo + step
    if sq(hi) == 0:
        want, step = -dq(hi), (hi - lo) / 2
        while sq(hi - step) != want:
            step /= 2
        hi = hi - step
    return Interval(lo, hi)


def count_real_roots(p: UniPoly) -> int:
    return len(isolate_real_roots(p))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def simplest_rational_between(a: Fraction, b: Fraction) -> Fraction:
    """The rational with smallest denominator in the closed interval [a, b]."""
    if a > b:
        a, b = b, a
    if a <= 0 <= b:
        return Fraction(0)
    if b < 0:
        return -simplest_rational_between(-b, -a)
    fl = math.floor(a)
    if fl == a:
        return Fraction(fl)
    if fl + 1 <= b:
        return Fraction(fl + 1)
    return fl + 1 / simplest_rational_between(1 / (b - fl), 1 / (a - fl))


def _float_newton(p: UniPoly, x0: float, lo: float, hi: float) -> float | None:
    cs = p.float_coeffs()
    dcs = tuple(i * c for i, c in enumerate(cs) if i)
    x = x0
    for _ in range(60):
        f = df = 0.0
        for c in reversed(cs):
            f = f * x + c
        for c in reversed(dcs):
            df = df * x + c
        if df == 0.0 or not math.isfinite(f):
            return None
        step = f / df
        x -= step
        if not lo <= x <= hi:
            return None
        if abs(step) <= 1e-17 * max(1.0, abs(x)):
            break
    return x


def refine_root(p: UniPoly, iv: Interval, eps=Fraction(1, 10**10), *, squarefree=False) -> Fraction:
    """Rational within ``eps`` of the unique root of ``p``'s square-free part in ``iv``.

    Float Newton proposes a tight bracket which is accepted only if the exact
    sign change certifies it; otherwise exact bisection takes over.
    """
    q = p if squarefree else squarefree_part(p)
    eps = Fraction(eps) if not isinstance(eps, Fraction) else eps
    sign_at = _SignEvaluator(q)
    lo, hi = iv.lo, iv.hi
    if lo == hi:
        if sign_at(lo) != 0:
            raise RootIsolationError(f"{lo} is not a root")
        return lo
    slo, shi = sign_at(lo), sign_at(hi)
    if slo == 0:
        return lo
    if shi == 0:
        return hi
    if slo == shi:
        raise RootIsolationError(f"no sign change on [{lo}, {hi}]")

    def bisect(lo, hi, steps):
        for _ in range(steps):
            mid = (lo + hi) / 2
            sm = sign_at(mid)
            if sm == 0:
                return mid, mid
            if sm == slo:
                lo = mid
            else:
                hi = mid
        return lo, hi

    while hi - lo > eps:
        guess = _float_newton(q, float((lo + hi) / 2), float(lo), float(hi))
        if guess is not None:
            c = Fraction(guess)
            # a bracket at float resolution first, then one of width eps / 2
            tight = Fraction(max(abs(guess), 1.0) * 2.0**-46)
            certified = False
            for half in sorted({min(tight, eps / 4), eps / 4}):
                a, b = max(lo, c - half), min(hi, c + half)
                sa, sb = sign_at(a), sign_at(b)
                if sa == 0:
                    return a
                if sb == 0:
                    return b
                if sa == slo and sb == shi:
                    lo, hi, certified = a, b, True
                    break
            if certified:
                break
        # Newton strayed or was not certified: shrink the bracket and retry
        lo, hi = bisect(lo, hi, 6)
        if lo == hi:
            return lo
    r = simplest_rational_between(lo, hi)
    return r


def real_roots(p: UniPoly, eps=Fraction(1, 10**10)) -> list[Fraction]:
    """Refined approximations of every distinct real root, ascending."""
    q = squarefree_part(p)
    return [refine_root(q, iv, eps, squarefree=True) for iv in isolate_real_roots(q)]


# ---------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True)
class RationalFunction:
    """Reduced quotient of univariate polynomials with monic denominator."""

    num: UniPoly
    den: UniPoly

    def __post_init__(self):
        num, den = self.num, self.den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        var = den.var
        num = num.with_var(var)
        if num.is_zero():
            num, den = UniPoly((), var), UniPoly((1,), var)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
            lc = den.lc
            if lc != 1:
                num, den = num * (1 / lc), den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def constant(cls, c, var: str = "m") -> "RationalFunction":
        return cls(UniPoly((c,), var), UniPoly((1,), var))

    @classmethod
    def from_coeffs(cls, num: Sequence, den: Sequence = (1,), var: str = "m") -> "RationalFunction":
        return cls(UniPoly(tuple(num), var), UniPoly(tuple(den), var))

    @property
    def var(self) -> str:
        return self.den.var

    def __call__(self, m0) -> Fraction:
        return eval_ratfunc(self, m0)

    def __add__(self, other) -> "RationalFunction":
        o = _as_ratfunc(other, self.var)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-_as_ratfunc(other, self.var))

    def __mul__(self, other) -> "RationalFunction":
        o = _as_ratfunc(other, self.var)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        o = _as_ratfunc(other, self.var)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __str__(self) -> str:
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _as_ratfunc(x, var: str) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, UniPoly):
        return RationalFunction(x, UniPoly((1,), var))
    return RationalFunction.constant(x, var)


def eval_ratfunc(r: RationalFunction, m0) -> Fraction:
    """Exact value ``r(m0)``; raises :class:`PoleError` at zeros of the denominator."""
    m0 = as_rational(m0)
    d = r.den(m0)
    if d == 0:
        raise PoleError(f"pole of {r} at {m0}")
    return r.num(m0) / d


# ---------------------------------------------------------------------------
# multivariate polynomials

Monomial = tuple[int, ...]


def _mono_str(vars_: Sequence[str], e: Monomial) -> str:
    bits = []
    for v, k in zip(vars_, e):
        if k == 1:
            bits.append(v)
        elif k > 1:
            bits.append(f"{v}^{k}")
    return "*".join(bits)


@dataclass(frozen=True, eq=False)
class MultiPoly:
    """Sparse polynomial: exponent vector (aligned with ``variables``) -> coefficient."""

    terms: Mapping[Monomial, Fraction]
    variables: tuple[str, ...]

    def __post_init__(self):
        vars_ = tuple(self.variables)
        n = len(vars_)
        clean: dict[Monomial, Fraction] = {}
        for e, c in self.terms.items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match {n} variables")
            c = as_rational(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "variables", vars_)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls({}, tuple(variables))

    @classmethod
    def constant(cls, c, variables: Sequence[str]) -> "MultiPoly":
        return cls({(0,) * len(variables): c}, tuple(variables))

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        e = tuple(int(v == name) for v in variables)
        if sum(e) != 1:
            raise KeyError(name)
        return cls({e: 1}, variables)

    @classmethod
    def from_unipoly(cls, p: UniPoly, name: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        idx = variables.index(name)
        terms = {}
        for k, c in enumerate(p.coeffs):
            if c:
                e = [0] * len(variables)
                e[idx] = k
                terms[tuple(e)] = c
        return cls(terms, variables)

    # -- structure

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            if self.is_constant():
                return self.constant_term() == other
            return NotImplemented
        if other.variables != self.variables:
            try:
                other = other.reorder(self.variables)
            except KeyError:
                return False
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.variables.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.variables) if any(e[i] for e in self.terms))

    def reorder(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express in another variable list (must cover every used variable)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        for v in self.used_variables():
            if v not in variables:
                raise KeyError(f"variable {v} missing from {variables}")
        pos = {v: i for i, v in enumerate(self.variables)}
        terms = {}
        for e, c in self.terms.items():
            terms[tuple(e[pos[v]] if v in pos else 0 for v in variables)] = c
        return MultiPoly(terms, variables)

    # -- arithmetic

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other.reorder(self.variables) if other.variables != self.variables else other
        return MultiPoly.constant(other, self.variables)

    def __add__(self, other) -> "MultiPoly":
        o = self._coerce(other)
        terms = dict(self.terms)
        for e, c in o.terms.items():
            terms[e] = terms.get(e, 0) + c
        return MultiPoly(terms, self.variables)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = as_rational(other)
            return MultiPoly({e: v * c for e, v in self.terms.items()}, self.variables)
        o = self._coerce(other)
        terms: dict[Monomial, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultiPoly(terms, self.variables)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        result = MultiPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- evaluation / substitution

    def __call__(self, *point, **named):
        """Evaluate at a full point (positional, in ``variables`` order) or by name."""
        if point and named:
            raise TypeError("use positional or named values, not both")
        values = point if point else tuple(named[v] for v in self.variables)
        if len(values) != len(self.variables):
            raise ValueError("wrong number of values")
        total = 0
        for e, c in self.terms.items():
            t = c if not any(isinstance(v, float) for v in values) else float(c)
            for v, k in zip(values, e):
                if k:
                    t = t * v**k
            total = total + t
        return total

    def subs(self, values: Mapping[str, object]) -> "MultiPoly":
        """Substitute numbers or MultiPolys for some variables; the result keeps the
        remaining variables (and those of substituted polynomials)."""
        keep = [v for v in self.variables if v not in values]
        extra = []
        for val in values.values():
            if isinstance(val, MultiPoly):
                extra += [w for w in val.variables if w not in keep and w not in extra]
        out_vars = tuple(keep + extra)
        idx = {v: i for i, v in enumerate(self.variables)}
        powers: dict[tuple[str, int], MultiPoly | Fraction] = {}

        def power(name, k):
            key = (name, k)
            if key not in powers:
                val = values[name]
                if isinstance(val, MultiPoly):
                    powers[key] = val.reorder(out_vars) ** k
                else:
                    powers[key] = as_rational(val) ** k
            return powers[key]

        acc: dict[Monomial, Fraction] = {}
        for e, c in self.terms.items():
            base_e = tuple(e[idx[v]] if v in idx and v not in values else 0 for v in out_vars)
            term = MultiPoly({base_e: c}, out_vars)
            scalar = Fraction(1)
            for name in values:
                k = e[idx[name]]
                if k:
                    pw = power(name, k)
                    if isinstance(pw, MultiPoly):
                        term = term * pw
                    else:
                        scalar *= pw
            if scalar != 1:
                term = term * scalar
            for te, tc in term.terms.items():
                acc[te] = acc.get(te, 0) + tc
        return MultiPoly(acc, out_vars)

    def to_unipoly(self, name: str) -> UniPoly:
        """Convert a polynomial in (at most) the single variable ``name``."""
        used = self.used_variables()
        if any(v != name for v in used):
            raise ValueError(f"polynomial involves {used}, not only {name}")
        if name not in self.variables:
            return UniPoly((self.constant_term(),), name)
        i = self.variables.index(name)
        cs = [Fraction(0)] * (max((e[i] for e in self.terms), default=0) + 1)
        for e, c in self.terms.items():
            cs[e[i]] = c
        return UniPoly(tuple(cs), name)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        order = sorted(self.terms, key=lambda e: (sum(e), e), reverse=True)
        out = ""
        for e in order:
            c = self.terms[e]
            mono = _mono_str(self.variables, e)
            a = abs(c)
            body = (_fmt_coeff(a) if not mono else mono if a == 1 else f"{_fmt_coeff(a)}*{mono}")
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out

    __repr__ = __str__
