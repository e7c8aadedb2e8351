"""Polynomial models of the unipolar, quarter-wave symmetric SHE problem.

With ``x_i = (-1)**(i+1) * cos(alpha_i)`` the harmonic equations become
symmetric polynomials in ``x`` (the *power-sum system*).  Rewriting them in the
elementary symmetric functions ``s_1..s_n`` and fixing ``s_1 = m`` gives the
*elementary system* in ``s_2..s_n`` with the modulation index as parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .algebra import MultiPoly, UniPoly


@dataclass(frozen=True)
class HarmonicPlan:
    n: int
    orders: tuple[int, ...]

    def __post_init__(self):
        if len(self.orders) != self.n - 1:
            raise ValueError("a plan for n angles eliminates n - 1 harmonics")
        for k in self.orders:
            if k % 2 == 0 or k % 3 == 0:
                raise ValueError(f"harmonic {k} is even or triplen")
        if any(a >= b for a, b in zip(self.orders, self.orders[1:])):
            raise ValueError("orders must be strictly increasing")


def harmonic_orders(n: int) -> HarmonicPlan:
    """The ``n - 1`` lowest non-triplen odd harmonics: 5, 7, 11, 13, 17, ..."""
    if n < 2:
        raise ValueError("need at least two switching angles to eliminate a harmonic")
    orders: list[int] = []
    k = 1
    while len(orders) < n - 1:
        for o in (6 * k - 1, 6 * k + 1):
            if len(orders) < n - 1:
                orders.append(o)
        k += 1
    return HarmonicPlan(n, tuple(orders))


@lru_cache(maxsize=None)
def cos_multiple_angle(k: int) -> UniPoly:
    """Chebyshev polynomial ``P_k`` with ``cos(k a) = P_k(cos a)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    prev, cur = UniPoly((1,), "x"), UniPoly((0, 1), "x")
    if k == 0:
        return prev
    two_x = UniPoly((0, 2), "x")
    for _ in range(k - 1):
        prev, cur = cur, two_x * cur - prev
    return cur


def x_vars(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, n + 1))


def s_vars(n: int) -> tuple[str, ...]:
    return tuple(f"s{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class PowerSumSystem:
    plan: HarmonicPlan
    polys: tuple[MultiPoly, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.polys[0].variables


def build_power_sum_system(n: int) -> PowerSumSystem:
    """``g_1 = sum(x) - m`` and ``g_k = sum_i P_order(x_i)`` for each eliminated order."""
    plan = harmonic_orders(n)
    xs = x_vars(n)
    ring = xs + ("m",)
    g1 = sum((MultiPoly.var(v, ring) for v in xs), MultiPoly.zero(ring)) - MultiPoly.var("m", ring)
    polys = [g1]
    for order in plan.orders:
        cheb = cos_multiple_angle(order)
        g = MultiPoly.zero(ring)
        for v in xs:
            g = g + MultiPoly.from_unipoly(cheb.with_var(v), v, ring)
        polys.append(g)
    return PowerSumSystem(plan, tuple(polys))


@lru_cache(maxsize=None)
def _power_sums(n: int, r_max: int) -> tuple[MultiPoly, ...]:
    ring = s_vars(n)
    s = [None] + [MultiPoly.var(v, ring) for v in ring]
    p: list[MultiPoly] = [MultiPoly.constant(n, ring)]
    for r in range(1, r_max + 1):
        acc = MultiPoly.zero(ring)
        for i in range(1, min(r - 1, n) + 1):
            term = s[i] * p[r - i]
            acc = acc + term if i % 2 == 1 else acc - term
        if r <= n:
            acc = acc + s[r] * (r if r % 2 == 1 else -r)
        p.append(acc)
    return tuple(p)


def power_sum_in_elementary(r: int, n: int) -> MultiPoly:
    """``p_r = x_1^r + ... + x_n^r`` in ``s_1..s_n`` by Newton's identities."""
    if r < 1:
        raise ValueError("r must be positive")
    return _power_sums(n, r)[r]


def elementary_symmetric(values: Sequence) -> list:
    """``[e_1, ..., e_n]`` of the given numbers (exact for rationals)."""
    e = [1] + [0] * len(values)
    for k, v in enumerate(values, start=1):
        for j in range(k, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e[1:]


@dataclass(frozen=True)
class ElementarySystem:
    plan: HarmonicPlan
    polys: tuple[MultiPoly, ...]
    """``f_1..f_n`` in ``s_1..s_n, m``."""
    reduced: tuple[MultiPoly, ...]
    """``f_2..f_n`` with ``s_1 = m``, in variables ``s_n, ..., s_2, m``."""

    @property
    def n(self) -> int:
        return self.plan.n

    @property
    def coords(self) -> tuple[str, ...]:
        return s_vars(self.n)[1:]


def reduced_ring(n: int) -> tuple[str, ...]:
    return tuple(reversed(s_vars(n)[1:])) + ("m",)


@lru_cache(maxsize=None)
def build_elementary_system(n: int) -> ElementarySystem:
    plan = harmonic_orders(n)
    ss = s_vars(n)
    full_ring = ss + ("m",)
    f1 = MultiPoly.var("s1", full_ring) - MultiPoly.var("m", full_ring)
    polys = [f1]
    psums = _power_sums(n, max(plan.orders))
    for order in plan.orders:
        cheb = cos_multiple_angle(order)
        f = MultiPoly.zero(ss)
        for j, c in enumerate(cheb.coeffs):
            if c and j:
                f = f + psums[j] * c
            elif c:
                f = f + c * n
        polys.append(f.reorder(full_ring))
    rring = reduced_ring(n)
    m = MultiPoly.var("m", ("m",))
    reduced = tuple(f.subs({"s1": m}).reorder(rring) for f in polys[1:])
    return ElementarySystem(plan, tuple(polys), reduced)


def sign_pattern_ok(s: Sequence) -> bool:
    """Sign test on ``s_1..s_n``: ``+, -, -, +`` repeating with period four, all nonzero."""
    for r, v in enumerate(s, start=1):
        if v == 0:
            return False
        want_positive = r % 4 in (1, 0)
        if (v > 0) != want_positive:
            return False
    return True
