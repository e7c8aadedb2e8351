"""Switching angles for a concrete modulation index from a parametric RUR.

Only univariate solving is involved: the real roots of the specialized ``chi``
give candidate ``s``-vectors, the sign test discards most of them, and each
survivor's Vieta polynomial yields the cosines of a switching-angle group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (UniPoly, as_rational, isolate_real_roots, poly_gcd, refine_root,
                      squarefree_part)
from .model import cos_multiple_angle, harmonic_orders, sign_pattern_ok
from .parametric import ParametricRUR, specialize
from .rur import RURFixed

DEFAULT_EPS = Fraction(1, 10**12)
ORDER_GAP = 1e-9
RESIDUAL_TOL = 1e-9


class ContractError(ArithmeticError):
    """``g_one`` vanishes (numerically) at a root of ``chi``."""


@dataclass(frozen=True)
class SolutionGroup:
    m: Fraction
    s: tuple[float, ...]
    x: tuple[float, ...]
    angles_rad: tuple[float, ...]
    residual: float

    @property
    def angles_deg(self) -> tuple[float, ...]:
        return tuple(math.degrees(a) for a in self.angles_rad)


@dataclass(frozen=True)
class SolveReport:
    m: Fraction
    groups: tuple[SolutionGroup, ...]
    chi_real_root_count: int
    discarded: dict[str, int] = field(default_factory=dict)
    univariate_solves: int = 0


def recover_s(r: RURFixed, t0) -> list[Fraction]:
    """``(m, s_2, ..., s_n)`` at a refined root ``t0`` of chi_bar."""
    t0 = as_rational(t0)
    den = r.g_one(t0)
    scale = max((abs(c) for c in r.g_one.coeffs), default=Fraction(1))
    if den == 0 or abs(den) < scale * Fraction(1, 10**30):
        raise ContractError(f"g_one vanishes at T = {float(t0)}")
    return [r.m_value] + [g(t0) / den for g in r.g_coord]


def vieta_polynomial(s: Sequence) -> UniPoly:
    """Monic polynomial whose roots have elementary symmetric functions ``s``."""
    n = len(s)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    for k, sk in enumerate(s, start=1):
        coeffs[n - k] = (-1) ** k * as_rational(sk)
    return UniPoly(tuple(coeffs), "x")


def _real_roots_with_multiplicity(p: UniPoly, eps) -> list[float]:
    q = squarefree_part(p)
    roots = [refine_root(q, iv, eps, squarefree=True)
             for iv in isolate_real_roots(q, squarefree=True)]
    if q.degree == p.degree:
        return [float(r) for r in roots]
    # multiplicity of each distinct root, peeled off one gcd level at a time
    out = [float(r) for r in roots]
    rest = poly_gcd(p, p.derivative())
    while rest.degree > 0:
        q2 = squarefree_part(rest)
        for iv in isolate_real_roots(q2, squarefree=True):
            out.append(float(refine_root(q2, iv, eps, squarefree=True)))
        rest = poly_gcd(rest, rest.derivative())
    return sorted(out)


def vieta_roots(s: Sequence, eps=DEFAULT_EPS) -> list[float] | None:
    """Real roots (with multiplicity) of the Vieta polynomial of ``s = (s_1, ..., s_n)``,
    or ``None`` when some root is not real."""
    p = vieta_polynomial(s)
    roots = _real_roots_with_multiplicity(p, eps)
    if len(roots) < p.degree:
        return None
    return roots


def order_check(roots: Sequence[float], gap: float = ORDER_GAP) -> tuple[float, ...] | None:
    """Arrange the roots as ``x_1 > -x_2 > x_3 > ... > 0`` with ``x_1 <= 1``, if possible."""
    xs = sorted(roots, key=abs, reverse=True)
    if not xs:
        return None
    for k, x in enumerate(xs):
        if (x > 0) != (k % 2 == 0):
            return None
    mags = [abs(x) for x in xs]
    if mags[0] > 1 + gap or mags[-1] <= gap:
        return None
    if any(a - b <= gap for a, b in zip(mags, mags[1:])):
        return None
    return tuple(xs)


def angles_from_x(x: Sequence[float]) -> tuple[float, ...]:
    """``alpha_k = arccos((-1)**(k+1) x_k)`` in radians."""
    return tuple(math.acos(min(1.0, abs(v))) for v in x)


def system_residual(x: Sequence[float], m, orders: Sequence[int]) -> float:
    """Largest residual of ``sum(x) = m`` and ``sum(P_k(x_i)) = 0``."""
    res = abs(sum(x) - float(m))
    for k in orders:
        cheb = cos_multiple_angle(k)
        res = max(res, abs(sum(cheb.eval_float(v) for v in x)))
    return res


def _range_reason(roots: Sequence[float]) -> str:
    xs = sorted(roots, key=abs, reverse=True)
    if abs(xs[0]) > 1 + ORDER_GAP:
        return "out-of-range"
    return "ordering"


def solve_fixed(r: RURFixed, orders: Sequence[int], *, eps=DEFAULT_EPS,
                sign_filter: bool = True) -> SolveReport:
    """All valid switching-angle groups encoded by one specialized RUR."""
    m0 = r.m_value
    chib = squarefree_part(r.chi)
    ivs = isolate_real_roots(chib, squarefree=True)
    solves = 1
    discarded = {"sign-filter": 0, "complex": 0, "ordering": 0, "out-of-range": 0}
    groups = []
    for iv in ivs:
        t0 = refine_root(chib, iv, eps, squarefree=True)
        s_exact = recover_s(r, t0)
        if sign_filter and not sign_pattern_ok(s_exact):
            discarded["sign-filter"] += 1
            continue
        s_float = tuple(float(v) for v in s_exact)
        roots = vieta_roots([Fraction(v) for v in s_float], eps)
        solves += 1
        if roots is None:
            discarded["complex"] += 1
            continue
        x = order_check(roots)
        if x is None:
            discarded[_range_reason(roots)] += 1
            continue
        groups.append(SolutionGroup(m0, s_float, x, angles_from_x(x),
                                    system_residual(x, m0, orders)))
    groups.sort(key=lambda g: g.angles_rad[0])
    return SolveReport(m0, tuple(groups), len(ivs), discarded, solves)


def solve(p: ParametricRUR, m0, *, eps=DEFAULT_EPS, sign_filter: bool = True,
          residual_tol: float = RESIDUAL_TOL) -> SolveReport:
    """Specialize at ``m0`` and recover every group.

    Groups whose residual misses ``residual_tol`` trigger one re-run with the root
    precision squared (near-colliding roots amplify refinement error).
    """
    r = specialize(p, m0)
    orders = harmonic_orders(p.n).orders
    report = solve_fixed(r, orders, eps=eps, sign_filter=sign_filter)
    if any(g.residual > residual_tol for g in report.groups):
        report = solve_fixed(r, orders, eps=Fraction(eps) ** 2, sign_filter=sign_filter)
    return report
