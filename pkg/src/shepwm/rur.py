"""Rational Univariate Representation of a zero-dimensional system over Q.

Pipeline for one fixed value of the modulation index: reduced Groebner basis
(Buchberger, degree reverse lexicographic order), standard monomials of the
quotient ring, multiplication matrices, a verified separating linear form
``t`` and finally the trace-based RUR polynomials ``chi``, ``g(1, T)`` and
``g(v, T)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import MultiPoly, UniPoly, as_rational, squarefree_part, poly_gcd

Monomial = tuple[int, ...]
Matrix = list[list[Fraction]]


class DimensionError(ValueError):
    """The ideal has infinitely many zeros."""


class NoSolutionsError(ValueError):
    """The ideal is the whole ring (the system is inconsistent)."""


class NotSeparatingError(ValueError):
    """A requested linear form does not separate the zeros."""


class SeparatingSearchError(RuntimeError):
    """No separating element was found within the candidate budget."""


# ---------------------------------------------------------------------------
# Groebner bases


def grevlex_key(e: Monomial):
    return (sum(e), tuple(-x for x in reversed(e)))


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a: Monomial, b: Monomial) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


class _Poly:
    """Monic working polynomial: sorted (descending) term list plus leading data."""

    __slots__ = ("terms", "lm", "sugar")

    def __init__(self, terms: dict[Monomial, Fraction], key, sugar: int | None = None):
        order = sorted(terms, key=key, reverse=True)
        lc = terms[order[0]]
        inv = 1 / lc
        self.terms = [(e, terms[e] * inv) for e in order]
        self.lm = order[0]
        self.sugar = max(sum(e) for e in order) if sugar is None else sugar


def _reduce(f: dict[Monomial, Fraction], basis: Sequence[_Poly], key, full=True) -> dict:
    """Normal form of ``f`` with respect to ``basis``."""
    f = dict(f)
    rem: dict[Monomial, Fraction] = {}
    while f:
        lm = max(f, key=key)
        c = f[lm]
        for g in basis:
            if _divides(g.lm, lm):
                shift = tuple(x - y for x, y in zip(lm, g.lm))
                for e, gc in g.terms:
                    m = tuple(a + b for a, b in zip(e, shift))
                    v = f.get(m, 0) - c * gc
                    if v:
                        f[m] = v
                    else:
                        f.pop(m, None)
                break
        else:
            rem[lm] = f.pop(lm)
            if not full:
                rem.update(f)
                return rem
    return rem


def _spoly(f: _Poly, g: _Poly) -> dict[Monomial, Fraction]:
    lcm = _lcm(f.lm, g.lm)
    out: dict[Monomial, Fraction] = {}
    for p, sgn in ((f, 1), (g, -1)):
        shift = tuple(x - y for x, y in zip(lcm, p.lm))
        for e, c in p.terms:
            m = tuple(a + b for a, b in zip(e, shift))
            v = out.get(m, 0) + sgn * c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def buchberger(polys: Iterable[dict[Monomial, Fraction]], key=grevlex_key) -> list[_Poly]:
    """Reduced Groebner basis of term dictionaries (all of one arity).

    Pairs are chosen by smallest sugar then smallest lcm; useless pairs are
    pruned with the Gebauer-Moeller criteria.
    """
    basis: list[_Poly] = []
    active: list[int] = []
    pairs: list[tuple[int, int, Monomial, int]] = []

    def update(h_idx: int):
        nonlocal active, pairs
        h = basis[h_idx]
        cands = [(g, _lcm(h.lm, basis[g].lm)) for g in active]
        kept = []
        for i, (g, l) in enumerate(cands):
            if _coprime(h.lm, basis[g].lm):
                kept.append((g, l))
                continue
            dominated = False
            for j, (_, l2) in enumerate(cands):
                if j == i:
                    continue
                if _divides(l2, l) and (l2 != l or j < i):
                    # keep one representative of equal lcms
                    dominated = True
                    break
            if not dominated:
                kept.append((g, l))
        new_pairs = [(g, h_idx, l) for g, l in kept if not _coprime(h.lm, basis[g].lm)]
        survivors = []
        for (i, j, l, s) in pairs:
            if (_divides(h.lm, l) and _lcm(basis[i].lm, h.lm) != l
                    and _lcm(basis[j].lm, h.lm) != l):
                continue
            survivors.append((i, j, l, s))
        for g, hi, l in new_pairs:
            sugar = max(basis[g].sugar - sum(basis[g].lm), h.sugar - sum(h.lm)) + sum(l)
            survivors.append((g, hi, l, sugar))
        pairs = survivors
        active = [g for g in active if not _divides(h.lm, basis[g].lm)] + [h_idx]

    for f in polys:
        r = _reduce(f, [basis[g] for g in active], key)
        if not r:
            continue
        basis.append(_Poly(r, key))
        update(len(basis) - 1)

    while pairs:
        best = min(range(len(pairs)), key=lambda k: (pairs[k][3], key(pairs[k][2])))
        i, j, l, sugar = pairs.pop(best)
        s = _spoly(basis[i], basis[j])
        if not s:
            continue
        r = _reduce(s, [basis[g] for g in active], key)
        if not r:
            continue
        basis.append(_Poly(r, key, sugar))
        update(len(basis) - 1)

    # minimal then reduced basis
    lead = [basis[g] for g in active]
    lead.sort(key=lambda p: key(p.lm))
    minimal = []
    for p in lead:
        if not any(_divides(q.lm, p.lm) for q in minimal):
            minimal.append(p)
    reduced = []
    for i, p in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        tail = dict(p.terms[1:])
        r = _reduce(tail, others, key)
        r[p.lm] = Fraction(1)
        reduced.append(_Poly(r, key))
    reduced.sort(key=lambda p: key(p.lm))
    return reduced


# ---------------------------------------------------------------------------
# quotient ring


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    bt = list(zip(*b))
    return [[sum((a[i][l] * bt[j][l] for l in range(k) if a[i][l]), Fraction(0))
             for j in range(m)] for i in range(n)]


def _trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def _trace_of_product(a: Matrix, b: Matrix) -> Fraction:
    n = len(a)
    return sum((a[i][j] * b[j][i] for i in range(n) for j in range(n) if a[i][j]), Fraction(0))


def _identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matrix_rank(a: Matrix) -> int:
    rows = [list(r) for r in a]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        inv = 1 / p[col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                f = rows[r][col] * inv
                rows[r] = [x - f * y for x, y in zip(rows[r], p)]
        rank += 1
    return rank


@dataclass(frozen=True, eq=False)
class QuotientRing:
    """Q[vars]/I for a zero-dimensional ideal, with its standard monomial basis."""

    variables: tuple[str, ...]
    groebner: tuple[MultiPoly, ...]
    monomial_basis: tuple[Monomial, ...]
    _basis: tuple = field(repr=False)
    _index: dict = field(repr=False)
    _var_mats: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.monomial_basis)

    def normal_form(self, f: MultiPoly) -> MultiPoly:
        f = f.reorder(self.variables)
        return MultiPoly(_reduce(f.terms, self._basis, grevlex_key), self.variables)

    def coordinates(self, f: MultiPoly) -> list[Fraction]:
        """Coefficient vector of the normal form in ``monomial_basis``."""
        nf = self.normal_form(f)
        vec = [Fraction(0)] * self.dimension
        for e, c in nf.terms.items():
            vec[self._index[e]] = c
        return vec

    def mult_matrix(self, f: MultiPoly) -> Matrix:
        """Matrix of ``[g] -> [f g]``; column ``j`` holds the image of basis element ``j``."""
        f = f.reorder(self.variables)
        used = f.used_variables()
        if f.total_degree() <= 1:
            # linear forms are cheap combinations of the cached variable matrices
            d = self.dimension
            out = [[Fraction(0)] * d for _ in range(d)]
            c0 = f.constant_term()
            for i in range(d):
                out[i][i] = c0
            for v in used:
                coeff = f.terms[tuple(int(w == v) for w in self.variables)]
                mv = self.variable_matrix(v)
                for i in range(d):
                    row, src = out[i], mv[i]
                    for j in range(d):
                        if src[j]:
                            row[j] += coeff * src[j]
            return out
        cols = []
        for b in self.monomial_basis:
            cols.append(self.coordinates(f * MultiPoly({b: 1}, self.variables)))
        return [list(r) for r in zip(*cols)]

    def variable_matrix(self, name: str) -> Matrix:
        if name not in self._var_mats:
            i = self.variables.index(name)
            d = self.dimension
            cols = []
            for b in self.monomial_basis:
                e = list(b)
                e[i] += 1
                e = tuple(e)
                if e in self._index:
                    col = [Fraction(0)] * d
                    col[self._index[e]] = Fraction(1)
                else:
                    col = self.coordinates(MultiPoly({e: 1}, self.variables))
                cols.append(col)
            self._var_mats[name] = [list(r) for r in zip(*cols)]
        return self._var_mats[name]

    def basis_matrices(self) -> list[Matrix]:
        """Multiplication matrices of every standard monomial (built incrementally)."""
        d = self.dimension
        mats: list[Matrix] = []
        for b in self.monomial_basis:
            if not any(b):
                mats.append(_identity(d))
                continue
            i = next(k for k, x in enumerate(b) if x)
            parent = tuple(x - (k == i) for k, x in enumerate(b))
            mats.append(_mat_mul(self.variable_matrix(self.variables[i]), mats[self._index[parent]]))
        return mats

    def trace_form_rank(self) -> int:
        """Rank of ``(a, b) -> Tr(M_{ab})``: the number of distinct zeros."""
        mats = self.basis_matrices()
        d = self.dimension
        q = [[_trace_of_product(mats[i], mats[j]) for j in range(d)] for i in range(d)]
        return matrix_rank(q)


def groebner(system: Sequence[MultiPoly]) -> QuotientRing:
    """Reduced degrevlex Groebner basis and quotient ring of a polynomial system."""
    if not system:
        raise DimensionError("empty system")
    variables = system[0].variables
    polys = [p.reorder(variables).terms for p in system if not p.is_zero()]
    basis = buchberger(polys)
    if not basis:
        raise DimensionError("the zero ideal is not zero-dimensional")
    if any(not any(p.lm) for p in basis):
        raise NoSolutionsError("1 is in the ideal: the system has no solutions")
    n = len(variables)
    for i in range(n):
        if not any(p.lm[i] and sum(p.lm) == p.lm[i] for p in basis):
            raise DimensionError(f"no pure power of {variables[i]} among leading monomials")
    lms = [p.lm for p in basis]
    standard = []
    seen = {(0,) * n}
    frontier = [(0,) * n]
    while frontier:
        e = frontier.pop()
        if any(_divides(l, e) for l in lms):
            continue
        standard.append(e)
        for i in range(n):
            nxt = tuple(x + (k == i) for k, x in enumerate(e))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    standard.sort(key=grevlex_key)
    gb = tuple(MultiPoly(dict(p.terms), variables) for p in basis)
    return QuotientRing(variables, gb, tuple(standard), tuple(basis),
                        {e: i for i, e in enumerate(standard)})


def mult_matrix(q: QuotientRing, f: MultiPoly) -> Matrix:
    return q.mult_matrix(f)


# ---------------------------------------------------------------------------
# characteristic polynomial and RUR


def power_traces(mt: Matrix, count: int, mv: Matrix | None = None) -> list[Fraction]:
    """``[Tr(Mv Mt^k) for k in range(count)]`` (``Mv`` defaults to the identity)."""
    d = len(mt)
    cur = _identity(d) if mv is None else [list(r) for r in mv]
    out = []
    for _ in range(count):
        out.append(_trace(cur))
        cur = _mat_mul(mt, cur)
    return out


def charpoly_from_traces(traces: Sequence[Fraction], dim: int, var: str = "T") -> UniPoly:
    """Characteristic polynomial from power traces ``Tr(M^k)``, ``k = 0..dim``, via
    Newton's identities."""
    e = [Fraction(1)]
    for k in range(1, dim + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * traces[i]
        e.append(acc / k)
    coeffs = [Fraction(0)] * (dim + 1)
    for k in range(dim + 1):
        coeffs[dim - k] = (-1) ** k * e[k]
    return UniPoly(tuple(coeffs), var)


def charpoly(m: Matrix, var: str = "T") -> UniPoly:
    d = len(m)
    return charpoly_from_traces(power_traces(m, d + 1), d, var)


@dataclass(frozen=True)
class SeparatingElement:
    """Integer linear form ``t = sum(c_i * v_i)`` over the coordinate variables."""

    coefficients: tuple[int, ...]
    variables: tuple[str, ...]

    def as_poly(self, ring_vars: Sequence[str]) -> MultiPoly:
        terms = {}
        for c, v in zip(self.coefficients, self.variables):
            if c:
                terms[tuple(int(w == v) for w in ring_vars)] = c
        return MultiPoly(terms, tuple(ring_vars))

    def __str__(self) -> str:
        bits = []
        for c, v in zip(self.coefficients, self.variables):
            if c:
                bits.append(v if c == 1 else f"{c}*{v}")
        return " + ".join(bits).replace("+ -", "- ")


@dataclass(frozen=True)
class RURFixed:
    """RUR at one parameter value: zeros are ``g_coord[i](T0) / g_one(T0)`` over the
    roots ``T0`` of the square-free part of ``chi``."""

    t: SeparatingElement
    chi: UniPoly
    g_one: UniPoly
    g_coord: tuple[UniPoly, ...]
    m_value: Fraction | None = None

    @property
    def variables(self) -> tuple[str, ...]:
        return self.t.variables

    @property
    def chi_bar(self) -> UniPoly:
        return squarefree_part(self.chi)

    def coordinate(self, name: str) -> UniPoly:
        return self.g_coord[self.variables.index(name)]


def _candidate_forms(n: int, budget: int = 64):
    yield from (tuple(int(i == k) for i in range(n)) for k in range(n))
    tried = set()
    b = 1
    while b <= budget:
        cands = []
        for c in itertools.product(range(-b, b + 1), repeat=n):
            if not any(c) or c in tried:
                continue
            first = next(x for x in c if x)
            if first < 0:
                continue
            cands.append(c)
        cands.sort(key=lambda c: (max(map(abs, c)), sum(map(abs, c)), c))
        for c in cands:
            tried.add(c)
            if sum(map(abs, c)) > 1:
                yield c
        b *= 2


def is_separating(q: QuotientRing, t: SeparatingElement, *, n_zeros: int | None = None) -> bool:
    """Rouillier's criterion: deg of the square-free part of chi_t equals the rank of
    the trace form."""
    if n_zeros is None:
        n_zeros = q.trace_form_rank()
    chi = charpoly(q.mult_matrix(t.as_poly(q.variables)))
    return squarefree_part(chi).degree == n_zeros


def find_separating(q: QuotientRing, coords: Sequence[str] | None = None,
                    budget: int = 64) -> SeparatingElement:
    coords = tuple(coords or _default_coords(q.variables))
    n_zeros = q.trace_form_rank()
    tried = 0
    for c in _candidate_forms(len(coords), budget):
        tried += 1
        t = SeparatingElement(c, coords)
        if is_separating(q, t, n_zeros=n_zeros):
            return t
    raise SeparatingSearchError(
        f"no separating form with |c_i| <= {budget} after {tried} candidates "
        f"(dimension {q.dimension}, {n_zeros} distinct zeros)")


def _default_coords(variables: Sequence[str]) -> tuple[str, ...]:
    def natural(v):
        head = v.rstrip("0123456789")
        tail = v[len(head):]
        return (head, int(tail) if tail else -1)
    return tuple(sorted(variables, key=natural))


def rur_from_quotient(q: QuotientRing, t: SeparatingElement, m_value=None) -> RURFixed:
    d = q.dimension
    mt = q.mult_matrix(t.as_poly(q.variables))
    chi = charpoly_from_traces(power_traces(mt, d + 1), d)
    chib = squarefree_part(chi)
    db = chib.degree
    a = chib.coeffs

    def g_of(mv: Matrix | None) -> UniPoly:
        tr = power_traces(mt, db, mv)
        cs = [sum((a[k] * tr[k - j - 1] for k in range(j + 1, db + 1)), Fraction(0))
              for j in range(db)]
        return UniPoly(tuple(cs))

    g_one = g_of(None)
    g_coord = tuple(g_of(q.variable_matrix(v)) for v in t.variables)
    return RURFixed(t, chi, g_one, g_coord,
                    None if m_value is None else as_rational(m_value))


def rur_fixed(system: Sequence[MultiPoly], m_value=None, *, coords: Sequence[str] | None = None,
              t: SeparatingElement | Sequence[int] | None = None, param: str = "m") -> RURFixed:
    """RUR of ``system`` after substituting ``param = m_value``.

    ``coords`` fixes the coordinate order (default: natural sort of the ring
    variables); ``t`` may be given to force a separating form, in which case it is
    verified and :class:`NotSeparatingError` raised if it fails.
    """
    polys = list(system)
    ring_vars = tuple(v for v in polys[0].variables if v != param)
    if m_value is not None:
        mv = as_rational(m_value)
        polys = [p.subs({param: mv}).reorder(ring_vars) if param in p.variables
                 else p.reorder(ring_vars) for p in polys]
    else:
        polys = [p.reorder(ring_vars) for p in polys]
    q = groebner(polys)
    coords = tuple(coords or _default_coords(ring_vars))
    if t is None:
        sep = find_separating(q, coords)
    else:
        sep = t if isinstance(t, SeparatingElement) else SeparatingElement(tuple(t), coords)
        if sep.variables != coords:
            raise ValueError("separating element variables differ from coordinates")
        if not is_separating(q, sep):
            raise NotSeparatingError(f"{sep} does not separate the zeros at m = {m_value}")
    return rur_from_quotient(q, sep, m_value)


def recover_zero(r: RURFixed, t0) -> list:
    """Coordinates ``g_coord(t0) / g_one(t0)`` at an (approximate) root of chi_bar."""
    den = r.g_one(t0)
    if den == 0:
        raise ZeroDivisionError("g_one vanishes at the given root")
    return [g(t0) / den for g in r.g_coord]


def check_gcd_invariant(r: RURFixed) -> bool:
    """``g_one`` has no common root with the square-free part of ``chi``."""
    return poly_gcd(r.chi_bar, r.g_one).degree == 0
