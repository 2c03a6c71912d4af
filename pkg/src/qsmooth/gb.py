"""Groebner bases for ideals and for submodules of free modules P^d over Q.

Elements are vectors of polynomials (d = 1 recovers plain ideals).  The
module order is term-over-position: monomials are compared first by the
chosen monomial order, ties broken by component index (lower index wins).

The engine is a deterministic Buchberger: the pair with the lowest lcm
degree is processed first, ties broken lexicographically on generator
indices.  The chain criterion is applied (per component); the coprimality
criterion only for ideals, where it is valid.  Arithmetic is fraction-free
over the integers with content removal after every reduction, so
coefficients stay bounded; the final reduced basis is monic.

On top of the engine: normal forms, membership, quotient dimensions with
standard monomial-vector bases, ideal quotient saturation (I : g^inf) via
a single tag variable, ideal intersection, saturation by an ideal, and
radical membership via the Rabinowitsch trick.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Sequence

from .poly import (
    GREVLEX,
    MonomialOrder,
    PolyError,
    Polynomial,
    elimination_order,
    poly_to_text,
)

Term = tuple  # (component, exponent-tuple)


class GBError(ValueError):
    pass


class DegreeBudgetExceeded(RuntimeError):
    """Raised when a basis element's lead degree exceeds the configured cap."""


@dataclass(frozen=True)
class VectorPolynomial:
    """Element of the free module P^d; components share a variable count."""

    components: tuple

    def __post_init__(self):
        if not self.components:
            raise GBError("vector polynomial needs at least one component")
        n = self.components[0].nvars
        if any(p.nvars != n for p in self.components):
            raise GBError("components disagree on variable count")

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def __add__(self, other: "VectorPolynomial") -> "VectorPolynomial":
        self._check(other)
        return VectorPolynomial(
            tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __sub__(self, other: "VectorPolynomial") -> "VectorPolynomial":
        self._check(other)
        return VectorPolynomial(
            tuple(a - b for a, b in zip(self.components, other.components))
        )

    def scale(self, poly: Polynomial) -> "VectorPolynomial":
        return VectorPolynomial(tuple(poly * p for p in self.components))

    def _check(self, other):
        if other.rank != self.rank or other.nvars != self.nvars:
            raise GBError("vector polynomial shape mismatch")

    def constant_vector(self) -> tuple:
        return tuple(p.constant_term() for p in self.components)

    @staticmethod
    def from_polynomial(p: Polynomial) -> "VectorPolynomial":
        return VectorPolynomial((p,))

    @staticmethod
    def unit(rank: int, nvars: int, index: int) -> "VectorPolynomial":
        comps = [Polynomial.zero(nvars) for _ in range(rank)]
        comps[index] = Polynomial.one(nvars)
        return VectorPolynomial(tuple(comps))


def _vec_to_dict(v: VectorPolynomial) -> dict:
    out = {}
    for comp, poly in enumerate(v.components):
        for expt, coeff in poly.terms.items():
            out[(comp, expt)] = coeff
    return out


def _dict_to_vec(d: dict, rank: int, nvars: int) -> VectorPolynomial:
    comps = [dict() for _ in range(rank)]
    for (comp, expt), coeff in d.items():
        comps[comp][expt] = coeff
    return VectorPolynomial(tuple(Polynomial(nvars, c) for c in comps))


def _term_key(order: MonomialOrder) -> Callable[[Term], tuple]:
    key = order.key
    # term-over-position: monomial first, lower component bigger on ties
    return lambda term: (key(term[1]), -term[0])


def _clear_denominators(d: dict) -> dict:
    """Scale to primitive integer coefficients with positive leading content."""
    if not d:
        return {}
    denom_lcm = 1
    for c in d.values():
        denom_lcm = denom_lcm * c.denominator // gcd(denom_lcm, c.denominator)
    ints = {t: int(c * denom_lcm) for t, c in d.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {t: v // g for t, v in ints.items()}
    return ints


def _content_normalize(d: dict) -> dict:
    g = 0
    for v in d.values():
        g = gcd(g, v)
    if g > 1:
        return {t: v // g for t, v in d.items()}
    return d


class _Element:
    """Basis element in primitive integer form with a cached lead term."""

    __slots__ = ("terms", "lead", "lead_coeff", "lead_key")

    def __init__(self, terms: dict, keyfn):
        self.terms = terms
        self.lead = max(terms, key=keyfn)
        self.lead_coeff = terms[self.lead]
        self.lead_key = keyfn(self.lead)


def _reduce(
    dividend: dict,
    basis: Sequence[_Element],
    keyfn,
    full: bool,
):
    """Fraction-free reduction of ``dividend`` by ``basis``.

    Returns (reduced integer dict, scale) where reduced == scale * true
    remainder; scale is a positive Fraction.  With full=False only lead
    terms are eliminated (weak normal form), which suffices inside
    Buchberger's loop.
    """
    work = dict(dividend)
    scale = Fraction(1)
    heap = [(_neg(keyfn(t)), t) for t in work]
    heapq.heapify(heap)
    finalized = set()
    while heap:
        _, term = heapq.heappop(heap)
        coeff = work.get(term)
        if not coeff or term in finalized:
            continue
        comp, expt = term
        reducer = None
        for el in basis:
            lcomp, lexpt = el.lead
            if lcomp == comp and all(a <= b for a, b in zip(lexpt, expt)):
                reducer = el
                break
        if reducer is None:
            if not full:
                break
            finalized.add(term)
            continue
        lc = reducer.lead_coeff
        quot = tuple(a - b for a, b in zip(expt, reducer.lead[1]))
        c = coeff
        if lc < 0:
            lc, c = -lc, -c
        # work := lc * work - c * x^quot * reducer
        if lc != 1:
            for t in work:
                work[t] *= lc
            scale *= lc
        for (rcomp, rexpt), rc in reducer.terms.items():
            t = (rcomp, tuple(a + b for a, b in zip(quot, rexpt)))
            new = work.get(t, 0) - c * rc
            if new:
                if t not in work and t not in finalized:
                    heapq.heappush(heap, (_neg(keyfn(t)), t))
                work[t] = new
            else:
                work.pop(t, None)
        g = 0
        for v in work.values():
            g = gcd(g, v)
        if g > 1:
            work = {t: v // g for t, v in work.items()}
            scale /= g
    return {t: v for t, v in work.items() if v}, scale


def _neg(key):
    # negate a nested numeric tuple for max-heap behaviour on heapq
    return tuple(-x if isinstance(x, int) else _neg(x) for x in key)


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis of a submodule of P^d (monic generators,
    sorted by ascending lead term)."""

    generators: tuple  # tuple[VectorPolynomial, ...]
    order: MonomialOrder
    rank: int
    nvars: int
    reduced: bool = True

    def leads(self):
        keyfn = _term_key(self.order)
        out = []
        for g in self.generators:
            d = _vec_to_dict(g)
            out.append(max(d, key=keyfn))
        return out

    def is_trivial(self) -> bool:
        """True when the submodule is all of P^d (every unit vector present)."""
        zero = (0,) * self.nvars
        comps = {t[0] for t in self.leads() if t[1] == zero}
        return len(comps) == self.rank

    def canonical_text(self) -> str:
        lines = []
        for g in self.generators:
            lines.append("[" + "; ".join(poly_to_text(p) for p in g.components) + "]")
        return "\n".join(lines)


@dataclass(frozen=True)
class QuotientBasis:
    """Standard monomial-vectors (exponent, component) of P^d modulo a
    submodule; dimension is None when infinite."""

    standard: Optional[tuple]
    dimension: Optional[int]

    @property
    def is_finite(self) -> bool:
        return self.dimension is not None


# ---------------------------------------------------------------------------


def _buchberger_raw(
    gens: Sequence[VectorPolynomial],
    order: MonomialOrder,
    max_degree: Optional[int] = None,
):
    if not gens:
        raise GBError("empty generator list")
    rank, nvars = gens[0].rank, gens[0].nvars
    for g in gens:
        if g.rank != rank or g.nvars != nvars:
            raise GBError("generators disagree on rank or variable count")
    keyfn = _term_key(order)

    basis: list[_Element] = []
    for g in gens:
        d = _clear_denominators(_vec_to_dict(g))
        if d:
            basis.append(_Element(d, keyfn))

    def lcm_of(i, j):
        (ci, ei), (cj, ej) = basis[i].lead, basis[j].lead
        if ci != cj:
            return None
        return tuple(max(a, b) for a, b in zip(ei, ej))

    pairs = []
    processed = set()
    for j in range(len(basis)):
        for i in range(j):
            m = lcm_of(i, j)
            if m is not None:
                heapq.heappush(pairs, (sum(m), i, j))

    while pairs:
        _, i, j = heapq.heappop(pairs)
        m = lcm_of(i, j)
        processed.add((i, j))
        ei, ej = basis[i], basis[j]
        # coprimality criterion: valid for ideals only
        if rank == 1 and all(
            min(a, b) == 0 for a, b in zip(ei.lead[1], ej.lead[1])
        ):
            continue
        # chain criterion: a third element whose lead divides the lcm,
        # with both sub-pairs already handled
        skip = False
        comp = ei.lead[0]
        for k, ek in enumerate(basis):
            if k in (i, j) or ek.lead[0] != comp:
                continue
            if all(a <= b for a, b in zip(ek.lead[1], m)):
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik in processed and pjk in processed:
                    skip = True
                    break
        if skip:
            continue
        # S-vector, fraction-free
        ui = tuple(a - b for a, b in zip(m, ei.lead[1]))
        uj = tuple(a - b for a, b in zip(m, ej.lead[1]))
        s: dict = {}
        for (c, e), v in ei.terms.items():
            t = (c, tuple(a + b for a, b in zip(e, ui)))
            s[t] = s.get(t, 0) + ej.lead_coeff * v
        for (c, e), v in ej.terms.items():
            t = (c, tuple(a + b for a, b in zip(e, uj)))
            new = s.get(t, 0) - ei.lead_coeff * v
            if new:
                s[t] = new
            else:
                s.pop(t, None)
        s = {t: v for t, v in s.items() if v}
        if not s:
            continue
        red, _ = _reduce(s, basis, keyfn, full=False)
        if not red:
            continue
        red = _content_normalize(red)
        el = _Element(red, keyfn)
        if max_degree is not None and sum(el.lead[1]) > max_degree:
            raise DegreeBudgetExceeded(
                f"basis lead degree {sum(el.lead[1])} exceeds cap {max_degree}"
            )
        k = len(basis)
        basis.append(el)
        for i2 in range(k):
            m2 = lcm_of(i2, k)
            if m2 is not None:
                heapq.heappush(pairs, (sum(m2), i2, k))
    return basis, keyfn


def buchberger(
    gens: Sequence[VectorPolynomial],
    order: MonomialOrder = GREVLEX,
    max_degree: Optional[int] = None,
) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by ``gens``.

    Deterministic: normal pair selection (lowest lcm degree, then index
    order) and a canonical reduced output (monic, sorted by lead).
    """
    if not gens:
        raise GBError("empty generator list")
    rank, nvars = gens[0].rank, gens[0].nvars

    cached = _cache_lookup(gens, order, rank, nvars)
    if cached is not None:
        return cached

    basis, keyfn = _buchberger_raw(gens, order, max_degree)

    # minimalize: drop elements whose lead is divisible by another lead
    basis_sorted = sorted(basis, key=lambda el: el.lead_key)
    minimal: list[_Element] = []
    for el in basis_sorted:
        comp, expt = el.lead
        if any(
            m.lead[0] == comp and all(a <= b for a, b in zip(m.lead[1], expt))
            for m in minimal
        ):
            continue
        minimal.append(el)
    # tail-reduce each element against the others
    reduced: list[VectorPolynomial] = []
    for idx, el in enumerate(minimal):
        others = [m for k, m in enumerate(minimal) if k != idx]
        if others:
            red, _ = _reduce(el.terms, others, keyfn, full=True)
        else:
            red = dict(el.terms)
        lead = max(red, key=keyfn)
        lc = Fraction(red[lead])
        vec = {t: Fraction(v) / lc for t, v in red.items()}
        reduced.append(_dict_to_vec(vec, rank, nvars))
    reduced.sort(key=lambda v: keyfn(max(_vec_to_dict(v), key=keyfn)))
    if not reduced:
        # zero submodule: keep a canonical empty basis marker
        result = GroebnerBasis(tuple(), order, rank, nvars)
    else:
        result = GroebnerBasis(tuple(reduced), order, rank, nvars)
    _cache_store(gens, order, rank, nvars, result)
    return result


def groebner_ideal(
    polys: Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
    max_degree: Optional[int] = None,
) -> GroebnerBasis:
    return buchberger([VectorPolynomial.from_polynomial(p) for p in polys], order,
                      max_degree)


def normal_form(v: VectorPolynomial, gb: GroebnerBasis) -> VectorPolynomial:
    """Canonical representative of v modulo the submodule: no term is
    divisible by a basis lead; v - result lies in the submodule."""
    if v.rank != gb.rank or v.nvars != gb.nvars:
        raise GBError("dimension mismatch between vector and basis")
    keyfn = _term_key(gb.order)
    d = _vec_to_dict(v)
    if not d or not gb.generators:
        return v
    basis = [
        _Element(_clear_denominators(_vec_to_dict(g)), keyfn) for g in gb.generators
    ]
    num = _clear_denominators(d)
    # remember the exact scale from clearing denominators
    entry = next(iter(d))
    pre_scale = Fraction(num[entry]) / d[entry] if num else Fraction(1)
    red, scale = _reduce(num, basis, keyfn, full=True)
    total = pre_scale * scale
    return _dict_to_vec({t: Fraction(c) / total for t, c in red.items()}, gb.rank,
                        gb.nvars)


def normal_form_poly(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    return normal_form(VectorPolynomial.from_polynomial(p), gb).components[0]


def membership(v: VectorPolynomial, gb: GroebnerBasis) -> bool:
    return normal_form(v, gb).is_zero()


def ideal_membership(p: Polynomial, gb: GroebnerBasis) -> bool:
    return membership(VectorPolynomial.from_polynomial(p), gb)


def quotient_dimension(gb: GroebnerBasis) -> QuotientBasis:
    """Standard monomial-vector basis of P^rank modulo the submodule.

    Infinite exactly when some component lacks a pure power of some
    variable among the basis lead terms of that component.
    """
    nvars = gb.nvars
    leads_by_comp: dict[int, list] = {c: [] for c in range(gb.rank)}
    for comp, expt in gb.leads():
        leads_by_comp[comp].append(expt)
    standard = []
    for comp in range(gb.rank):
        leads = leads_by_comp[comp]
        if nvars == 0:
            if not leads:
                standard.append(((), comp))
            continue
        bounds = []
        for i in range(nvars):
            pure = [
                e[i]
                for e in leads
                if all(v == 0 for j, v in enumerate(e) if j != i)
            ]
            if not pure:
                return QuotientBasis(None, None)
            bounds.append(min(pure))
        # enumerate the box under the bounds, keep non-divisible monomials
        def walk(prefix, i):
            if i == nvars:
                expt = tuple(prefix)
                if not any(all(a <= b for a, b in zip(l, expt)) for l in leads):
                    standard.append((expt, comp))
                return
            for k in range(bounds[i]):
                walk(prefix + [k], i + 1)

        walk([], 0)
    standard.sort(key=lambda t: (_term_key(gb.order)((t[1], t[0]))))
    return QuotientBasis(tuple(standard), len(standard))


# -- ideal-level operations -------------------------------------------------


def _lift_to_tagged(p: Polynomial, extra: int = 1) -> Polynomial:
    return Polynomial(
        p.nvars + extra, {e + (0,) * extra: c for e, c in p.terms.items()}
    )


def _drop_tag(p: Polynomial, extra: int = 1) -> Polynomial:
    return Polynomial(p.nvars - extra, {e[:-extra]: c for e, c in p.terms.items()})


def ideal_quotient_saturation(
    gb_or_gens, g: Polynomial, order: MonomialOrder = GREVLEX,
    max_degree: Optional[int] = None,
) -> GroebnerBasis:
    """Saturation (I : g^inf) by a single polynomial, computed by
    eliminating a tag variable t from I + (1 - t*g)."""
    gens = _ideal_generators(gb_or_gens)
    if g.is_zero():
        raise GBError("saturation by the zero polynomial")
    n = gens[0].nvars
    tagged = [_lift_to_tagged(p) for p in gens]
    t = Polynomial.variable(n + 1, n)
    tagged.append(Polynomial.one(n + 1) - t * _lift_to_tagged(g))
    elim = elimination_order(n + 1, [n])
    egb = groebner_ideal(tagged, elim, max_degree)
    kept = [
        _drop_tag(v.components[0])
        for v in egb.generators
        if all(e[-1] == 0 for e in v.components[0].terms)
    ]
    if not kept:
        kept = [Polynomial.zero(n)]
    return groebner_ideal(kept, order, max_degree)


def ideal_intersection(
    a_gens: Sequence[Polynomial],
    b_gens: Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
    max_degree: Optional[int] = None,
) -> GroebnerBasis:
    """Intersection of two ideals via t*I + (1-t)*J and tag elimination."""
    n = a_gens[0].nvars
    t = Polynomial.variable(n + 1, n)
    one_minus_t = Polynomial.one(n + 1) - t
    tagged = [t * _lift_to_tagged(p) for p in a_gens]
    tagged += [one_minus_t * _lift_to_tagged(p) for p in b_gens]
    elim = elimination_order(n + 1, [n])
    egb = groebner_ideal(tagged, elim, max_degree)
    kept = [
        _drop_tag(v.components[0])
        for v in egb.generators
        if all(e[-1] == 0 for e in v.components[0].terms)
    ]
    if not kept:
        kept = [Polynomial.zero(n)]
    return groebner_ideal(kept, order, max_degree)


def saturation_by_ideal(
    gb_or_gens, j_gens: Sequence[Polynomial], order: MonomialOrder = GREVLEX,
    max_degree: Optional[int] = None,
) -> GroebnerBasis:
    """(I : J^inf) as the intersection of the single-generator saturations."""
    gens = _ideal_generators(gb_or_gens)
    n = gens[0].nvars
    parts = [
        ideal_quotient_saturation(gens, g, order, max_degree) for g in j_gens
    ]
    current = _gb_polys(parts[0])
    for part in parts[1:]:
        rhs = _gb_polys(part)
        if not current or not rhs:
            current = []
            break
        current = _gb_polys(
            ideal_intersection(current, rhs, order, max_degree)
        )
    if not current:
        current = [Polynomial.zero(n)]
    return groebner_ideal(current, order, max_degree)


def radical_membership(f: Polynomial, gb_or_gens,
                       max_degree: Optional[int] = None) -> bool:
    """True iff f vanishes on the zero set of the ideal:
    1 in I + (1 - t*f) in the tag-extended ring (Rabinowitsch)."""
    gens = _ideal_generators(gb_or_gens)
    n = gens[0].nvars
    if f.is_zero():
        # the zero function vanishes everywhere; vacuously on V(I)
        return True
    tagged = [_lift_to_tagged(p) for p in gens]
    t = Polynomial.variable(n + 1, n)
    tagged.append(Polynomial.one(n + 1) - t * _lift_to_tagged(f))
    egb = groebner_ideal(tagged, GREVLEX, max_degree)
    return egb.is_trivial()


def _ideal_generators(gb_or_gens) -> list:
    if isinstance(gb_or_gens, GroebnerBasis):
        if gb_or_gens.rank != 1:
            raise GBError("ideal operation requires rank 1")
        polys = _gb_polys(gb_or_gens)
        return polys if polys else [Polynomial.zero(gb_or_gens.nvars)]
    gens = list(gb_or_gens)
    if not gens:
        raise GBError("empty generator list")
    return gens


def _gb_polys(gb: GroebnerBasis) -> list:
    return [v.components[0] for v in gb.generators]


# -- optional on-disk cache -------------------------------------------------

_active_cache = None


def set_cache(cache) -> None:
    """Install (or clear with None) a cache with get(key)/put(key, gb)."""
    global _active_cache
    _active_cache = cache


def cache_key_text(gens, order, rank, nvars) -> str:
    lines = [f"rank={rank}", f"nvars={nvars}", f"order={order.descriptor()}"]
    for g in gens:
        lines.append("[" + "; ".join(poly_to_text(p) for p in g.components) + "]")
    return "\n".join(lines)


def _cache_lookup(gens, order, rank, nvars):
    if _active_cache is None:
        return None
    return _active_cache.get(cache_key_text(gens, order, rank, nvars), order, rank,
                             nvars)


def _cache_store(gens, order, rank, nvars, result):
    if _active_cache is not None:
        _active_cache.put(cache_key_text(gens, order, rank, nvars), result)
