"""Global verification on projective, product, and weighted ambients.

Everything runs on affine cones and their coordinate slices, with exact
rational arithmetic:

* singular_locus_check certifies that a hypersurface is singular exactly
  at the claimed coordinate points, by saturating the cone Jacobian ideal
  with each factor's irrelevant ideal and pinning the locus chart by
  chart (radical membership of the chart coordinates).
* fixed_locus enumerates the coordinate subspaces fixed by a diagonal
  cyclic action (per lift by ambient scalars) and counts the intersection
  with the hypersurface where it is finite.
* family_smoothing_verify certifies that the fibers of F + s*P are smooth
  for all small nonzero s: per chart, eliminating the chart variables
  from the fiber-Jacobian ideal must leave a nonzero univariate
  polynomial in s, whose roots bound the exceptional parameter values.
* reid_tai_terminal is the standard fractional-age inequality for an
  isolated cyclic quotient point of a 3-fold.
* example_pipeline strings these together with germ extraction and the
  equivariant good-direction machinery, emitting one record per step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .equiv import (
    CyclicAction,
    character_decomposition,
    character_of,
    class_character,
    invariant_good_direction,
    is_ordinary,
    ordinarity_note,
)
from .gb import (
    GroebnerBasis,
    groebner_ideal,
    ideal_intersection,
    ideal_quotient_saturation,
    quotient_dimension,
    radical_membership,
)
from .poly import GREVLEX, Polynomial, elimination_order, poly_to_text
from .t1 import (
    GermPresentation,
    ProperSubmodule,
    T1Class,
    good_direction_for_submodule,
    minimalize,
    t1_module,
    verify_good_direction_bertini,
)


class GeometryError(ValueError):
    pass


# -- ambient spaces ---------------------------------------------------------


@dataclass(frozen=True)
class AmbientSpace:
    """Projective space, a product of projective spaces, or a weighted
    projective space, presented by its cone coordinates.

    factors: tuple of coordinate-index tuples, one per projective factor
    weights: one positive weight per coordinate (all 1 unless weighted)
    """

    kind: str  # "projective" | "product" | "weighted"
    factors: tuple
    weights: tuple

    @staticmethod
    def projective(n: int) -> "AmbientSpace":
        if n < 1:
            raise GeometryError("projective dimension must be positive")
        return AmbientSpace("projective", (tuple(range(n + 1)),), (1,) * (n + 1))

    @staticmethod
    def product(dims: Sequence[int]) -> "AmbientSpace":
        if len(dims) < 2:
            raise GeometryError("a product needs at least two factors")
        factors = []
        start = 0
        for n in dims:
            if n < 1:
                raise GeometryError("factor dimensions must be positive")
            factors.append(tuple(range(start, start + n + 1)))
            start += n + 1
        return AmbientSpace("product", tuple(factors), (1,) * start)

    @staticmethod
    def weighted(weights: Sequence[int]) -> "AmbientSpace":
        if len(weights) < 2 or any(w < 1 for w in weights):
            raise GeometryError("weighted space needs positive weights")
        return AmbientSpace(
            "weighted", (tuple(range(len(weights))),), tuple(weights)
        )

    @property
    def ncoords(self) -> int:
        return len(self.weights)

    def factor_of(self, coord: int) -> int:
        for k, f in enumerate(self.factors):
            if coord in f:
                return k
        raise GeometryError("coordinate out of range")

    def multidegree(self, f: Polynomial):
        """Per-factor weighted degrees, or None if not multi-homogeneous."""
        if f.nvars != self.ncoords:
            raise GeometryError("coordinate count mismatch")
        degs = []
        for factor in self.factors:
            seen = {
                sum(self.weights[i] * e[i] for i in factor) for e in f.terms
            }
            if len(seen) > 1:
                return None
            degs.append(next(iter(seen)) if seen else None)
        return tuple(degs)

    def singular_coordinate_subspaces(self) -> list:
        """Coordinate subspaces where the ambient itself is singular
        (weighted case: coordinates sharing a common weight factor)."""
        if self.kind != "weighted":
            return []
        primes = set()
        for w in self.weights:
            n, p = w, 2
            while p * p <= n:
                if n % p == 0:
                    primes.add(p)
                    while n % p == 0:
                        n //= p
                p += 1
            if n > 1:
                primes.add(n)
        out = []
        for q in sorted(primes):
            coords = tuple(i for i, w in enumerate(self.weights) if w % q == 0)
            if coords and coords not in out:
                out.append(coords)
        return out


@dataclass(frozen=True)
class HypersurfaceScheme:
    """A (multi-)homogeneous hypersurface in an ambient space."""

    ambient: AmbientSpace
    polynomial: Polynomial
    coordinate_names: tuple

    def __post_init__(self):
        if len(self.coordinate_names) != self.ambient.ncoords:
            raise GeometryError("coordinate name count mismatch")
        if self.polynomial.is_zero():
            raise GeometryError("zero defining polynomial")
        if self.multidegree() is None:
            raise GeometryError("defining polynomial is not (multi-)homogeneous")

    def multidegree(self):
        return self.ambient.multidegree(self.polynomial)


@dataclass(frozen=True)
class DiagonalProjectiveAction:
    """Cyclic action multiplying coordinate i by the weight-a_i power of a
    primitive r-th root of unity; always descends to the ambient."""

    order: int
    weights: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "weights", tuple(w % self.order for w in self.weights)
        )

    def cone_action(self) -> CyclicAction:
        return CyclicAction(self.order, self.weights)


@dataclass(frozen=True)
class SmoothingFamily:
    """F + s * perturbation with matching (multi-)degree."""

    scheme: HypersurfaceScheme
    perturbation: Polynomial
    parameter: str = "s"

    def __post_init__(self):
        if self.perturbation.is_zero():
            return  # rejected later with a verdict, not an exception
        if (
            self.scheme.ambient.multidegree(self.perturbation)
            != self.scheme.multidegree()
        ):
            raise GeometryError("perturbation degree does not match the equation")


# -- charts -----------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    """Affine slice of the cone setting one pivot coordinate per factor
    to 1.  kept holds the surviving coordinate indices in order."""

    pivots: tuple
    kept: tuple
    names: tuple


def charts_of(ambient: AmbientSpace, names: Sequence[str]) -> list:
    """All pivot combinations, one pivot per factor."""
    combos = [()]
    for factor in ambient.factors:
        combos = [c + (i,) for c in combos for i in factor]
    out = []
    for pivots in combos:
        kept = tuple(i for i in range(ambient.ncoords) if i not in pivots)
        chart_names = tuple(_chart_name(names[i]) for i in kept)
        out.append(Chart(pivots, kept, chart_names))
    return out


def _chart_name(name: str) -> str:
    low = name.lower()
    return low if low != name else f"{name}_aff"


def dehomogenize(f: Polynomial, chart: Chart, extra: int = 0) -> Polynomial:
    """Set the pivot coordinates to 1; optionally append extra variables."""
    n_out = len(chart.kept) + extra
    images = []
    pos = {c: k for k, c in enumerate(chart.kept)}
    for i in range(f.nvars):
        if i in chart.pivots:
            images.append(Polynomial.one(n_out))
        else:
            images.append(Polynomial.variable(n_out, pos[i]))
    return f.substitute(images, out_nvars=n_out)


# -- singular locus ---------------------------------------------------------


@dataclass
class StepOutcome:
    ok: bool
    detail: dict = field(default_factory=dict)


def cone_singular_generators(scheme: HypersurfaceScheme) -> list:
    F = scheme.polynomial
    return [F] + [F.partial_derivative(i) for i in range(F.nvars)]


def saturate_by_irrelevant(
    scheme: HypersurfaceScheme,
    factor_order: Optional[Sequence[int]] = None,
    max_degree: Optional[int] = None,
) -> GroebnerBasis:
    """Saturate the cone Jacobian ideal by each factor's irrelevant ideal,
    iterating factors in the given order (default: declaration order)."""
    ambient = scheme.ambient
    gens = cone_singular_generators(scheme)
    current = gens
    order = list(factor_order) if factor_order is not None else list(
        range(len(ambient.factors))
    )
    basis = None
    for k in order:
        factor = ambient.factors[k]
        parts = []
        for c in factor:
            xc = Polynomial.variable(ambient.ncoords, c)
            parts.append(ideal_quotient_saturation(current, xc, GREVLEX, max_degree))
        merged = [v.components[0] for v in parts[0].generators]
        for part in parts[1:]:
            rhs = [v.components[0] for v in part.generators]
            if not merged or not rhs:
                merged = []
                break
            merged = [
                v.components[0]
                for v in ideal_intersection(merged, rhs, GREVLEX, max_degree).generators
            ]
        if not merged:
            merged = [Polynomial.zero(ambient.ncoords)]
        current = merged
        basis = groebner_ideal(current, GREVLEX, max_degree)
        current = [v.components[0] for v in basis.generators] or [
            Polynomial.zero(ambient.ncoords)
        ]
    assert basis is not None
    return basis


def _validate_coordinate_point(ambient: AmbientSpace, point) -> tuple:
    pt = tuple(Fraction(v) for v in point)
    if len(pt) != ambient.ncoords:
        raise GeometryError("point arity mismatch")
    for factor in ambient.factors:
        nonzero = [i for i in factor if pt[i] != 0]
        if len(nonzero) != 1:
            raise GeometryError(
                "claimed points must be coordinate points (one nonzero entry per factor)"
            )
        if pt[nonzero[0]] != 1:
            raise GeometryError("coordinate points must be normalized to entry 1")
    return pt


def point_pivots(ambient: AmbientSpace, point) -> tuple:
    pt = _validate_coordinate_point(ambient, point)
    return tuple(i for i in range(ambient.ncoords) if pt[i] != 0)


def singular_locus_check(
    scheme: HypersurfaceScheme,
    claimed_points: Sequence,
    max_degree: Optional[int] = None,
) -> StepOutcome:
    """Certify Sing(Y) == the claimed coordinate points, exactly.

    Combines the saturated cone ideal (evaluation at the claimed points and
    radical membership of every coordinate vanishing at all of them) with a
    chart-by-chart pin-down: a chart holding a claimed point must have its
    singular locus pinned to the chart origin, any other chart must have an
    empty one.  Chart loci are finite-dimensional throughout.
    """
    ambient = scheme.ambient
    names = scheme.coordinate_names
    F = scheme.polynomial
    points = [_validate_coordinate_point(ambient, p) for p in claimed_points]
    detail: dict = {"claimed": [[str(v) for v in p] for p in points]}
    failures = []

    for p in points:
        if F.evaluate(p) != 0:
            raise GeometryError("claimed point not on the scheme")

    sat = saturate_by_irrelevant(scheme, max_degree=max_degree)
    detail["saturated_basis_size"] = len(sat.generators)

    # (a) claimed points satisfy the saturated ideal
    for p in points:
        bad = [
            poly_to_text(v.components[0], names)
            for v in sat.generators
            if v.components[0].evaluate(p) != 0
        ]
        if bad:
            failures.append(f"saturated ideal does not vanish at {p}: {bad[:3]}")

    # (b) coordinates vanishing at all claimed points lie in the radical
    sat_polys = [v.components[0] for v in sat.generators]
    if points:
        common_zero = [
            c for c in range(ambient.ncoords) if all(p[c] == 0 for p in points)
        ]
        rad = {}
        for c in common_zero:
            ok = radical_membership(
                Polynomial.variable(ambient.ncoords, c), sat_polys, max_degree
            )
            rad[names[c]] = ok
            if not ok:
                failures.append(
                    f"coordinate {names[c]} not in the radical of the saturated ideal"
                )
        detail["radical_membership"] = rad
    else:
        if not sat.is_trivial():
            failures.append(
                "claimed smooth but the saturated singular ideal is nontrivial"
            )
        detail["saturated_trivial"] = sat.is_trivial()

    # chart-by-chart pin-down
    gens = cone_singular_generators(scheme)
    chart_records = {}
    for chart in charts_of(ambient, names):
        a_gens = [dehomogenize(g, chart) for g in gens]
        a_gens = [g for g in a_gens if not g.is_zero()] or [
            Polynomial.zero(len(chart.kept))
        ]
        basis = groebner_ideal(a_gens, GREVLEX, max_degree)
        label = "x".join(names[i] for i in chart.pivots)
        holder = [p for p in points if all(p[i] == 1 for i in chart.pivots)]
        if not holder:
            ok = basis.is_trivial()
            chart_records[label] = {"expects": "empty", "ok": ok}
            if not ok:
                failures.append(f"chart {label}: unclaimed singular points exist")
            continue
        # the chart origin is the claimed point; pin the locus to it
        polys = [v.components[0] for v in basis.generators]
        qd = quotient_dimension(basis)
        pinned = all(
            radical_membership(Polynomial.variable(len(chart.kept), k), polys,
                               max_degree)
            for k in range(len(chart.kept))
        )
        origin_singular = all(
            g.evaluate([0] * len(chart.kept)) == 0 for g in a_gens
        )
        ok = pinned and origin_singular and qd.dimension is not None
        chart_records[label] = {
            "expects": "origin",
            "pinned": pinned,
            "origin_singular": origin_singular,
            "local_dimension": qd.dimension,
            "ok": ok,
        }
        if not ok:
            failures.append(f"chart {label}: singular locus not pinned to the claim")
    detail["charts"] = chart_records
    if failures:
        detail["failures"] = failures
    return StepOutcome(not failures, detail)


# -- fixed loci -------------------------------------------------------------


@dataclass(frozen=True)
class FixedSubspace:
    """Coordinate subspace pointwise fixed by one scalar lift of the action."""

    coords: tuple  # kept coordinate indices, ascending


def fixed_locus(ambient: AmbientSpace, action: DiagonalProjectiveAction) -> list:
    """Fixed coordinate subspaces, one per scalar lift with nonempty support,
    deduplicated; products combine per-factor groups."""
    r = action.order
    per_factor = []
    for factor in ambient.factors:
        w_lcm = 1
        for i in factor:
            w_lcm = w_lcm * ambient.weights[i] // gcd(w_lcm, ambient.weights[i])
        modulus = r * w_lcm
        groups = {}
        for c in range(modulus):
            sel = tuple(
                i
                for i in factor
                if (ambient.weights[i] * c - action.weights[i] * w_lcm) % modulus == 0
            )
            if sel:
                groups[sel] = True
        per_factor.append(list(groups))
    combos = [()]
    for groups in per_factor:
        combos = [c + (g,) for c in combos for g in groups]
    out = []
    seen = set()
    for combo in combos:
        coords = tuple(sorted(i for g in combo for i in g))
        if coords not in seen:
            seen.add(coords)
            out.append(FixedSubspace(coords))
    return out


def _restrict_to_subspace(f: Polynomial, coords: Sequence[int]) -> Polynomial:
    """Set all other coordinates to zero, keeping the ambient arity."""
    keep = set(coords)
    terms = {
        e: c
        for e, c in f.terms.items()
        if all(k == 0 or i in keep for i, k in enumerate(e))
    }
    return Polynomial(f.nvars, terms)


def _binary_distinct_roots(form: Polynomial, u: int, v: int) -> int:
    """Distinct projective roots of a nonzero binary form in coordinates
    u, v (all other exponents zero)."""
    a = min(e[u] for e in form.terms)
    b = min(e[v] for e in form.terms)
    coeffs = {}
    for e, c in form.terms.items():
        coeffs[e[u] - a] = coeffs.get(e[u] - a, Fraction(0)) + c
    deg = max(coeffs)
    poly = [coeffs.get(i, Fraction(0)) for i in range(deg + 1)]
    distinct = _univariate_distinct_roots(poly)
    return distinct + (1 if a > 0 else 0) + (1 if b > 0 else 0)


def _univariate_distinct_roots(coeffs) -> int:
    deg = _udeg(coeffs)
    if deg <= 0:
        return 0
    deriv = [coeffs[i] * i for i in range(1, len(coeffs))]
    g = _ugcd(coeffs, deriv)
    return deg - _udeg(g)


def _udeg(coeffs) -> int:
    for i in range(len(coeffs) - 1, -1, -1):
        if coeffs[i]:
            return i
    return -1


def _ugcd(a, b):
    a, b = list(a), list(b)
    while _udeg(b) >= 0:
        a, b = b, _urem(a, b)
    d = _udeg(a)
    if d < 0:
        return [Fraction(0)]
    lead = a[d]
    return [c / lead for c in a[: d + 1]]


def _urem(a, b):
    a = list(a)
    db, lb = _udeg(b), b[_udeg(b)]
    while _udeg(a) >= db:
        da = _udeg(a)
        factor = a[da] / lb
        for i in range(db + 1):
            a[da - db + i] -= factor * b[i]
        a[da] = Fraction(0)
    return a


def fixed_points_on_scheme(
    scheme: HypersurfaceScheme, action: DiagonalProjectiveAction
) -> StepOutcome:
    """Intersect each fixed subspace with the hypersurface and count points
    where the intersection is finite; flag anything positive-dimensional."""
    ambient = scheme.ambient
    names = scheme.coordinate_names
    F = scheme.polynomial
    records = []
    total = 0
    all_finite = True
    for sub in fixed_locus(ambient, action):
        coords = sub.coords
        label = "{" + ",".join(names[i] for i in coords) + "}"
        proj_dim = sum(
            len([i for i in coords if i in factor]) - 1
            for factor in ambient.factors
            if any(i in factor for i in coords)
        )
        if any(not any(i in factor for i in coords) for factor in ambient.factors):
            continue  # no point of the product lies in this combination
        restricted = _restrict_to_subspace(F, coords)
        if restricted.is_zero():
            if proj_dim == 0:
                records.append({"subspace": label, "kind": "point-on-scheme", "count": 1})
                total += 1
            else:
                records.append(
                    {"subspace": label, "kind": "contained", "dimension": proj_dim}
                )
                all_finite = False
            continue
        if proj_dim == 0:
            records.append({"subspace": label, "kind": "off-scheme", "count": 0})
            continue
        if proj_dim == 1:
            free = _free_pair(ambient, coords)
            if free is None:
                records.append(
                    {"subspace": label, "kind": "uncounted-weighted-pair"}
                )
                all_finite = False
                continue
            count = _binary_distinct_roots(restricted, *free)
            records.append({"subspace": label, "kind": "finite", "count": count})
            total += count
            continue
        records.append(
            {"subspace": label, "kind": "positive-dimensional", "dimension": proj_dim - 1}
        )
        all_finite = False
    return StepOutcome(
        all_finite, {"subspaces": records, "fixed_point_count": total}
    )


def _free_pair(ambient: AmbientSpace, coords):
    """The two coordinates of the one factor contributing dimension 1;
    None when their weights differ (not a plain projective line)."""
    for factor in ambient.factors:
        inside = [i for i in coords if i in factor]
        if len(inside) == 2:
            u, v = inside
            if ambient.weights[u] != ambient.weights[v]:
                return None
            return u, v
    return None


# -- smoothing families -----------------------------------------------------


def family_smoothing_verify(
    family: SmoothingFamily,
    action: Optional[DiagonalProjectiveAction] = None,
    claimed_points: Sequence = (),
    max_degree: Optional[int] = None,
) -> StepOutcome:
    """Certify that the fibers of F + s*P are smooth for all small s != 0.

    Chart by chart, the chart variables are eliminated from the ideal of
    fiberwise singular points; the elimination must leave a nonzero
    univariate polynomial q(s), whose nonzero roots are the only possibly
    singular parameters (finitely many, bounded away from 0).  On weighted
    ambients a failing chart may instead certify that its bad locus sits
    inside the ambient singular subspaces, which quotient analysis covers.
    Independently, the total space must be smooth along the claimed central
    singular points: the perturbation cannot vanish there.
    """
    scheme = family.scheme
    ambient = scheme.ambient
    names = scheme.coordinate_names
    F, P = scheme.polynomial, family.perturbation
    detail: dict = {}
    failures = []

    if P.is_zero():
        return StepOutcome(
            False,
            {"failures": ["perturbation is zero: the family is constant and the "
                          "central singularity persists in every fiber"]},
        )
    if action is not None:
        a = action.cone_action()
        cf, cp = character_of(F, a), character_of(P, a)
        if cp is None or cp != cf:
            raise GeometryError(
                "perturbation is not semi-invariant with the equation's character; "
                "the family cannot descend to the quotient"
            )
        detail["perturbation_character"] = cp

    points = [_validate_coordinate_point(ambient, p) for p in claimed_points]
    central = {}
    for p in points:
        val = P.evaluate(p)
        label = "(" + ":".join(str(v) for v in p) + ")"
        central[label] = str(val)
        if val == 0:
            failures.append(
                f"total space is singular over the central singular point {label}"
            )
    detail["perturbation_at_claimed_points"] = central

    chart_records = {}
    for chart in charts_of(ambient, names):
        nchart = len(chart.kept)
        G = dehomogenize(F, chart, extra=1) + dehomogenize(P, chart, extra=1) * \
            Polynomial.variable(nchart + 1, nchart)
        gens = [G] + [G.partial_derivative(k) for k in range(nchart)]
        q = _eliminant_in_parameter(gens, nchart, max_degree)
        label = "x".join(names[i] for i in chart.pivots)
        record = {"eliminant_degree": _udeg(q), "eliminant_valuation": _uval(q)}
        if _udeg(q) >= 0:
            record["ok"] = True
        elif ambient.kind == "weighted":
            contained = _bad_locus_in_ambient_singularities(
                ambient, chart, gens, nchart, max_degree
            )
            record["ok"] = contained
            record["bad_locus_in_ambient_singular_locus"] = contained
            if not contained:
                failures.append(f"chart {label}: fibers singular for generic s")
        else:
            record["ok"] = False
            failures.append(f"chart {label}: fibers singular for generic s")
        chart_records[label] = record
    detail["charts"] = chart_records

    if ambient.kind == "weighted":
        meets = {}
        for coords in ambient.singular_coordinate_subspaces():
            lbl = "{" + ",".join(names[i] for i in coords) + "}"
            fr = _restrict_to_subspace(F, coords)
            pr = _restrict_to_subspace(P, coords)
            meets[lbl] = {
                "central_fiber_meets": not fr.is_zero() and _has_zero(fr, coords),
                "perturbation_restriction_zero": pr.is_zero(),
            }
        detail["ambient_singular_subspaces"] = meets

    if failures:
        detail["failures"] = failures
    return StepOutcome(not failures, detail)


def _uval(coeffs) -> Optional[int]:
    for i, c in enumerate(coeffs):
        if c:
            return i
    return None


def _has_zero(f: Polynomial, coords) -> bool:
    """Whether the restriction, viewed on the subspace, has a projective
    zero there: degree reasons make any non-constant form vanish somewhere
    unless the subspace is a single point."""
    live = [i for i in coords]
    if len(live) == 1:
        return f.is_zero()
    return True


def _eliminant_in_parameter(gens, nchart: int, max_degree=None):
    """Nonzero element of (ideal cap Q[s]) where s is the last of nchart+1
    variables, as a univariate coefficient list; [0] when none exists.

    The singular pairs (x, s) form a finite set in every verified example,
    so the minimal polynomial of s on the finite quotient algebra is the
    cheapest exact witness; block-order elimination only serves as the
    fallback for a positive-dimensional locus.
    """
    basis = groebner_ideal(gens, GREVLEX, max_degree)
    if basis.is_trivial():
        return [Fraction(1)]
    qd = quotient_dimension(basis)
    if qd.dimension is not None:
        return _minimal_polynomial_of_parameter(basis, nchart, qd.dimension)
    order = elimination_order(nchart + 1, list(range(nchart)))
    ebasis = groebner_ideal(gens, order, max_degree)
    best = None
    for v in ebasis.generators:
        p = v.components[0]
        if all(all(e[k] == 0 for k in range(nchart)) for e in p.terms):
            coeffs = {}
            for e, c in p.terms.items():
                coeffs[e[nchart]] = c
            deg = max(coeffs)
            poly = [coeffs.get(i, Fraction(0)) for i in range(deg + 1)]
            if best is None or _udeg(poly) < _udeg(best):
                best = poly
    return best if best is not None else [Fraction(0)]


def _minimal_polynomial_of_parameter(basis: GroebnerBasis, nchart: int,
                                     dimension: int):
    """Minimal polynomial of the last variable acting on the finite
    quotient algebra, by reducing its powers to normal form and finding
    the first linear dependence."""
    from .gb import normal_form_poly

    n = nchart + 1
    s = Polynomial.variable(n, nchart)
    rows = []  # (pivot exponent, row dict, combination coefficients)
    power = Polynomial.one(n)
    for k in range(dimension + 2):
        nf = normal_form_poly(power, basis)
        row = dict(nf.terms)
        combo = [Fraction(0)] * (k + 1)
        combo[k] = Fraction(1)
        for pivot, prow, pcombo in sorted(
            rows, key=lambda t: GREVLEX.key(t[0]), reverse=True
        ):
            if pivot in row:
                factor = row[pivot]
                for e, c in prow.items():
                    new = row.get(e, Fraction(0)) - factor * c
                    if new:
                        row[e] = new
                    else:
                        row.pop(e, None)
                for i, c in enumerate(pcombo):
                    combo[i] -= factor * c
        if not row:
            return combo
        pivot = max(row, key=GREVLEX.key)
        lead = row[pivot]
        rows.append(
            (
                pivot,
                {e: c / lead for e, c in row.items()},
                [c / lead for c in combo],
            )
        )
        power = power * s
    return [Fraction(0)]


def _bad_locus_in_ambient_singularities(
    ambient, chart, gens, nchart, max_degree
) -> bool:
    """After saturating by s, check the chart's bad locus is contained in
    the ambient singular coordinate subspaces."""
    s_poly = Polynomial.variable(nchart + 1, nchart)
    sat = ideal_quotient_saturation(gens, s_poly, GREVLEX, max_degree)
    polys = [v.components[0] for v in sat.generators]
    if sat.is_trivial():
        return True
    pos = {c: k for k, c in enumerate(chart.kept)}
    for coords in ambient.singular_coordinate_subspaces():
        outside = [pos[i] for i in chart.kept if i not in coords]
        if all(
            radical_membership(
                Polynomial.variable(nchart + 1, k), polys, max_degree
            )
            for k in outside
        ):
            return True
    return False


# -- terminality ------------------------------------------------------------


def reid_tai_terminal(r: int, local_weights: Sequence[int]) -> bool:
    """Standard age criterion for an isolated cyclic quotient 3-fold point:
    every nontrivial group element must have age strictly above 1."""
    if len(local_weights) != 3:
        raise GeometryError("three local weights required for a 3-fold point")
    if r < 1:
        raise GeometryError("group order must be positive")
    ws = [w % r for w in local_weights]
    if any(w == 0 for w in ws):
        raise GeometryError(
            "zero weight mod r: not an isolated quotient datum (fixed locus in "
            "codimension < 3)"
        )
    for j in range(1, r):
        age = sum(Fraction((j * w) % r, r) for w in ws)
        if age <= 1:
            return False
    return True


# -- germ extraction --------------------------------------------------------


def chart_germ(
    scheme: HypersurfaceScheme,
    point,
    action: Optional[DiagonalProjectiveAction] = None,
):
    """Germ of the hypersurface at a coordinate point, in the chart slicing
    each pivot to 1, minimalized; returns (germ, induced cyclic action or
    None, chart)."""
    ambient = scheme.ambient
    names = scheme.coordinate_names
    pivots = point_pivots(ambient, point)
    for c in pivots:
        if ambient.weights[c] != 1:
            raise GeometryError(
                "germ extraction needs a weight-1 pivot coordinate (the chart at "
                "a weighted coordinate is a quotient, not a slice)"
            )
    chart = Chart(
        pivots,
        tuple(i for i in range(ambient.ncoords) if i not in pivots),
        tuple(_chart_name(names[i]) for i in range(ambient.ncoords) if i not in pivots),
    )
    f_chart = dehomogenize(scheme.polynomial, chart)
    germ = minimalize([f_chart], chart.names)
    induced = None
    if action is not None:
        r = action.order
        pivot_of = {}
        for c in pivots:
            pivot_of[ambient.factor_of(c)] = c
        full = []
        for i in chart.kept:
            piv = pivot_of[ambient.factor_of(i)]
            full.append(
                (action.weights[i] - ambient.weights[i] * action.weights[piv]) % r
            )
        kept_names = germ.names()
        positions = [chart.names.index(n) for n in kept_names]
        dropped = [k for k in range(len(chart.kept)) if k not in positions]
        if any(full[k] != 0 for k in dropped):
            raise GeometryError(
                "minimalization eliminated a chart variable of nonzero weight"
            )
        induced = CyclicAction(r, tuple(full[k] for k in positions))
    return germ, induced, chart


# -- the example pipeline ---------------------------------------------------


@dataclass
class StepRecord:
    name: str
    status: str  # pass | fail | skipped | error
    detail: dict
    wall_ms: int


def _run_step(records, name, fn, skip=False, skip_reason=""):
    if skip:
        records.append(StepRecord(name, "skipped", {"reason": skip_reason}, 0))
        return None
    t0 = time.perf_counter()
    try:
        outcome = fn()
    except Exception as exc:  # noqa: BLE001 - aggregated per step by contract
        wall = int((time.perf_counter() - t0) * 1000)
        records.append(StepRecord(name, "error", {"error": str(exc)}, wall))
        return None
    wall = int((time.perf_counter() - t0) * 1000)
    if isinstance(outcome, StepOutcome):
        records.append(
            StepRecord(name, "pass" if outcome.ok else "fail", outcome.detail, wall)
        )
        return outcome
    records.append(StepRecord(name, "pass", outcome or {}, wall))
    return outcome


def example_pipeline(spec: "PipelineSpec") -> list:
    """Run all verification steps for one ambient example; returns the step
    records in order.  Failures do not stop later steps."""
    records: list = []
    scheme = spec.scheme
    names = scheme.coordinate_names
    action = spec.action

    def homogeneity():
        degs = scheme.multidegree()
        return StepOutcome(True, {"multidegree": list(degs)})

    _run_step(records, "homogeneity", homogeneity)

    _run_step(
        records,
        "singular_locus",
        lambda: singular_locus_check(scheme, spec.claimed_singular_points,
                                     spec.max_degree),
    )

    fixed_outcome = None
    if action is not None:
        def fixed():
            nonlocal fixed_outcome
            fixed_outcome = fixed_points_on_scheme(scheme, action)
            out = fixed_outcome
            total = out.detail.get("fixed_point_count", 0)
            claimed_fixed = 0
            for p in spec.claimed_singular_points:
                pivots = point_pivots(scheme.ambient, p)
                subs = fixed_locus(scheme.ambient, action)
                if any(set(pivots) <= set(s.coords) for s in subs):
                    claimed_fixed += 1
            quotient_count = total - claimed_fixed
            out.detail["quotient_point_count"] = quotient_count
            if spec.paper_quotient_count is not None:
                out.detail["declared_count"] = spec.paper_quotient_count
                out.detail["count_discrepancy"] = (
                    quotient_count != spec.paper_quotient_count
                )
            return out

        _run_step(records, "fixed_locus", fixed)

        def equation_character():
            c = character_of(scheme.polynomial, action.cone_action())
            ok = c == 0
            return StepOutcome(ok, {"character": c, "order": action.order})

        _run_step(records, "equation_character", equation_character)
    else:
        _run_step(records, "fixed_locus", None, skip=True, skip_reason="no action")
        _run_step(records, "equation_character", None, skip=True,
                  skip_reason="no action")

    for p in spec.claimed_singular_points:
        label = "(" + ":".join(str(v) for v in p) + ")"

        def germ_steps(point=p, label=label):
            germ, induced, chart = chart_germ(scheme, point, action)
            rec = {
                "chart": "x".join(names[i] for i in chart.pivots),
                "variables": list(germ.names()),
                "equations": [poly_to_text(f, germ.names()) for f in germ.equations],
            }
            if induced is not None:
                rec["induced_weights"] = list(induced.weights)
            t1p = t1_module(germ, spec.max_degree)
            rec["tjurina"] = t1p.tjurina
            ok = t1p.tjurina is not None and t1p.tjurina > 0
            expected = spec.expected_tjurina.get(tuple(point))
            if expected is not None:
                rec["expected_tjurina"] = expected
                ok = ok and t1p.tjurina == expected
            if induced is not None:
                ordinary = is_ordinary(germ, induced)
                rec["ordinary"] = ordinary
                ok = ok and ordinary
                if not ordinary:
                    rec["ordinarity_note"] = ordinarity_note(germ, induced)
                if ordinary and t1p.tjurina:
                    decomp = character_decomposition(t1p, induced)
                    rec["character_dimensions"] = {
                        str(k): v for k, v in sorted(decomp.items())
                    }
                    cls = invariant_good_direction(
                        t1p, induced, ProperSubmodule.zero()
                    )
                    rec["direction_character"] = class_character(cls, induced)
                else:
                    cls = None
            else:
                cls = good_direction_for_submodule(t1p, ProperSubmodule.zero())
            if cls is not None:
                rec["good_direction"] = [
                    poly_to_text(q, germ.names())
                    for q in cls.representative.components
                ]
                bertini = verify_good_direction_bertini(germ, cls)
                rec["bertini_agrees"] = bertini
                ok = ok and bertini
            return StepOutcome(ok, rec)

        _run_step(records, f"germ{label}", germ_steps)

    if spec.family is None:
        _run_step(records, "family_smoothing", None, skip=True,
                  skip_reason="no smoothing declared")
    elif spec.skip_family:
        _run_step(records, "family_smoothing", None, skip=True,
                  skip_reason="family verification disabled")
    else:
        _run_step(
            records,
            "family_smoothing",
            lambda: family_smoothing_verify(
                spec.family, action, spec.claimed_singular_points, spec.max_degree
            ),
        )

    for i, qp in enumerate(spec.quotient_points):
        def reid_tai(entry=qp):
            ok = reid_tai_terminal(entry["order"], entry["weights"])
            det = {
                "order": entry["order"],
                "weights": list(entry["weights"]),
                "terminal": ok,
            }
            if "count" in entry:
                det["count"] = entry["count"]
            if "label" in entry:
                det["label"] = entry["label"]
            return StepOutcome(ok, det)

        _run_step(records, f"reid_tai[{i}]", reid_tai)

    if spec.claims:
        _run_step(
            records,
            "claims_recorded",
            lambda: StepOutcome(True, {"recorded_without_proof": spec.claims}),
        )
    return records


@dataclass
class PipelineSpec:
    """Everything one ambient example needs; built by the manifest layer."""

    scheme: HypersurfaceScheme
    action: Optional[DiagonalProjectiveAction] = None
    claimed_singular_points: tuple = ()
    expected_tjurina: dict = field(default_factory=dict)
    family: Optional[SmoothingFamily] = None
    quotient_points: tuple = ()
    paper_quotient_count: Optional[int] = None
    claims: dict = field(default_factory=dict)
    skip_family: bool = False
    max_degree: Optional[int] = None
