"""Cyclic group actions on germs by coordinate weights.

A group of order r acts diagonally, multiplying coordinate i by a fixed
primitive r-th root of unity raised to the weight a_i.  Roots of unity
never appear explicitly: every question reduces to characters, the
weighted exponent sums mod r.  A polynomial is semi-invariant when all
its monomials share one character, invariant when that character is 0.

A germ presentation is ordinary when its given equations are invariant.
For an ordinary germ the unit-vector deformation classes are invariant,
so an invariant good direction avoiding any proper submodule exists; the
selection mirrors the plain case.  Equivariant one-parameter families are
checked for invariance of the total-space equations and for ordinarity of
their sampled fibers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .gb import groebner_ideal, radical_membership
from .poly import Polynomial
from .t1 import (
    GermError,
    GermPresentation,
    ProperSubmodule,
    T1Class,
    T1Presentation,
    good_direction_for_submodule,
    jacobian_minors,
    minimalize,
)


class EquivarianceError(ValueError):
    pass


@dataclass(frozen=True)
class CyclicAction:
    """Order-r cyclic action with one weight per coordinate, 0 <= a_i < r."""

    order: int
    weights: tuple

    def __post_init__(self):
        if self.order <= 0:
            raise EquivarianceError("group order must be positive")
        object.__setattr__(
            self, "weights", tuple(w % self.order for w in self.weights)
        )

    @property
    def nvars(self) -> int:
        return len(self.weights)

    def monomial_character(self, expt) -> int:
        return sum(w * k for w, k in zip(self.weights, expt)) % self.order

    def restrict(self, indices: Sequence[int]) -> "CyclicAction":
        return CyclicAction(self.order, tuple(self.weights[i] for i in indices))

    def extend(self, extra_weights: Sequence[int]) -> "CyclicAction":
        return CyclicAction(self.order, self.weights + tuple(extra_weights))


def character_of(f: Polynomial, action: CyclicAction) -> Optional[int]:
    """The shared character of f's monomials, or None if mixed
    (not semi-invariant).  The zero polynomial has no character."""
    if f.is_zero():
        raise EquivarianceError("the zero polynomial has no character")
    if f.nvars != action.nvars:
        raise EquivarianceError("weight vector arity mismatch")
    chars = {action.monomial_character(e) for e in f.terms}
    if len(chars) == 1:
        return next(iter(chars))
    return None


def is_invariant(f: Polynomial, action: CyclicAction) -> bool:
    return f.is_zero() or character_of(f, action) == 0


def is_ordinary(germ: GermPresentation, action: CyclicAction) -> bool:
    """True when every defining equation is invariant as given.

    For hypersurfaces a semi-invariant equation of nonzero character cannot
    be repaired by a unit multiplier (units have invariant nonzero constant
    term), so the verdict is final for this presentation; re-choosing
    generators for higher codimension is not attempted.
    """
    if action.nvars != germ.e:
        raise EquivarianceError("weight vector arity mismatch")
    return all(is_invariant(f, action) for f in germ.equations)


def ordinarity_detail(germ: GermPresentation, action: CyclicAction) -> list:
    """Per-equation characters (None when not semi-invariant)."""
    return [character_of(f, action) for f in germ.equations]


def ordinarity_note(germ: GermPresentation, action: CyclicAction):
    """Human-readable verdict qualifier for a non-ordinary presentation."""
    if is_ordinary(germ, action):
        return None
    if germ.d == 1:
        c = character_of(germ.equations[0], action)
        if c is not None:
            return (
                f"not ordinary in this presentation: the equation is "
                f"semi-invariant of character {c}, which no unit multiple "
                f"can change"
            )
        return "not ordinary in this presentation: the equation is not semi-invariant"
    return (
        "not ordinary in this presentation; re-choosing generators in higher "
        "codimension is not attempted"
    )


def class_character(cls: T1Class, action: CyclicAction) -> Optional[int]:
    """Character of a deformation class over an ordinary germ: the shared
    character of all monomial-vector terms of a representative (components
    of the standard basis carry character 0 because the equations are
    invariant)."""
    chars = set()
    for p in cls.representative.components:
        for e in p.terms:
            chars.add(action.monomial_character(e))
    if not chars:
        return 0
    if len(chars) == 1:
        return next(iter(chars))
    return None


def invariant_good_direction(
    t1: T1Presentation, action: CyclicAction, module: ProperSubmodule
) -> T1Class:
    """An invariant unit-vector class avoiding the submodule's constant span.

    Requires the germ ordinary; then unit vectors are invariant and the
    plain selection already returns an invariant class.
    """
    if not is_ordinary(t1.germ, action):
        raise EquivarianceError("germ is not ordinary in this presentation")
    cls = good_direction_for_submodule(t1, module)
    assert class_character(cls, action) == 0
    return cls


def character_decomposition(t1: T1Presentation, action: CyclicAction) -> dict:
    """Dimensions of the character subspaces of the deformation module,
    keyed by character; values sum to the Tjurina number."""
    if t1.quotient.standard is None:
        raise EquivarianceError("infinite-dimensional module")
    out: dict = {}
    for expt, _comp in t1.quotient.standard:
        c = action.monomial_character(expt)
        out[c] = out.get(c, 0) + 1
    return out


@dataclass(frozen=True)
class FamilyVerdict:
    """Outcome of the equivariant family check."""

    invariant: bool
    equation_characters: tuple
    fiber_reports: tuple  # tuple[(s_value, status, detail)]

    @property
    def ordinary_preserved(self) -> bool:
        return self.invariant and all(
            status == "pass" for _, status, _ in self.fiber_reports
        )


def equivariant_family_check(
    germ: GermPresentation,
    action: CyclicAction,
    h: Sequence[Polynomial],
    samples=(1, -1, 2),
) -> FamilyVerdict:
    """Check a one-parameter deformation with the parameter as the last
    variable of weight zero.

    The total-space equations f_k + h_k must be invariant under the
    extended action; each h_k must be divisible by the parameter.  At each
    sampled parameter value the fiber is inspected: either it is smooth
    near the chart (trivial singular ideal), or its singular locus is
    pinned to the origin and the re-minimalized germ there must again be
    presentable by invariant equations.
    """
    e, d = germ.e, germ.d
    if len(h) != d:
        raise EquivarianceError("one perturbation per equation required")
    for hk in h:
        if hk.nvars != e + 1:
            raise EquivarianceError("perturbations live in e+1 variables (parameter last)")
        if any(expt[e] == 0 for expt in hk.terms):
            raise EquivarianceError("perturbation not divisible by the parameter")
    if action.nvars != e:
        raise EquivarianceError("weight vector arity mismatch")
    extended = action.extend((0,))

    lifted = [
        Polynomial(e + 1, {expt + (0,): c for expt, c in f.terms.items()})
        for f in germ.equations
    ]
    totals = [lf + hk for lf, hk in zip(lifted, h)]
    chars = []
    invariant = True
    for F in totals:
        c = character_of(F, extended) if not F.is_zero() else 0
        chars.append(c)
        if c != 0:
            invariant = False

    fiber_reports = []
    for s0 in samples:
        if not invariant:
            fiber_reports.append((s0, "skipped", "family not invariant"))
            continue
        fiber_reports.append((s0, *_check_fiber(germ, action, totals, s0)))
    return FamilyVerdict(invariant, tuple(chars), tuple(fiber_reports))


def _check_fiber(germ, action, totals, s0):
    e, d = germ.e, germ.d
    s_val = Fraction(s0)
    images = [Polynomial.variable(e, i) for i in range(e)] + [
        Polynomial.constant(e, s_val)
    ]
    fiber = [F.substitute(images) for F in totals]
    sing_gens = [f for f in fiber if not f.is_zero()]
    minors = jacobian_minors(fiber, e)
    sing_gens.extend(m for m in minors if not m.is_zero())
    if not sing_gens:
        return "fail", "fiber is the whole space"
    basis = groebner_ideal(sing_gens)
    if basis.is_trivial():
        return "pass", "fiber smooth in the chart (trivial singular ideal)"
    # pinned to the origin?
    polys = [v.components[0] for v in basis.generators]
    pinned = all(
        radical_membership(Polynomial.variable(e, i), polys) for i in range(e)
    )
    if not pinned:
        return "fail", "fiber singular locus not pinned to the chart origin"
    if any(f.constant_term() != 0 for f in fiber):
        return "fail", "singular at origin but fiber equations do not vanish there"
    reduced = minimalize(fiber, germ.names())
    kept = [list(germ.names()).index(n) for n in reduced.names()]
    induced = action.restrict(kept)
    dropped = [i for i in range(e) if i not in kept]
    if any(action.weights[i] != 0 for i in dropped):
        return (
            "fail",
            "minimalization eliminated a variable of nonzero weight; induced "
            "action undefined",
        )
    if is_ordinary(reduced, induced):
        return "pass", "fiber germ at origin ordinary under the induced action"
    return "fail", "fiber germ at origin not presentable by invariant equations"
